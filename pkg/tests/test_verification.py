import itertools

import numpy as np
import pytest

from encryip.data import (encrypt_dataset, feature_bounds, inject, make_blobs, make_verification_record, split)
from encryip.deploy import DeploymentHandle, raw_ciphertext
from encryip.data import expected_decryptions
from encryip.errors import UnknownRecord
from encryip.group import gen_params
from encryip.model import TrainConfig, train
from encryip.pke import Ciphertext, SecretKey, gen, key_matches
from encryip.verification import (ArbitrationContext, TrialResult, finetune_attack, format_report,
                                  suspect_observe, trace_all_keys, verify_key, verify_leak)


@pytest.fixture
def worked_ctx(worked, rng):
    pk, keys, _ = worked
    rec = make_verification_record(pk, keys, np.zeros(2), rng, c_bar=Ciphertext(2, 2, 4))
    return ArbitrationContext(pk, keys, 3, [rec]), rec


def test_verify_key(worked_ctx):
    ctx, _ = worked_ctx
    assert verify_key(ctx, SecretKey(9, 2, 0)) == 2
    assert verify_key(ctx, SecretKey(2, 2, 1)) is None


def test_verify_key_exhaustive_q3(worked_ctx):
    ctx, _ = worked_ctx
    issued = {(k.a, k.b): k.id for k in ctx.keys}
    for a, b in itertools.product(range(3), repeat=2):
        j = verify_key(ctx, SecretKey(0, a, b))
        assert j == issued.get((a, b))
        if j is not None:
            assert key_matches(ctx.pk, SecretKey(0, a, b))


def test_verify_leak_lookup(worked_ctx):
    ctx, rec = worked_ctx
    assert verify_leak(ctx, rec, 0) == 2
    assert verify_leak(ctx, rec, 2) == 1
    assert verify_leak(ctx, rec, 1) == 3
    assert verify_leak(ctx, rec, 7) is None
    assert verify_leak(ctx, rec, 0) == verify_leak(ctx, rec, 0)


def test_verify_leak_unknown_record(worked_ctx, worked, rng):
    ctx, _ = worked_ctx
    pk, keys, _ = worked
    other = make_verification_record(pk, keys, np.zeros(2), rng, c_bar=Ciphertext(1, 2, 4))
    with pytest.raises(UnknownRecord):
        verify_leak(ctx, other, 0)


def test_context_requires_full_coverage(worked, worked_ctx):
    pk, keys, _ = worked
    _, rec = worked_ctx
    with pytest.raises(ValueError):
        ArbitrationContext(pk, keys[:2], 3, [rec])


@pytest.fixture(scope="module")
def protected():
    rng = np.random.default_rng(21)
    G = gen_params(4)
    pk, keys, _ = gen(G, 3, rng)
    full = make_blobs(4, 150, 6, spacing=3.0, seed=21)
    tr, te = split(full, 400)
    clean = encrypt_dataset(pk, tr, rng)
    ed = inject(clean, make_verification_record(pk, keys, feature_bounds(tr.X), rng))
    model = train(ed, TrainConfig(epochs=50, hidden=16, seed=5))
    return ArbitrationContext(pk, keys, 4, ed.records), model, clean, te


def test_tracing_signal_survives_deployment(protected):
    ctx, model, _, _ = protected
    h = DeploymentHandle(model, ctx.pk, ctx.z)
    rec = ctx.records[0]
    assert expected_decryptions(ctx.params, ctx.keys, raw_ciphertext(h, rec.x_bar)) == rec.expected
    rng = np.random.default_rng(0)
    for sk in ctx.keys:
        assert verify_leak(ctx, rec, suspect_observe(h, sk, rec.x_bar, rng)) == sk.id
    assert trace_all_keys(ctx, h, rng) == 1.0


def test_finetune_single_part(protected):
    ctx, model, clean, te = protected
    rounds = finetune_attack(ctx, model, clean, 1, TrainConfig(learning_rate=0.01, epochs=3, hidden=16), te,
                             np.random.default_rng(0))
    assert [r.round for r in rounds] == [0, 1]


def test_finetune_rounds(protected):
    ctx, model, clean, te = protected
    rounds = finetune_attack(ctx, model, clean, 5, TrainConfig(learning_rate=0.01, epochs=10, hidden=16), te,
                             np.random.default_rng(0))
    assert len(rounds) == 6
    assert all(r.verification == 1.0 for r in rounds)
    assert all(abs(r.accuracy - rounds[0].accuracy) <= 0.05 for r in rounds)
    with pytest.raises(ValueError):
        finetune_attack(ctx, model, clean, 0, TrainConfig(), te, np.random.default_rng(0))


def test_report_format():
    lines = format_report([TrialResult(0, 2, 1, 2), TrialResult(1, 3, 4, None)]).splitlines()
    assert lines[0] == "trial=0 leaker=2 observed=1 identified=2 match=1"
    assert lines[1] == "trial=1 leaker=3 observed=4 identified=False match=0"
    assert lines[2] == "summary: 1/2 identified, accuracy=0.5000"
