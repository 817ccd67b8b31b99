"""Desk-scale experiment harnesses: effectiveness, leak tracing, fine-tuning, q sweep.

All runs use Gaussian blobs and a small numpy network, and are fully
determined by their seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .data import (encrypt_dataset, expected_decryptions, feature_bounds, inject, make_blobs,
                   make_verification_record, split)
from .deploy import DeploymentHandle, evaluate, evaluate_plain
from .group import gen_params
from .model import TrainConfig, train, train_plain
from .pke import add_user, gen, random_invalid_key
from .verification import (ArbitrationContext, AttackRound, TrialResult, finetune_attack,
                           suspect_observe, verify_leak)


@dataclass
class Benchmark:
    """The fixed synthetic task: 4 classes, 200 training rows per class, 8 features."""

    classes: int = 4
    per_class: int = 200
    test_per_class: int = 200
    dim: int = 8
    spacing: float = 3.0
    data_seed: int = 1
    train_cfg: TrainConfig = field(default_factory=lambda: TrainConfig(
        learning_rate=0.1, epochs=50, batch_size=32, hidden=16, seed=0))
    # fine-tuning uses a tenth of the training rate and short rounds
    finetune_cfg: TrainConfig = field(default_factory=lambda: TrainConfig(
        learning_rate=0.01, epochs=10, batch_size=32, hidden=16, seed=1000))

    def datasets(self):
        full = make_blobs(self.classes, self.per_class + self.test_per_class, self.dim,
                          self.spacing, seed=self.data_seed)
        return split(full, self.classes * self.per_class)


@dataclass
class EffectivenessResult:
    baseline: float
    correct_key: float
    incorrect_key: float
    q: int
    losses: List[float]


def effectiveness(bench: Benchmark, seed: int = 0, q_min: Optional[int] = None,
                  n_keys: int = 3) -> EffectivenessResult:
    """Plain baseline vs the encrypted-label model, read with a valid and an invalid key."""
    tr, te = bench.datasets()
    rng = np.random.default_rng(seed)
    params = gen_params(q_min or bench.classes)
    pk, keys, _ = gen(params, min(n_keys, params.q), rng)
    ed = encrypt_dataset(pk, tr, rng)
    model = train(ed, bench.train_cfg)
    baseline = train_plain(tr.X, tr.y, tr.z, bench.train_cfg)
    h = DeploymentHandle(model, pk, tr.z)
    return EffectivenessResult(
        baseline=evaluate_plain(baseline, te),
        correct_key=evaluate(h, te, keys[0], rng),
        incorrect_key=evaluate(h, te, random_invalid_key(pk, rng), rng),
        q=params.q,
        losses=list(model.history),
    )


def q_sweep(bench: Benchmark, qs: Sequence[int], seed: int = 0) -> Dict[int, float]:
    """Correct-key accuracy for each group order in ``qs``."""
    return {q: effectiveness(bench, seed, q_min=q).correct_key for q in qs}


def leak_trials(bench: Benchmark, trials: int = 30, n_keys: int = 3, seed: int = 0,
                extra_users: int = 0) -> List[TrialResult]:
    """Independent trace experiments: fresh keys, fresh probe, fresh model, random leaker.

    With ``extra_users``, keys are issued after training and the leaker is
    drawn from the enlarged set; the model is not retrained.
    """
    tr, _ = bench.datasets()
    results = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        params = gen_params(bench.classes)
        pk, keys, auth = gen(params, n_keys, rng)
        ed = encrypt_dataset(pk, tr, rng)
        ed = inject(ed, make_verification_record(pk, keys, feature_bounds(tr.X), rng, avoid=tr.X))
        model = train(ed, replace(bench.train_cfg, seed=bench.train_cfg.seed + trial))
        for _ in range(extra_users):
            keys.append(add_user(params, auth, rng))
        rec = ed.records[-1]
        if extra_users:
            # the arbitrator extends its table for the new keys
            rec = replace(rec, expected=expected_decryptions(params, keys, rec.c_bar))
        ctx = ArbitrationContext(pk, keys, tr.z, [rec])
        leaker = keys[int(rng.integers(0, len(keys)))]
        h = DeploymentHandle(model, pk, tr.z)
        observed = suspect_observe(h, leaker, rec.x_bar, rng)
        results.append(TrialResult(trial, leaker.id, observed, verify_leak(ctx, rec, observed)))
    return results


def attack_trials(bench: Benchmark, trials: int = 10, parts: int = 5, n_keys: int = 3,
                  seed: int = 0) -> List[List[AttackRound]]:
    """Fine-tuning attack repeated over independent models.

    The attacker fine-tunes on the encrypted training rows without the
    injected probe copies.
    """
    tr, te = bench.datasets()
    out = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        params = gen_params(bench.classes)
        pk, keys, _ = gen(params, n_keys, rng)
        clean = encrypt_dataset(pk, tr, rng)
        ed = inject(clean, make_verification_record(pk, keys, feature_bounds(tr.X), rng, avoid=tr.X))
        model = train(ed, replace(bench.train_cfg, seed=bench.train_cfg.seed + trial))
        ctx = ArbitrationContext(pk, keys, tr.z, ed.records)
        cfg = replace(bench.finetune_cfg, seed=bench.finetune_cfg.seed + 100 * trial)
        out.append(finetune_attack(ctx, model, clean, parts, cfg, te, rng))
    return out
