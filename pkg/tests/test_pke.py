import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from encryip.errors import KeySpaceExhausted, NotInSubgroup, TooManyKeys
from encryip.group import gen_params
from encryip.pke import (Ciphertext, SecretKey, add_user, dec, enc, fake, gen, is_well_formed, key_matches,
                         keys_from_trapdoor, random_invalid_key, samp_dist)


def test_worked_keygen(worked):
    pk, keys, auth = worked
    assert (pk.g1, pk.g2, pk.h) == (2, 4, 4)
    assert [(k.a, k.b) for k in keys] == [(1, 2), (2, 0), (0, 1)]
    assert [k.id for k in keys] == [1, 2, 3]
    for sk in keys:
        assert key_matches(pk, sk)
    assert auth.issued_b == [2, 0, 1]


def test_worked_enc_dec(worked):
    pk, keys, _ = worked
    G = pk.params
    c = enc(pk, 2, r=1)
    assert c == (2, 4, 1)
    assert dec(G, keys[0], c) == 2
    assert dec(G, keys[1], c) == 2
    assert enc(pk, 4, r=0) == (1, 1, 4)
    for sk in keys:
        assert dec(G, sk, Ciphertext(1, 1, 2)) == 2


def test_worked_fake(worked):
    pk, keys, auth = worked
    G = pk.params
    c = fake(pk, r1=1, r2=2, u3=4)
    assert c == (2, 2, 4)
    assert [dec(G, sk, c) for sk in keys] == [4, 1, 2]
    assert not is_well_formed(pk, c, auth)


def test_worked_samp_dist(worked):
    pk, keys, _ = worked
    G = pk.params
    assert samp_dist(pk, (2, 4, 1), r=0) == (2, 4, 1)
    c = samp_dist(pk, (2, 4, 1), r=1)
    assert c == (4, 2, 4)
    assert dec(G, keys[0], c) == 2
    for r in range(3):
        assert [dec(G, sk, samp_dist(pk, (2, 2, 4), r=r)) for sk in keys] == [4, 1, 2]


def test_worked_add_user(g7):
    pk, keys, auth = keys_from_trapdoor(g7, t=2, a1=1, b1=2, bs=[0])
    sk3 = add_user(g7, auth, b=1)
    assert (sk3.id, sk3.a, sk3.b) == (3, 0, 1)
    assert key_matches(pk, sk3)
    with pytest.raises(KeySpaceExhausted):
        add_user(g7, auth, np.random.default_rng(0))


def test_gen_single_key(rng):
    G = gen_params(5)
    pk, keys, auth = gen(G, 1, rng)
    assert len(keys) == 1 and (keys[0].a, keys[0].b) == (auth.a1, auth.b1)


def test_gen_too_many_keys(g7, rng):
    with pytest.raises(TooManyKeys):
        gen(g7, 4, rng)


@pytest.mark.parametrize("q_min,P", [(3, 3), (5, 2), (11, 11), (23, 7)])
def test_gen_keys_distinct_and_consistent(q_min, P, rng):
    G = gen_params(q_min)
    pk, keys, auth = gen(G, P, rng)
    assert len({k.b for k in keys}) == P
    assert auth.t != 0 and pk.g2 == pow(G.g1, auth.t, G.p)
    assert all(key_matches(pk, sk) for sk in keys)


def test_correctness_exhaustive_q3(worked):
    pk, keys, _ = worked
    G = pk.params
    for m, r in itertools.product(G.elements(), range(3)):
        c = enc(pk, m, r=r)
        assert all(dec(G, sk, c) == m for sk in keys)


def test_fake_pairwise_distinct(rng):
    G = gen_params(11)
    pk, keys, auth = gen(G, 11, rng)
    for _ in range(1000):
        c = fake(pk, rng)
        assert not is_well_formed(pk, c, auth)
        assert len({dec(G, sk, c) for sk in keys}) == len(keys)


def test_rerandomization_exhaustive_q3(worked):
    pk, keys, _ = worked
    G = pk.params
    elems = G.elements()
    for c in itertools.product(elems, repeat=3):
        for r in range(3):
            c2 = samp_dist(pk, c, r=r)
            assert all(dec(G, sk, c2) == dec(G, sk, c) for sk in keys)


def test_dec_rejects_non_members(worked):
    pk, keys, _ = worked
    with pytest.raises(NotInSubgroup):
        dec(pk.params, keys[0], (3, 1, 1))
    with pytest.raises(NotInSubgroup):
        enc(pk, 5, r=1)
    with pytest.raises(NotInSubgroup):
        samp_dist(pk, (1, 6, 1), r=0)


def test_add_user_keeps_correctness(rng):
    G = gen_params(7)
    pk, keys, auth = gen(G, 3, rng)
    before = [(k.a, k.b) for k in keys]
    new = add_user(G, auth, rng)
    assert new.id == 4 and new.b not in {k.b for k in keys}
    assert [(k.a, k.b) for k in keys] == before
    for _ in range(50):
        m = G.index_element(int(rng.integers(0, G.q)))
        assert dec(G, new, enc(pk, m, rng)) == m
    c = fake(pk, rng)
    assert len({dec(G, sk, c) for sk in keys + [new]}) == 4


def test_add_user_until_exhausted(rng):
    G = gen_params(5)
    pk, keys, auth = gen(G, 2, rng)
    for _ in range(3):
        keys.append(add_user(G, auth, rng))
    assert sorted(auth.issued_b) == list(range(5))
    with pytest.raises(KeySpaceExhausted):
        add_user(G, auth, rng)


def test_random_invalid_key(rng):
    G = gen_params(5)
    pk, keys, _ = gen(G, 2, rng)
    bad = random_invalid_key(pk, rng)
    assert not key_matches(pk, bad)


def test_records_roundtrip(worked):
    from encryip.pke import AuthorityState, PublicKey
    pk, keys, auth = worked
    assert PublicKey.from_record(pk.to_record()) == pk
    assert SecretKey.from_record(keys[1].to_record()) == keys[1]
    assert AuthorityState.from_record(auth.to_record()) == auth


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([3, 5, 11, 23]), st.integers(1, 23), st.integers(0, 2 ** 32 - 1))
def test_correctness_property(q_min, P, seed):
    G = gen_params(q_min)
    P = min(P, G.q)
    rng = np.random.default_rng(seed)
    pk, keys, _ = gen(G, P, rng)
    m = G.index_element(int(rng.integers(0, G.q)))
    c = enc(pk, m, rng)
    assert all(dec(G, sk, c) == m for sk in keys)
    c2 = samp_dist(pk, c, rng)
    assert all(dec(G, sk, c2) == m for sk in keys)


def test_ciphertext_marginals_uniform():
    G = gen_params(11)
    rng = np.random.default_rng(2024)
    pk, _, _ = gen(G, 3, rng)
    m = G.index_element(5)
    cts = np.array([enc(pk, m, rng) for _ in range(10_000)])
    for coord in range(3):
        idx = [G.element_index(u) for u in cts[:, coord]]
        counts = np.bincount(idx, minlength=G.q)
        assert stats.chisquare(counts).pvalue > 0.001
