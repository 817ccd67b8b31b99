import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from encryip.codec import (LabelEncoding, block_argmax, decode_label, encode_label, format_confused,
                           parse_confused, phi, phi_batch, phi_inv)
from encryip.errors import BadLength, LabelOutOfRange, NotInSubgroup
from encryip.group import gen_params
from encryip.pke import dec, enc


def test_encode_label(g7):
    enc3 = LabelEncoding(g7, 3)
    assert [encode_label(enc3, y) for y in range(3)] == [1, 2, 4]
    with pytest.raises(LabelOutOfRange):
        encode_label(enc3, 3)
    with pytest.raises(LabelOutOfRange):
        encode_label(enc3, -1)


def test_decode_label(g7):
    enc2 = LabelEncoding(g7, 2)
    assert decode_label(enc2, 1) == 0
    assert decode_label(enc2, 2) == 1
    assert decode_label(enc2, 4) is None
    with pytest.raises(NotInSubgroup):
        decode_label(enc2, 3)


def test_label_encoding_bounds(g7):
    with pytest.raises(ValueError):
        LabelEncoding(g7, 4)
    with pytest.raises(ValueError):
        LabelEncoding(g7, 1)


def test_phi_examples(g7):
    assert phi(g7, (1, 1, 1)).tolist() == [1, 0, 0, 1, 0, 0, 1, 0, 0]
    assert phi(g7, (2, 4, 1)).tolist() == [0, 1, 0, 0, 0, 1, 1, 0, 0]
    with pytest.raises(NotInSubgroup):
        phi(g7, (3, 1, 1))


def test_phi_inv_examples(g7):
    assert phi_inv(g7, np.array([1, 0, 0, 1, 0, 0, 1, 0, 0])) == (1, 1, 1)
    v = np.array([0.1, 0.7, 0.2, 0.2, 0.2, 0.6, 0.8, 0.1, 0.1])
    assert phi_inv(g7, v) == (2, 4, 1)
    tie = np.array([1 / 3] * 3 + [0, 1, 0] + [0, 0, 1])
    assert phi_inv(g7, tie) == (1, 2, 4)
    with pytest.raises(BadLength):
        phi_inv(g7, np.zeros(8))


def test_roundtrip_exhaustive_q3(g7):
    for c in itertools.product(g7.elements(), repeat=3):
        v = phi(g7, c)
        assert v.sum() == 3 and all(v[b * 3:(b + 1) * 3].sum() == 1 for b in range(3))
        assert phi_inv(g7, v) == c


def test_roundtrip_random_q11():
    G = gen_params(11)
    rng = np.random.default_rng(1)
    for k in rng.integers(0, 11, size=(2000, 3)):
        c = tuple(G.index_element(int(i)) for i in k)
        assert phi_inv(G, phi(G, c)) == c


def test_phi_batch_matches_phi():
    G = gen_params(11)
    rng = np.random.default_rng(2)
    C = np.array([[G.index_element(int(i)) for i in row] for row in rng.integers(0, 11, (50, 3))])
    assert np.array_equal(phi_batch(G, C), np.array([phi(G, c) for c in C]))


@settings(max_examples=100)
@given(st.lists(st.floats(0, 1, allow_nan=False), min_size=15, max_size=15),
       st.floats(0.1, 10), st.floats(-5, 5))
def test_phi_inv_invariant_to_block_rescaling(vals, scale, shift):
    G = gen_params(5)
    v = np.array(vals)
    w = v.copy()
    w[5:10] = w[5:10] * scale + shift
    assert phi_inv(G, v) == phi_inv(G, w)


def test_block_argmax_batch():
    v = np.array([[0, 1, 0, 0, 0, 1, 1, 0, 0], [1, 0, 0, 1, 0, 0, 0, 1, 0]])
    assert block_argmax(3, v).tolist() == [[1, 2, 0], [0, 0, 1]]


def test_end_to_end_label_loop(rng):
    from encryip.pke import gen
    G = gen_params(7)
    pk, keys, _ = gen(G, 4, rng)
    E = LabelEncoding(G, 5)
    for y in range(5):
        c = phi_inv(G, phi(G, enc(pk, encode_label(E, y), rng)))
        assert all(decode_label(E, dec(G, sk, c)) == y for sk in keys)


def test_confused_text_roundtrip():
    v = np.array([0, 1, 0, 0.25, 0.75, 0])
    assert format_confused(v) == "0,1,0,0.25,0.75,0"
    assert np.array_equal(parse_confused(format_confused(v)), v)
