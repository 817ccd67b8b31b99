"""Labels <-> group elements, and ciphertexts <-> confused-label vectors.

A ciphertext ``(u1, u2, u3)`` becomes a ``3q`` vector made of three one-hot
blocks, one per component, hot at the component's discrete-log index. The
inverse takes a per-block argmax, so it also accepts probability vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BadLength, LabelOutOfRange
from .group import GroupParams
from .pke import Ciphertext


@dataclass(frozen=True)
class LabelEncoding:
    params: GroupParams
    z: int

    def __post_init__(self):
        if not 2 <= self.z <= self.params.q:
            raise ValueError(f"class count z={self.z} must lie in [2, q={self.params.q}]")


def encode_label(enc: LabelEncoding, y: int) -> int:
    if not 0 <= y < enc.z:
        raise LabelOutOfRange(f"label {y} outside 0..{enc.z - 1}")
    return enc.params.index_element(y)


def decode_label(enc: LabelEncoding, m: int) -> Optional[int]:
    """Label index of ``m``, or ``None`` when ``m`` encodes no valid label."""
    k = enc.params.element_index(m)
    return k if k < enc.z else None


def phi(params: GroupParams, c: Sequence[int]) -> np.ndarray:
    q = params.q
    v = np.zeros(3 * q)
    for block, u in enumerate(c):
        v[block * q + params.element_index(u)] = 1.0
    return v


def phi_batch(params: GroupParams, C: np.ndarray) -> np.ndarray:
    """Row-wise :func:`phi` for an ``(n, 3)`` array of ciphertexts."""
    C = np.asarray(C, dtype=np.int64).reshape(-1, 3)
    q = params.q
    idx = np.array([[params.element_index(u) for u in row] for row in C.tolist()], dtype=np.int64).reshape(-1, 3)
    out = np.zeros((C.shape[0], 3 * q))
    rows = np.arange(C.shape[0])
    for block in range(3):
        out[rows, block * q + idx[:, block]] = 1.0
    return out


def block_argmax(q: int, v: np.ndarray) -> np.ndarray:
    """Per-block argmax indices; ties go to the lowest index."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 3 * q:
        raise BadLength(f"expected length {3 * q}, got {v.shape[-1]}")
    return v.reshape(*v.shape[:-1], 3, q).argmax(axis=-1)


def phi_inv(params: GroupParams, v: np.ndarray) -> Ciphertext:
    idx = block_argmax(params.q, np.ravel(v))
    return Ciphertext(*(params.index_element(int(k)) for k in idx))


def format_confused(v: np.ndarray) -> str:
    return ",".join(repr(float(x)) if x not in (0.0, 1.0) else str(int(x)) for x in np.ravel(v))


def parse_confused(text: str) -> np.ndarray:
    return np.array([float(s) for s in text.split(",")])
