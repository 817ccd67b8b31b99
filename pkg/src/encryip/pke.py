"""Cramer-Shoup-lite encryption with many secret keys per public key.

A public key ``(g1, g2, h)`` admits up to ``q`` secret keys ``(a_j, b_j)``,
all satisfying ``g1**a_j * g2**b_j == h``. Every such key decrypts honest
ciphertexts identically, while a *fake* ciphertext (mismatched exponents on
``u1`` and ``u2``) decrypts to a different message under each key. That
asymmetry is what lets an arbitrator tell keys apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import KeySpaceExhausted, TooManyKeys
from .group import GroupParams, sample_exponent


class Ciphertext(NamedTuple):
    u1: int
    u2: int
    u3: int


@dataclass(frozen=True)
class PublicKey:
    params: GroupParams
    g2: int
    h: int

    @property
    def g1(self) -> int:
        return self.params.g1

    def to_record(self) -> dict:
        return {**self.params.to_record(), "g2": self.g2, "h": self.h}

    @classmethod
    def from_record(cls, rec) -> "PublicKey":
        params = GroupParams.from_record(rec)
        return cls(params, params.check(int(rec["g2"])), params.check(int(rec["h"])))


@dataclass(frozen=True)
class SecretKey:
    id: int
    a: int
    b: int

    def to_record(self) -> dict:
        return {"j": self.id, "a": self.a, "b": self.b}

    @classmethod
    def from_record(cls, rec) -> "SecretKey":
        return cls(int(rec["j"]), int(rec["a"]), int(rec["b"]))


@dataclass
class AuthorityState:
    """Trapdoor kept by the arbitrator so new keys can be issued later."""

    t: int
    a1: int
    b1: int
    issued_b: List[int] = field(default_factory=list)

    def to_record(self) -> dict:
        return {"t": self.t, "a1": self.a1, "b1": self.b1, "issued_b": list(self.issued_b)}

    @classmethod
    def from_record(cls, rec) -> "AuthorityState":
        return cls(int(rec["t"]), int(rec["a1"]), int(rec["b1"]), [int(b) for b in rec["issued_b"]])


def derive_key(params: GroupParams, auth: AuthorityState, j: int, b: int) -> SecretKey:
    a = (auth.a1 + (auth.b1 - b) * auth.t) % params.q
    return SecretKey(j, a, b % params.q)


def keys_from_trapdoor(
    params: GroupParams, t: int, a1: int, b1: int, bs: Iterable[int] = ()
) -> Tuple[PublicKey, List[SecretKey], AuthorityState]:
    """Deterministic key setup from explicit trapdoor values.

    ``bs`` are the ``b`` components of keys 2, 3, ...; they must be distinct
    from each other and from ``b1``.
    """
    q = params.q
    t, a1, b1 = t % q, a1 % q, b1 % q
    if t == 0:
        raise ValueError("t must be nonzero mod q")
    g2 = params.exp(params.g1, t)
    h = params.mul(params.exp(params.g1, a1), params.exp(g2, b1))
    auth = AuthorityState(t, a1, b1, [b1])
    keys = [SecretKey(1, a1, b1)]
    for b in bs:
        b %= q
        if b in auth.issued_b:
            raise ValueError(f"b={b} already issued")
        keys.append(derive_key(params, auth, len(keys) + 1, b))
        auth.issued_b.append(b)
    return PublicKey(params, g2, h), keys, auth


def gen(
    params: GroupParams, n_keys: int, rng: np.random.Generator
) -> Tuple[PublicKey, List[SecretKey], AuthorityState]:
    """Generate a public key with ``n_keys`` secret keys and the trapdoor."""
    q = params.q
    if n_keys < 1:
        raise ValueError("need at least one key")
    if n_keys > q:
        raise TooManyKeys(f"{n_keys} keys requested but only q={q} distinct b values exist")
    t = sample_exponent(q, rng, nonzero=True)
    a1 = sample_exponent(q, rng)
    b1 = sample_exponent(q, rng)
    # distinct b_j != b1 by drawing without replacement from the rest of Z_q
    rest = np.array([b for b in range(q) if b != b1])
    bs = rng.permutation(rest)[: n_keys - 1].tolist()
    return keys_from_trapdoor(params, t, a1, b1, bs)


def enc(pk: PublicKey, m: int, rng: Optional[np.random.Generator] = None, *, r: Optional[int] = None) -> Ciphertext:
    G = pk.params
    m = G.check(m)
    if r is None:
        r = sample_exponent(G.q, rng)
    return Ciphertext(G.exp(pk.g1, r), G.exp(pk.g2, r), G.mul(G.exp(pk.h, r), m))


def _check_ct(G: GroupParams, c: Iterable[int]) -> Ciphertext:
    return Ciphertext(*(G.check(u) for u in c))


def dec(params: GroupParams, sk: SecretKey, c: Ciphertext) -> int:
    """``u3 / (u1**a * u2**b)``."""
    u1, u2, u3 = _check_ct(params, c)
    mask = params.mul(params.exp(u1, sk.a), params.exp(u2, sk.b))
    return params.mul(u3, params.inv(mask))


def fake(
    pk: PublicKey,
    rng: Optional[np.random.Generator] = None,
    *,
    r1: Optional[int] = None,
    r2: Optional[int] = None,
    u3: Optional[int] = None,
) -> Ciphertext:
    """Ill-formed ciphertext: ``u1 = g1**r1``, ``u2 = g2**r2`` with ``r1 != r2``.

    ``u3`` is uniform over the subgroup so that every decryption stays a
    group element.
    """
    G = pk.params
    if G.q < 2:
        raise ValueError("fake ciphertexts need q >= 2")
    if r1 is None:
        r1 = sample_exponent(G.q, rng)
    if r2 is None:
        r2 = (r1 + sample_exponent(G.q, rng, nonzero=True)) % G.q
    if (r1 - r2) % G.q == 0:
        raise ValueError("r1 and r2 must differ mod q")
    if u3 is None:
        u3 = G.index_element(sample_exponent(G.q, rng))
    return Ciphertext(G.exp(pk.g1, r1), G.exp(pk.g2, r2), G.check(u3))


def samp_dist(pk: PublicKey, c: Ciphertext, rng: Optional[np.random.Generator] = None, *, r: Optional[int] = None) -> Ciphertext:
    """Rerandomize ``c`` within the set of ciphertexts with the same per-key decryptions."""
    G = pk.params
    u1, u2, u3 = _check_ct(G, c)
    if r is None:
        r = sample_exponent(G.q, rng)
    return Ciphertext(
        G.mul(G.exp(pk.g1, r), u1),
        G.mul(G.exp(pk.g2, r), u2),
        G.mul(G.exp(pk.h, r), u3),
    )


def add_user(
    params: GroupParams, auth: AuthorityState, rng: Optional[np.random.Generator] = None, *, b: Optional[int] = None
) -> SecretKey:
    """Issue one more key for the same public key; mutates ``auth``.

    Existing keys and any model trained against ``pk`` stay valid.
    """
    q = params.q
    free = sorted(set(range(q)) - set(auth.issued_b))
    if not free:
        raise KeySpaceExhausted(f"all {q} values of b are already issued")
    if b is None:
        b = free[int(rng.integers(0, len(free)))]
    elif b % q not in free:
        raise ValueError(f"b={b} already issued")
    key = derive_key(params, auth, len(auth.issued_b) + 1, b)
    auth.issued_b.append(key.b)
    return key


def is_well_formed(pk: PublicKey, c: Ciphertext, auth: AuthorityState) -> bool:
    """Whether ``dlog_g1(u1) == dlog_g2(u2)``; needs the trapdoor ``t``."""
    G = pk.params
    return G.exp(c.u1, auth.t) == c.u2


def key_matches(pk: PublicKey, sk: SecretKey) -> bool:
    G = pk.params
    return G.mul(G.exp(pk.g1, sk.a), G.exp(pk.g2, sk.b)) == pk.h


def random_invalid_key(pk: PublicKey, rng: np.random.Generator, j: int = 0) -> SecretKey:
    """A key ``(a, b)`` that does *not* satisfy the public-key relation."""
    q = pk.params.q
    while True:
        sk = SecretKey(j, sample_exponent(q, rng), sample_exponent(q, rng))
        if not key_matches(pk, sk):
            return sk
