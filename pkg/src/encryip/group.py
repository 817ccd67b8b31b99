"""Prime-order subgroup of (Z/pZ)^* and its discrete-log index table.

The group used throughout is the order-``q`` subgroup of the integers mod
``p`` with ``p = k*q + 1``. Because ``q`` doubles as the width of a label
block, it is tiny, and a full discrete-log table is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from .errors import NotInSubgroup, ParameterSearchFailed

# bound on the k in p = k*q + 1 and on the generator base search
SEARCH_WINDOW = 100_000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for sp in small:
        if n % sp == 0:
            return n == sp
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


@dataclass(frozen=True)
class GroupParams:
    """Order-``q`` subgroup of ``Z_p^*`` generated by ``g1``."""

    q: int
    p: int
    g1: int
    index_table: Mapping[int, int] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if not (is_prime(self.q) and is_prime(self.p)):
            raise ValueError(f"q={self.q} and p={self.p} must both be prime")
        if (self.p - 1) % self.q:
            raise ValueError(f"q={self.q} does not divide p-1={self.p - 1}")
        if self.g1 % self.p == 1 or pow(self.g1, self.q, self.p) != 1:
            raise ValueError(f"g1={self.g1} does not generate the order-{self.q} subgroup")
        if self.index_table is None:
            table: Dict[int, int] = {}
            x = 1
            for k in range(self.q):
                table[x] = k
                x = x * self.g1 % self.p
            object.__setattr__(self, "index_table", table)

    # element arithmetic (mod p)

    def contains(self, u: int) -> bool:
        return 0 < u < self.p and pow(u, self.q, self.p) == 1

    def check(self, u: int) -> int:
        u = int(u)
        if not self.contains(u):
            raise NotInSubgroup(f"{u} is not in the order-{self.q} subgroup mod {self.p}")
        return u

    def mul(self, u: int, v: int) -> int:
        return u * v % self.p

    def inv(self, u: int) -> int:
        return pow(u, -1, self.p)

    def exp(self, u: int, e: int) -> int:
        return pow(u, e % self.q, self.p)

    def element_index(self, u: int) -> int:
        """Discrete log of ``u`` to base ``g1``."""
        try:
            return self.index_table[int(u)]
        except KeyError:
            raise NotInSubgroup(f"{u} is not in the order-{self.q} subgroup mod {self.p}") from None

    def index_element(self, k: int) -> int:
        """``g1**k mod p``; the inverse of :meth:`element_index`."""
        return pow(self.g1, int(k) % self.q, self.p)

    def elements(self) -> list[int]:
        return [self.index_element(k) for k in range(self.q)]

    # serialization: the table is rebuilt on load

    def to_record(self) -> dict:
        return {"q": self.q, "p": self.p, "g1": self.g1}

    @classmethod
    def from_record(cls, rec: Mapping) -> "GroupParams":
        return cls(q=int(rec["q"]), p=int(rec["p"]), g1=int(rec["g1"]))


def gen_params(min_classes: int, seed: int = 0) -> GroupParams:
    """Build the group for ``min_classes`` labels.

    ``q`` is the smallest prime ``>= min_classes``; ``p`` the smallest prime
    ``k*q + 1`` with ``k >= 2``; ``g1 = w**((p-1)/q)`` for the smallest
    ``w >= 2`` that gives a non-identity element. ``seed`` is accepted for
    interface uniformity; the search itself is deterministic.
    """
    if min_classes < 2:
        raise ValueError("min_classes must be >= 2")
    q = next_prime(min_classes)
    for k in range(2, SEARCH_WINDOW):
        if is_prime(k * q + 1):
            p = k * q + 1
            break
    else:
        raise ParameterSearchFailed(f"no prime p = k*{q}+1 with k < {SEARCH_WINDOW}")
    cofactor = (p - 1) // q
    for w in range(2, min(p, SEARCH_WINDOW)):
        g1 = pow(w, cofactor, p)
        if g1 != 1:
            return GroupParams(q=q, p=p, g1=g1)
    raise ParameterSearchFailed(f"no generator found for q={q}, p={p}")


def sample_exponent(q: int, rng: np.random.Generator, nonzero: bool = False) -> int:
    """Uniform draw from Z_q, or Z_q^* when ``nonzero``."""
    while True:
        e = int(rng.integers(0, q))
        if not (nonzero and e == 0):
            return e
