"""The multinomial Dyson matrix ``W(lam, nu) = multinomial(nu) * lam**nu`` and its inverse.

Rows scaled by ``n**-n`` are the one-step transition probabilities of the
multitype Wright-Fisher chain on types of mass n.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial, prod
from typing import Sequence

from .exactla import RatMatrix, SizeError, inverse, rank
from .typecomb import TypeIndex, TypeVector, count_types, monomial, multinomial

DEFAULT_SIZE_CAP = 3000


def size_cap() -> int:
    """Dyson dimension cap, overridable through ``EXMIX_SIZE_CAP``."""
    raw = os.environ.get("EXMIX_SIZE_CAP")
    if raw is None:
        return DEFAULT_SIZE_CAP
    cap = int(raw)
    if cap <= 0:
        raise ValueError(f"EXMIX_SIZE_CAP must be positive, got {raw!r}")
    return cap


def _check_size(n: int, d: int, cap: int | None) -> None:
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    cap = size_cap() if cap is None else cap
    dim = count_types(n, d)
    if dim > cap:
        raise SizeError(f"Dyson matrix for n={n}, d={d} has dimension {dim} > cap {cap}", dim, cap)


def build_w(n: int, d: int, cap: int | None = None) -> RatMatrix:
    _check_size(n, d, cap)
    types = TypeIndex(n, d).types
    return RatMatrix(
        [[multinomial(nu) * monomial(lam.counts, nu.counts) for nu in types] for lam in types]
    )


@dataclass(frozen=True)
class DysonPair:
    n: int
    d: int
    index: TypeIndex
    W: RatMatrix
    M: RatMatrix


@lru_cache(maxsize=64)
def _cached_pair(n: int, d: int) -> DysonPair:
    W = build_w(n, d, cap=10**9)
    M = inverse(W)
    if M @ W != RatMatrix.identity(W.nrows):
        raise ArithmeticError(f"M W != I for n={n}, d={d}")
    return DysonPair(n, d, TypeIndex(n, d), W, M)


def build_pair(n: int, d: int, cap: int | None = None) -> DysonPair:
    """Build ``W`` and its exact inverse ``M``; pairs are cached per (n, d)."""
    _check_size(n, d, cap)
    return _cached_pair(n, d)


def m_row(pair: DysonPair, nu: TypeVector) -> dict[TypeVector, Fraction]:
    """Row ``M(nu, .)`` keyed by type."""
    if nu.n != pair.n or nu.d != pair.d:
        raise ValueError(
            f"type {list(nu.counts)} does not belong to N_{pair.n}({pair.d})"
        )
    row = pair.M.rows[pair.index.index(nu)]
    return dict(zip(pair.index.types, row))


@dataclass(frozen=True)
class HompolReport:
    n: int
    d: int
    rank: int
    expected: int

    @property
    def passed(self) -> bool:
        return self.rank == self.expected

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "rank": self.rank, "expected": self.expected, "pass": self.passed}


def verify_hompol(n: int, d: int, cap: int | None = None) -> HompolReport:
    """Exact rank of ``W``; full rank means the powers ``(lam . x)**n`` form a
    basis of the degree-n homogeneous polynomials in d variables."""
    W = build_w(n, d, cap)
    return HompolReport(n, d, rank(W), count_types(n, d))


@dataclass(frozen=True)
class DifferenceReport:
    lhs: Fraction
    rhs: Fraction

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs


def finite_difference_identity(n: int, h: Sequence) -> DifferenceReport:
    """Check ``Delta_{h_1} ... Delta_{h_n} t**n == n! h_1 ... h_n`` at ``t = 0``.

    The left side uses the inclusion-exclusion expansion of the iterated
    difference; the term for subset I carries sign ``(-1)**(n - |I|)``.
    """
    h = [Fraction(v) for v in h]
    if n < 1 or len(h) != n:
        raise ValueError(f"need n >= 1 and exactly n steps, got n={n}, {len(h)} steps")
    lhs = Fraction(0)
    for r in range(n + 1):
        sign = -1 if (n - r) % 2 else 1
        for subset in combinations(h, r):
            lhs += sign * sum(subset, Fraction(0)) ** n
    return DifferenceReport(lhs, factorial(n) * prod(h, start=Fraction(1)))
