"""Univariate polynomials with Fraction coefficients, lowest degree first."""

from __future__ import annotations

from fractions import Fraction
from math import comb, lcm
from typing import Sequence

Poly = tuple[Fraction, ...]


def normalize(p: Sequence) -> Poly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def add(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return normalize([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p: Sequence, c) -> Poly:
    return normalize([c * a for a in p])


def mul(p: Sequence, q: Sequence) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return normalize(out)


def evaluate(p: Sequence, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def antiderivative(p: Sequence) -> Poly:
    return normalize([0] + [Fraction(c) / (k + 1) for k, c in enumerate(p)])


def integrate(p: Sequence, u, v) -> Fraction:
    """Exact integral of ``p`` over ``[u, v]``."""
    P = antiderivative(p)
    return evaluate(P, Fraction(v)) - evaluate(P, Fraction(u))


def bernstein_term(a: int, b: int) -> Poly:
    """Expanded coefficients of ``x**a * (1 - x)**b``."""
    return normalize([0] * a + [(-1) ** k * comb(b, k) for k in range(b + 1)])


def derivative(p: Sequence) -> Poly:
    return normalize([k * c for k, c in enumerate(p)][1:])


def _divmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    p = list(p)
    out = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while len(p) >= len(q) and p:
        f = p[-1] / q[-1]
        shift = len(p) - len(q)
        out[shift] = f
        for i, c in enumerate(q):
            p[i + shift] -= f * c
        p = list(normalize(p))
    return normalize(out), normalize(p)


def sturm_count(p: Sequence, u, v) -> int:
    """Number of distinct real roots of ``p`` in ``(u, v]``."""
    p = normalize(p)
    if len(p) <= 1:
        return 0
    seq = [p, derivative(p)]
    while len(seq[-1]) > 1:
        _, r = _divmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append(scale(r, -1))

    def changes(x):
        signs = [s for s in (evaluate(q, x) for q in seq) if s != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))

    return changes(Fraction(u)) - changes(Fraction(v))


def _divisors(m: int) -> list[int]:
    m = abs(m)
    small = [k for k in range(1, int(m**0.5) + 1) if m % k == 0]
    return sorted(set(small + [m // k for k in small]))


def rational_roots(p: Sequence) -> list[Fraction]:
    """All distinct rational roots, by the rational root theorem."""
    p = normalize(p)
    roots = set()
    while p and p[0] == 0:
        roots.add(Fraction(0))
        p = p[1:]
    if len(p) <= 1:
        return sorted(roots)
    m = lcm(*(c.denominator for c in p))
    ints = [int(c * m) for c in p]
    for num in _divisors(ints[0]):
        for den in _divisors(ints[-1]):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if evaluate(p, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def abs_integral(p: Sequence, u, v, tol=Fraction(1, 2**40)) -> tuple[Fraction, Fraction]:
    """Exact enclosure ``(lo, hi)`` of the integral of ``|p|`` over ``[u, v]``.

    The interval is split at rational roots; on each piece without a sign
    change the integral is exact. Pieces hiding irrational roots are bisected
    down to width ``tol`` and bounded, so ``lo == hi`` unless such roots exist.
    """
    p = normalize(p)
    u, v = Fraction(u), Fraction(v)
    if not p or u >= v:
        return Fraction(0), Fraction(0)
    rational = rational_roots(p)
    cuts = [u] + [r for r in rational if u < r < v] + [v]
    # Irrational part: no root at any rational point, so Sturm counts are clean.
    rest = p
    for r in rational:
        while True:
            q, rem = _divmod(rest, (-r, Fraction(1)))
            if rem:
                break
            rest = q
    lo = hi = Fraction(0)
    stack = [(a, b) for a, b in zip(cuts, cuts[1:])]
    while stack:
        a, b = stack.pop()
        if sturm_count(rest, a, b) == 0:
            val = abs(integrate(p, a, b))
            lo += val
            hi += val
        elif b - a <= tol:
            bound = max(abs(x) for x in (a, b))
            sup = sum((abs(c) * bound**k for k, c in enumerate(p)), Fraction(0))
            lo += abs(integrate(p, a, b))
            hi += (b - a) * sup
        else:
            mid = (a + b) / 2
            stack += [(a, mid), (mid, b)]
    return lo, hi
