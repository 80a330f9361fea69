"""Integrating signed mixing measures against product laws.

``reconstruct`` is the map xi -> law of X in ``P(X in A) = int pi^n(A) xi(dpi)``;
everything here is exact except :func:`laplace`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, lcm, log2
from typing import Sequence

import mpmath

from . import poly
from .measures import (
    CylinderEvent,
    ExchangeableLaw,
    FunctionTable,
    SchemaError,
    SignedMixingMeasure,
)
from .typecomb import Alphabet, TypeVector, enumerate_types, monomial, multinomial


def cell_probability(pi: Sequence, nu: TypeVector) -> Fraction:
    """``pi^n`` of the cell of tuples with type ``nu``."""
    return multinomial(nu) * monomial(pi, nu.counts)


def _density_cell(xi: SignedMixingMeasure, nu: TypeVector) -> Fraction:
    term = poly.bernstein_term(nu[0], nu[1])
    total = sum((poly.integrate(poly.mul(term, pc.poly), pc.lo, pc.hi) for pc in xi.density), Fraction(0))
    return multinomial(nu) * total


def reconstruct(xi: SignedMixingMeasure, n: int, alphabet: Alphabet | None = None) -> dict[TypeVector, Fraction]:
    """Type weights of the exchangeable law ``int pi^n xi(dpi)``."""
    alphabet = alphabet or xi.alphabet
    if alphabet.size != xi.d:
        raise ValueError(f"measure lives on {xi.d} symbols, alphabet has {alphabet.size}")
    if xi.density and xi.d != 2:
        raise ValueError("density reconstruction is only supported for two-letter alphabets")
    out = {}
    for nu in enumerate_types(n, alphabet):
        total = sum((w * cell_probability(p, nu) for p, w in xi.atoms.items()), Fraction(0))
        if xi.density:
            total += _density_cell(xi, nu)
        out[nu] = total
    return out


@dataclass(frozen=True)
class ValidationResult:
    passed: bool
    type: TypeVector | None = None
    reconstructed: Fraction | None = None
    expected: Fraction | None = None

    def to_json(self) -> dict:
        from .exactla import rat_to_str

        out: dict = {"pass": self.passed}
        if not self.passed:
            out["first_difference"] = {
                "type": self.type.to_json(),
                "reconstructed": rat_to_str(self.reconstructed),
                "law": rat_to_str(self.expected),
            }
        return out


def validate_mixing(xi: SignedMixingMeasure, law: ExchangeableLaw) -> ValidationResult:
    """Does ``xi`` represent ``law`` exactly? Reports the first differing type."""
    if xi.d != law.d:
        raise ValueError(f"measure has {xi.d} coordinates, law has {law.d} symbols")
    rec = reconstruct(xi, law.n, law.alphabet)
    for nu, value in rec.items():
        if value != law.weight(nu):
            return ValidationResult(False, nu, value, law.weight(nu))
    return ValidationResult(True)


def _set_mass_poly(members: Sequence[int]) -> poly.Poly:
    # pi(B) as a polynomial in p = pi(first symbol), two-letter alphabets only.
    a, b = int(0 in members), int(1 in members)
    return poly.normalize((b, a - b))


def moment(xi: SignedMixingMeasure, event: CylinderEvent) -> Fraction:
    """``C_k(B_1..B_k) = int pi(B_1) ... pi(B_k) xi(dpi)``."""
    sets = event.indices(xi.alphabet)
    total = Fraction(0)
    for p, w in xi.atoms.items():
        # integer coordinates over a common denominator keep this loop in ints
        den = lcm(*(c.denominator for c in p))
        ints = [c.numerator * (den // c.denominator) for c in p]
        num = 1
        for members in sets:
            num *= sum(ints[a] for a in members)
            if not num:
                break
        if num:
            total += w * Fraction(num, den ** len(sets))
    if xi.density:
        integrand: poly.Poly = (Fraction(1),)
        for members in sets:
            integrand = poly.mul(integrand, _set_mass_poly(members))
        for pc in xi.density:
            total += poly.integrate(poly.mul(integrand, pc.poly), pc.lo, pc.hi)
    return total


def cylinder_probability(law: ExchangeableLaw, event: CylinderEvent) -> Fraction:
    """``P(X_1 in B_1, ..., X_k in B_k)`` by summing tuple probabilities."""
    if event.k > law.n:
        raise ValueError(f"event has {event.k} coordinates, law has {law.n}")
    sets = event.indices(law.alphabet)
    total = Fraction(0)
    for head in product(*sets):
        for tail in product(range(law.d), repeat=law.n - event.k):
            total += law.singleton_probability(head + tail)
    return total


@dataclass(frozen=True)
class LaplaceResult:
    value: float
    error_bound: float
    tolerance: float

    @property
    def within_tolerance(self) -> bool:
        return self.error_bound <= self.tolerance


def _mpf(v) -> mpmath.mpf:
    return mpmath.mpf(v) if not isinstance(v, str) else mpmath.mpf(v.strip())


def laplace(xi: SignedMixingMeasure, f: FunctionTable) -> LaplaceResult:
    """``int exp(-int f dpi) xi(dpi)`` evaluated in floating point.

    Atom terms are summed in extended precision sized from the tolerance and
    the total variation of the atoms; ``error_bound`` covers that rounding,
    the final conversion to float, and the quadrature estimate of any
    density part.
    """
    missing = [s for s in xi.alphabet.symbols if s not in f.values]
    if missing:
        raise SchemaError(f"f is undefined on {missing}", "values")
    tv_atoms = sum((abs(w) for w in xi.atoms.values()), Fraction(0))
    prec = max(80, ceil(-log2(f.tolerance)) + ceil(log2(float(tv_atoms) + 2)) + 32)
    with mpmath.workprec(prec):
        fvals = [_mpf(f.values[s]) for s in xi.alphabet.symbols]
        acc = mpmath.mpf(0)
        for p, w in xi.atoms.items():
            expo = mpmath.fsum(fv * mpmath.mpf(c.numerator) / c.denominator for fv, c in zip(fvals, p) if c)
            acc += mpmath.mpf(w.numerator) / w.denominator * mpmath.exp(-expo)
        err = mpmath.mpf(tv_atoms.numerator) / tv_atoms.denominator * (len(xi.atoms) + 4) * mpmath.mpf(2) ** (-prec)
        for pc in xi.density:
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in pc.poly]

            def integrand(p, coeffs=coeffs):
                return mpmath.polyval(coeffs[::-1], p) * mpmath.exp(-(fvals[0] * p + fvals[1] * (1 - p)))

            val, qerr = mpmath.quad(
                integrand,
                [mpmath.mpf(pc.lo.numerator) / pc.lo.denominator, mpmath.mpf(pc.hi.numerator) / pc.hi.denominator],
                error=True,
            )
            acc += val
            err += abs(qerr)
        value = float(acc)
        err += abs(acc - mpmath.mpf(value))
    return LaplaceResult(value, float(err), f.tolerance)
