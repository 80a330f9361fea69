"""Per-point and canonical signed mixing measures on finite alphabets.

For a tuple of type ``eps`` the per-point measure puts weight
``n**n * M(eps, lam)`` on the type-rational point ``lam / n``, for every type
``lam`` of mass n. Averaging it over the law of X gives the canonical
mixing measure, which always represents the law exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import poly
from .dyson import DysonPair, build_pair, m_row, size_cap
from .measureops import validate_mixing
from .measures import ConeParametrization, ExchangeableLaw, SignedMixingMeasure
from .typecomb import Alphabet, TypeVector, count_types


def psi_of_type(pair: DysonPair, eps: TypeVector, alphabet: Alphabet | None = None) -> SignedMixingMeasure:
    alphabet = alphabet or Alphabet.of_size(pair.d)
    if alphabet.size != pair.d:
        raise ValueError(f"alphabet has {alphabet.size} symbols, Dyson pair has d={pair.d}")
    n = pair.n
    scale = n**n
    atoms = {
        tuple(Fraction(c, n) for c in lam.counts): scale * coeff
        for lam, coeff in m_row(pair, eps).items()
    }
    return SignedMixingMeasure(alphabet, atoms)


def canonical_xi(law: ExchangeableLaw) -> SignedMixingMeasure:
    """``E psi_X``: the type-weighted average of the per-point measures."""
    pair = build_pair(law.n, law.d)
    atoms: dict[tuple[Fraction, ...], Fraction] = {}
    for eps, w in law.weights.items():
        for p, v in psi_of_type(pair, eps, law.alphabet).atoms.items():
            atoms[p] = atoms.get(p, Fraction(0)) + w * v
    return SignedMixingMeasure(law.alphabet, atoms)


def tv_bounds(xi: SignedMixingMeasure) -> tuple[Fraction, Fraction]:
    """Exact enclosure of the total variation norm."""
    lo = hi = sum((abs(w) for w in xi.atoms.values()), Fraction(0))
    for pc in xi.density:
        a, b = poly.abs_integral(pc.poly, pc.lo, pc.hi)
        lo, hi = lo + a, hi + b
    return lo, hi


def tv_norm(xi: SignedMixingMeasure) -> Fraction | tuple[Fraction, Fraction]:
    """Total variation norm; an exact enclosing interval only when a density
    changes sign at irrational points."""
    lo, hi = tv_bounds(xi)
    return lo if lo == hi else (lo, hi)


@dataclass(frozen=True)
class SweepResult:
    family: str
    rows: tuple[tuple[int, Fraction], ...]
    truncated_at: int | None  # first n that exceeded the size cap

    def to_json(self) -> dict:
        from .exactla import rat_to_str

        return {
            "family": self.family,
            "rows": [{"n": n, "tv": rat_to_str(tv)} for n, tv in self.rows],
            "truncated_at": self.truncated_at,
        }


FAMILIES = ("uniform_permutation",)


def tv_sweep(family: str, n_max: int, cap: int | None = None) -> SweepResult:
    """TV norm of the canonical measure for n = 1..n_max.

    Each measure is checked to reconstruct its law exactly before its norm
    is reported.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    cap = size_cap() if cap is None else cap
    rows = []
    for n in range(1, n_max + 1):
        if count_types(n, n) > cap:
            return SweepResult(family, tuple(rows), n)
        law = ExchangeableLaw.uniform_permutation(n)
        xi = canonical_xi(law)
        check = validate_mixing(xi, law)
        if not check.passed:
            raise ArithmeticError(f"canonical measure failed reconstruction at n={n}, type {check.type}")
        rows.append((n, tv_norm(xi)))
    return SweepResult(family, tuple(rows), None)


def t_independence_check(law: ExchangeableLaw, eps: TypeVector) -> bool:
    """Per-point measure built on the support of ``eps`` alone equals the one
    built on the full alphabet, once embedded in the full simplex."""
    if eps.n != law.n or eps.d != law.d:
        raise ValueError(f"type {list(eps.counts)} does not match the law (n={law.n}, d={law.d})")
    full = psi_of_type(build_pair(law.n, law.d), eps, law.alphabet)
    support = eps.support()
    sub_eps = TypeVector(tuple(eps[i] for i in support))
    sub = psi_of_type(build_pair(law.n, len(support)), sub_eps)
    embedded: dict[tuple[Fraction, ...], Fraction] = {}
    for p, w in sub.atoms.items():
        coords = [Fraction(0)] * law.d
        for i, v in zip(support, p):
            coords[i] = v
        embedded[tuple(coords)] = w
    return embedded == dict(full.atoms)


def cone_parametrize(xi: SignedMixingMeasure, values: Mapping[str, Fraction], n: int) -> ConeParametrization:
    """Map each atom ``lam / n`` over a real alphabet to the sorted n-vector
    listing ``values[a]`` with multiplicity ``lam[a]``."""
    if not xi.is_atomic:
        raise ValueError("only atomic measures have a cone parametrization")
    vals = [Fraction(values[s]) for s in xi.alphabet.symbols]
    if len(set(vals)) != len(vals):
        raise ValueError("symbol values must be pairwise distinct")
    points: dict[tuple[Fraction, ...], Fraction] = {}
    for p, w in xi.atoms.items():
        counts = [c * n for c in p]
        if any(c.denominator != 1 for c in counts):
            raise ValueError(f"atom {[str(c) for c in p]} is not of the form type/{n}")
        theta = tuple(sorted(v for v, c in zip(vals, counts) for _ in range(int(c))))
        points[theta] = points.get(theta, Fraction(0)) + w
    return ConeParametrization({t: w for t, w in points.items() if w})
