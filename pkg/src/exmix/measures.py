"""Domain values: exchangeable laws, signed mixing measures and their JSON forms.

Laws are stored at type granularity: ``weights[nu]`` is the probability of
the whole cell of tuples with type ``nu``; each ordered tuple in that cell
has probability ``weights[nu] / multinomial(nu)``.

Density parts only exist for two-letter alphabets. The simplex is then the
interval ``[0, 1]`` through ``p = pi(first symbol)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

from . import poly
from .exactla import parse_rat, rat_to_str
from .typecomb import (
    Alphabet,
    TypeVector,
    enumerate_types,
    multinomial,
    type_of_indices,
)


class SchemaError(ValueError):
    """Input that violates a domain invariant or JSON schema.

    ``field`` is a dotted path into the offending document.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


def _rat(value, where: str) -> Fraction:
    try:
        return parse_rat(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(str(exc), where) from None


def _require(data: Mapping, key: str, where: str):
    if not isinstance(data, Mapping):
        raise SchemaError("expected a JSON object", where or None)
    if key not in data:
        raise SchemaError("missing required field", f"{where}.{key}" if where else key)
    return data[key]


# -- exchangeable laws --------------------------------------------------------


@dataclass(frozen=True)
class ExchangeableLaw:
    n: int
    alphabet: Alphabet
    weights: Mapping[TypeVector, Fraction]

    def __post_init__(self):
        if self.n < 1:
            raise SchemaError(f"law needs n >= 1, got {self.n}", "n")
        weights = {}
        for nu, w in self.weights.items():
            w = Fraction(w)
            if nu.d != self.alphabet.size or nu.n != self.n:
                raise SchemaError(
                    f"type {list(nu.counts)} is not a type of mass {self.n} over {self.alphabet.size} symbols",
                    "weights",
                )
            if w < 0:
                raise SchemaError(f"negative weight {rat_to_str(w)} on type {list(nu.counts)}", "weights")
            weights[nu] = weights.get(nu, Fraction(0)) + w
        total = sum(weights.values(), Fraction(0))
        if total != 1:
            raise SchemaError(f"weights sum to {rat_to_str(total)}, expected 1", "weights")
        object.__setattr__(self, "weights", {nu: w for nu, w in sorted(weights.items()) if w})

    @property
    def d(self) -> int:
        return self.alphabet.size

    def weight(self, nu: TypeVector) -> Fraction:
        return self.weights.get(nu, Fraction(0))

    def type_weights(self) -> dict[TypeVector, Fraction]:
        """Weights on every type of mass n, zeros included."""
        return {nu: self.weight(nu) for nu in enumerate_types(self.n, self.d)}

    def singleton_probability(self, x: Sequence[int]) -> Fraction:
        nu = type_of_indices(x, self.d)
        return self.weight(nu) / multinomial(nu)

    def tuple_probabilities(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """Every ordered tuple (as symbol indices) with its probability."""
        for x in product(range(self.d), repeat=self.n):
            yield x, self.singleton_probability(x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExchangeableLaw):
            return NotImplemented
        return (self.n, self.alphabet, dict(self.weights)) == (other.n, other.alphabet, dict(other.weights))

    def __hash__(self) -> int:
        return hash((self.n, self.alphabet, tuple(self.weights.items())))

    @classmethod
    def uniform_permutation(cls, n: int, alphabet: Alphabet | None = None) -> "ExchangeableLaw":
        """Uniform law on the orderings of n distinct symbols."""
        alphabet = alphabet or Alphabet.of_size(n)
        if alphabet.size != n:
            raise ValueError("uniform permutation law needs exactly n symbols")
        return cls(n, alphabet, {TypeVector((1,) * n): Fraction(1)})

    @classmethod
    def iid(cls, pi: Sequence, n: int, alphabet: Alphabet | None = None) -> "ExchangeableLaw":
        from .measureops import cell_probability

        pi = tuple(Fraction(v) for v in pi)
        alphabet = alphabet or Alphabet.of_size(len(pi))
        return cls(n, alphabet, {nu: cell_probability(pi, nu) for nu in enumerate_types(n, len(pi))})

    @classmethod
    def point_mass(cls, nu: TypeVector, alphabet: Alphabet | None = None) -> "ExchangeableLaw":
        alphabet = alphabet or Alphabet.of_size(nu.d)
        return cls(nu.n, alphabet, {nu: Fraction(1)})

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alphabet": self.alphabet.to_json(),
            "weights": [{"type": nu.to_json(), "w": rat_to_str(w)} for nu, w in self.weights.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ExchangeableLaw":
        n = _require(data, "n", "")
        if not isinstance(n, int) or isinstance(n, bool):
            raise SchemaError("expected an integer", "n")
        alpha = _require(data, "alphabet", "")
        try:
            alphabet = Alphabet.from_json(alpha)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(str(exc), "alphabet.symbols") from None
        entries = _require(data, "weights", "")
        if not isinstance(entries, list):
            raise SchemaError("expected a list", "weights")
        weights: dict[TypeVector, Fraction] = {}
        running = Fraction(0)
        for i, entry in enumerate(entries):
            where = f"weights[{i}]"
            tdata = _require(entry, "type", where)
            try:
                nu = TypeVector.from_json(tdata)
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(str(exc), f"{where}.type") from None
            if nu.d != alphabet.size or nu.n != n:
                raise SchemaError(
                    f"type {list(nu.counts)} is not a type of mass {n} over {alphabet.size} symbols",
                    f"{where}.type",
                )
            w = _rat(_require(entry, "w", where), f"{where}.w")
            if w < 0:
                raise SchemaError(f"negative weight {rat_to_str(w)}", f"{where}.w")
            weights[nu] = weights.get(nu, Fraction(0)) + w
            running += w
        if running != 1:
            raise SchemaError(f"weights sum to {rat_to_str(running)}, expected 1", "weights")
        return cls(n, alphabet, weights)


# -- signed mixing measures ---------------------------------------------------


@dataclass(frozen=True)
class DensityPiece:
    """Polynomial density ``poly`` (lowest degree first) on ``[lo, hi]``."""

    lo: Fraction
    hi: Fraction
    poly: poly.Poly

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        object.__setattr__(self, "poly", poly.normalize(self.poly))
        if not 0 <= self.lo < self.hi <= 1:
            raise SchemaError(
                f"density interval [{rat_to_str(self.lo)}, {rat_to_str(self.hi)}] must satisfy 0 <= from < to <= 1",
                "density",
            )

    def to_json(self) -> dict:
        return {
            "from": rat_to_str(self.lo),
            "to": rat_to_str(self.hi),
            "poly": [rat_to_str(c) for c in self.poly] or ["0"],
        }


Atom = tuple[Fraction, ...]


@dataclass(frozen=True)
class SignedMixingMeasure:
    """Finitely many weighted atoms on the simplex plus an optional density.

    Zero-weight atoms are dropped; repeated atoms are merged.
    """

    alphabet: Alphabet
    atoms: Mapping[Atom, Fraction]
    density: tuple[DensityPiece, ...] = field(default=())

    def __post_init__(self):
        d = self.alphabet.size
        merged: dict[Atom, Fraction] = {}
        for p, w in self.atoms.items():
            p = tuple(Fraction(v) for v in p)
            if len(p) != d:
                raise SchemaError(f"atom {[rat_to_str(v) for v in p]} has {len(p)} coordinates, alphabet has {d}", "atoms")
            if any(v < 0 for v in p):
                raise SchemaError(f"atom {[rat_to_str(v) for v in p]} has a negative coordinate", "atoms")
            s = sum(p, Fraction(0))
            if s != 1:
                raise SchemaError(f"atom {[rat_to_str(v) for v in p]} sums to {rat_to_str(s)}, expected 1", "atoms")
            merged[p] = merged.get(p, Fraction(0)) + Fraction(w)
        object.__setattr__(self, "atoms", {p: w for p, w in sorted(merged.items()) if w})
        density = tuple(sorted(self.density, key=lambda piece: piece.lo))
        if density and d != 2:
            raise SchemaError(f"density parts need a two-letter alphabet, got {d} symbols", "density")
        for a, b in zip(density, density[1:]):
            if b.lo < a.hi:
                raise SchemaError(
                    f"density pieces overlap at [{rat_to_str(b.lo)}, {rat_to_str(a.hi)}]", "density"
                )
        object.__setattr__(self, "density", density)

    @property
    def d(self) -> int:
        return self.alphabet.size

    @property
    def is_atomic(self) -> bool:
        return not self.density

    def total_mass(self) -> Fraction:
        mass = sum(self.atoms.values(), Fraction(0))
        return mass + sum((poly.integrate(pc.poly, pc.lo, pc.hi) for pc in self.density), Fraction(0))

    def scaled(self, c) -> "SignedMixingMeasure":
        c = Fraction(c)
        return SignedMixingMeasure(
            self.alphabet,
            {p: c * w for p, w in self.atoms.items()},
            tuple(DensityPiece(pc.lo, pc.hi, poly.scale(pc.poly, c)) for pc in self.density),
        )

    def __add__(self, other: "SignedMixingMeasure") -> "SignedMixingMeasure":
        if self.alphabet != other.alphabet:
            raise ValueError("cannot add measures over different alphabets")
        atoms = dict(self.atoms)
        for p, w in other.atoms.items():
            atoms[p] = atoms.get(p, Fraction(0)) + w
        return SignedMixingMeasure(self.alphabet, atoms, _add_densities(self.density, other.density))

    def to_json(self) -> dict:
        out = {
            "symbols": list(self.alphabet.symbols),
            "atoms": [{"p": [rat_to_str(v) for v in p], "w": rat_to_str(w)} for p, w in self.atoms.items()],
        }
        if self.density:
            out["density"] = [pc.to_json() for pc in self.density]
        return out

    @classmethod
    def from_json(cls, data: Mapping, alphabet: Alphabet | None = None) -> "SignedMixingMeasure":
        """Parse a measure document. Without ``symbols`` the alphabet comes
        from ``alphabet`` or defaults to ``"1".."d"``."""
        atoms_json = data.get("atoms", []) if isinstance(data, Mapping) else None
        if not isinstance(atoms_json, list):
            raise SchemaError("expected a list", "atoms")
        atoms: dict[Atom, Fraction] = {}
        d = None
        for i, entry in enumerate(atoms_json):
            where = f"atoms[{i}]"
            pj = _require(entry, "p", where)
            if not isinstance(pj, list):
                raise SchemaError("expected a list of rationals", f"{where}.p")
            p = tuple(_rat(v, f"{where}.p[{k}]") for k, v in enumerate(pj))
            if d is not None and len(p) != d:
                raise SchemaError(f"atom has {len(p)} coordinates, previous atoms have {d}", f"{where}.p")
            d = len(p)
            s = sum(p, Fraction(0))
            if any(v < 0 for v in p) or s != 1:
                raise SchemaError(
                    f"atom is not a probability vector (sum {rat_to_str(s)}, min {rat_to_str(min(p, default=0))})",
                    f"{where}.p",
                )
            w = _rat(_require(entry, "w", where), f"{where}.w")
            atoms[p] = atoms.get(p, Fraction(0)) + w
        pieces = []
        for i, entry in enumerate(data.get("density", []) or []):
            where = f"density[{i}]"
            coeffs = _require(entry, "poly", where)
            if not isinstance(coeffs, list):
                raise SchemaError("expected a list of rationals", f"{where}.poly")
            try:
                pieces.append(
                    DensityPiece(
                        _rat(_require(entry, "from", where), f"{where}.from"),
                        _rat(_require(entry, "to", where), f"{where}.to"),
                        tuple(_rat(c, f"{where}.poly[{k}]") for k, c in enumerate(coeffs)),
                    )
                )
            except SchemaError as exc:
                if exc.field == "density":
                    raise SchemaError(str(exc).split(": ", 1)[1], where) from None
                raise
        if "symbols" in data:
            try:
                alphabet = Alphabet(tuple(data["symbols"]))
            except (TypeError, ValueError) as exc:
                raise SchemaError(str(exc), "symbols") from None
        elif alphabet is None:
            alphabet = Alphabet.of_size(d if d is not None else 2)
        if d is not None and d != alphabet.size:
            raise SchemaError(f"atoms have {d} coordinates but alphabet has {alphabet.size} symbols", "atoms")
        return cls(alphabet, atoms, tuple(pieces))


def _add_densities(a: Iterable[DensityPiece], b: Iterable[DensityPiece]) -> tuple[DensityPiece, ...]:
    a, b = list(a), list(b)
    if not a or not b:
        return tuple(a + b)
    cuts = sorted({x for pc in a + b for x in (pc.lo, pc.hi)})
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        total: poly.Poly = ()
        for pc in a + b:
            if pc.lo <= mid <= pc.hi:
                total = poly.add(total, pc.poly)
        if total:
            out.append(DensityPiece(lo, hi, total))
    return tuple(out)


# -- cone parametrization -----------------------------------------------------


@dataclass(frozen=True)
class ConeParametrization:
    """Weighted points ``theta_1 <= ... <= theta_n`` of the sorted cone in R^n."""

    points: Mapping[tuple[Fraction, ...], Fraction]

    def __post_init__(self):
        for theta in self.points:
            if list(theta) != sorted(theta):
                raise ValueError(f"cone point {theta} is not sorted")
        object.__setattr__(self, "points", dict(sorted(self.points.items())))

    def total_mass(self) -> Fraction:
        return sum(self.points.values(), Fraction(0))

    def tv_norm(self) -> Fraction:
        return sum((abs(w) for w in self.points.values()), Fraction(0))

    def to_json(self) -> dict:
        return {
            "points": [
                {"theta": [rat_to_str(v) for v in theta], "w": rat_to_str(w)} for theta, w in self.points.items()
            ]
        }


# -- events and test functions ------------------------------------------------


@dataclass(frozen=True)
class CylinderEvent:
    """``B_1 x ... x B_k`` on the first k coordinates."""

    sets: tuple[frozenset[str], ...]

    def __post_init__(self):
        sets = tuple(frozenset(map(str, s)) for s in self.sets)
        if not sets:
            raise SchemaError("a cylinder event needs at least one set", "sets")
        if any(not s for s in sets):
            raise SchemaError("cylinder sets must be nonempty", "sets")
        object.__setattr__(self, "sets", sets)

    @property
    def k(self) -> int:
        return len(self.sets)

    def indices(self, alphabet: Alphabet) -> list[list[int]]:
        out = []
        for i, s in enumerate(self.sets):
            unknown = sorted(s - set(alphabet.symbols))
            if unknown:
                raise SchemaError(f"unknown symbols {unknown}", f"sets[{i}]")
            out.append([alphabet.index_of(a) for a in sorted(s, key=alphabet.index_of)])
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "CylinderEvent":
        sets = _require(data, "sets", "")
        if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
            raise SchemaError("expected a list of lists of symbols", "sets")
        return cls(tuple(frozenset(s) for s in sets))


@dataclass(frozen=True)
class FunctionTable:
    """Nonnegative function on the alphabet, for Laplace functionals."""

    values: Mapping[str, float]
    tolerance: float = 1e-12

    def __post_init__(self):
        values = {}
        for label, v in self.values.items():
            fv = float(v)
            if not fv >= 0 or fv == float("inf"):
                raise SchemaError(f"f({label}) = {v!r} must be finite and nonnegative", f"values.{label}")
            values[str(label)] = v
        if not self.tolerance > 0:
            raise SchemaError("tolerance must be positive", "tolerance")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_json(cls, data: Mapping) -> "FunctionTable":
        values = data.get("values", data) if isinstance(data, Mapping) else None
        if not isinstance(values, Mapping):
            raise SchemaError("expected an object mapping symbols to values", "values")
        values = {k: v for k, v in values.items() if k != "tolerance"}
        for k, v in values.items():
            if isinstance(v, bool) or not isinstance(v, (int, float, str)):
                raise SchemaError("expected a number", f"values.{k}")
        tol = float(data.get("tolerance", 1e-12))
        return cls(values, tol)
