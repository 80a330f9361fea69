"""Type vectors: finite point measures of total mass n over a finite alphabet.

A tuple ``x`` in S^n has a *type* (the count of each symbol in ``x``). Every
exchangeable law is determined by how much mass it puts on each type, so
this module is the combinatorial substrate for everything else.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod
from typing import Iterable, Iterator, Sequence


class UnknownLabelError(ValueError):
    """A tuple contains a symbol that is not part of the alphabet."""

    def __init__(self, position: int, label: str):
        super().__init__(f"unknown label {label!r} at position {position}")
        self.position = position
        self.label = label


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        if not symbols:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"alphabet symbols are not distinct: {list(symbols)}")
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def of_size(cls, d: int) -> "Alphabet":
        """The alphabet ``{"1", ..., "d"}``."""
        return cls(tuple(str(i) for i in range(1, d + 1)))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index_of(self, label: str) -> int:
        try:
            return self.symbols.index(str(label))
        except ValueError:
            raise KeyError(label) from None

    def restrict(self, labels: Iterable[str]) -> "Alphabet":
        """Sub-alphabet keeping this alphabet's order."""
        keep = set(map(str, labels))
        return Alphabet(tuple(s for s in self.symbols if s in keep))

    def to_json(self) -> dict:
        return {"symbols": list(self.symbols)}

    @classmethod
    def from_json(cls, data: dict) -> "Alphabet":
        return cls(tuple(data["symbols"]))

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True, order=True)
class TypeVector:
    """Counts per alphabet position. Ordering is lexicographic on ``counts``."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"negative count in type vector {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def d(self) -> int:
        return len(self.counts)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.counts) if c)

    def __getitem__(self, i: int) -> int:
        return self.counts[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self.counts)

    def __str__(self) -> str:
        return ",".join(map(str, self.counts))

    def plus_unit(self, a: int) -> "TypeVector":
        counts = list(self.counts)
        counts[a] += 1
        return TypeVector(tuple(counts))

    @classmethod
    def parse(cls, text: str) -> "TypeVector":
        """Parse ``"2,1,0"``."""
        return cls(tuple(int(tok) for tok in text.split(",") if tok.strip()))

    def to_json(self) -> dict:
        return {"counts": list(self.counts), "n": self.n}

    @classmethod
    def from_json(cls, data: dict) -> "TypeVector":
        tv = cls(tuple(data["counts"]))
        if "n" in data and int(data["n"]) != tv.n:
            raise ValueError(f"type vector {list(tv.counts)} has mass {tv.n}, not {data['n']}")
        return tv


def _compositions(n: int, d: int) -> Iterator[tuple[int, ...]]:
    if d == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


def count_types(n: int, d: int) -> int:
    """``C(n+d-1, d-1)``, the number of types of mass n over d symbols."""
    return comb(n + d - 1, d - 1)


def enumerate_types(n: int, alphabet: Alphabet | int) -> list[TypeVector]:
    """All type vectors of mass ``n``, in lexicographic order of counts."""
    d = alphabet if isinstance(alphabet, int) else alphabet.size
    if n < 0 or d < 1:
        raise ValueError(f"need n >= 0 and d >= 1, got n={n}, d={d}")
    return [TypeVector(c) for c in _compositions(n, d)]


def multinomial(nu: TypeVector) -> int:
    """``n! / prod(counts!)``."""
    return factorial(nu.n) // prod(factorial(c) for c in nu.counts)


def cell_cardinality(nu: TypeVector) -> int:
    """Number of ordered tuples whose type is ``nu``."""
    return multinomial(nu)


def type_of(x: Sequence[str], alphabet: Alphabet) -> TypeVector:
    counts = [0] * alphabet.size
    for pos, label in enumerate(x):
        try:
            counts[alphabet.index_of(label)] += 1
        except KeyError:
            raise UnknownLabelError(pos, label) from None
    return TypeVector(tuple(counts))


def type_of_indices(x: Sequence[int], d: int) -> TypeVector:
    counts = [0] * d
    for i in x:
        counts[i] += 1
    return TypeVector(tuple(counts))


def monomial(base: Sequence, exponents: Sequence[int]) -> Fraction:
    """``prod(base[a] ** exponents[a])`` with ``0**0 == 1``.

    Every power of a probability vector or type vector in the package goes
    through here.
    """
    out = Fraction(1)
    for b, e in zip(base, exponents, strict=True):
        if e:
            out *= Fraction(b) ** e
    return out


class TypeIndex:
    """Dense, lexicographic indexing of all types of mass n over d symbols."""

    def __init__(self, n: int, d: int):
        self.n = n
        self.d = d
        self.types: tuple[TypeVector, ...] = tuple(enumerate_types(n, d))
        self._pos = {t: i for i, t in enumerate(self.types)}

    def __len__(self) -> int:
        return len(self.types)

    def __iter__(self) -> Iterator[TypeVector]:
        return iter(self.types)

    def __contains__(self, nu: TypeVector) -> bool:
        return nu in self._pos

    def index(self, nu: TypeVector) -> int:
        try:
            return self._pos[nu]
        except KeyError:
            raise ValueError(
                f"type {list(nu.counts)} is not in N_{self.n}({self.d})"
            ) from None

    def vector(self, i: int) -> TypeVector:
        return self.types[i]
