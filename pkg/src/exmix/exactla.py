"""Exact rational linear algebra and linear feasibility.

Rationals are :class:`fractions.Fraction`. Determinants, rank and solves use
fraction-free (Bareiss) elimination on row-scaled integer copies of the
input; only the final answer is divided back into lowest terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

FM_VARIABLE_CAP = 12


class SingularMatrixError(ValueError):
    def __init__(self, rank: int, size: int):
        super().__init__(f"matrix is singular: rank {rank} < {size}")
        self.rank = rank
        self.size = size


class SizeError(ValueError):
    """A problem exceeds a configured size cap."""

    def __init__(self, message: str, required: int, cap: int):
        super().__init__(message)
        self.required = required
        self.cap = cap


def parse_rat(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int. Floats and decimals are rejected."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE") or not text:
            raise ValueError(f"rationals must be written as 'p/q' or 'p', got {value!r}")
        return Fraction(text)
    raise ValueError(f"not a rational: {value!r}")


def rat_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RatMatrix:
    """Dense rectangular matrix of Fractions. Treat as immutable."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(Fraction(v) for v in r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("matrix rows have different lengths")
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RatMatrix":
        return cls([[0] * ncols for _ in range(nrows)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        if isinstance(ij, tuple):
            i, j = ij
            return self.rows[i][j]
        return self.rows[ij]

    def __eq__(self, other) -> bool:
        if isinstance(other, RatMatrix):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(rat_to_str(v) for v in r) + "]" for r in self.rows)
        return f"RatMatrix([{body}])"

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows))
        return RatMatrix(
            [[sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in cols] for r in self.rows]
        )

    def transpose(self) -> "RatMatrix":
        return RatMatrix(zip(*self.rows)) if self.rows else RatMatrix([])

    def leading(self, k: int) -> "RatMatrix":
        return RatMatrix([r[:k] for r in self.rows[:k]])

    def is_symmetric(self) -> bool:
        return self.nrows == self.ncols and all(
            self.rows[i][j] == self.rows[j][i] for i in range(self.nrows) for j in range(i)
        )

    def to_json(self) -> list[list[str]]:
        return [[rat_to_str(v) for v in r] for r in self.rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence]) -> "RatMatrix":
        return cls([[parse_rat(v) for v in r] for r in data])


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale every row by the lcm of its denominators."""
    out = []
    for r in rows:
        m = lcm(*(v.denominator for v in r)) if r else 1
        out.append([int(v * m) for v in r])
    return out


def _bareiss(M: list[list[int]], pivot_cols: int) -> tuple[list[int], int]:
    """In-place fraction-free forward elimination over the first ``pivot_cols``.

    Returns the pivot columns and the parity of row swaps. Entries stay
    integers; every division is exact.
    """
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    prev = 1
    r = 0
    swaps = 0
    pivots = []
    for c in range(pivot_cols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if M[i][c]), None)
        if p is None:
            continue
        if p != r:
            M[r], M[p] = M[p], M[r]
            swaps += 1
        piv = M[r][c]
        row_r = M[r]
        for i in range(r + 1, nrows):
            row_i = M[i]
            f = row_i[c]
            if f == 0:
                for j in range(c + 1, ncols):
                    row_i[j] = piv * row_i[j] // prev
                continue
            for j in range(c + 1, ncols):
                row_i[j] = (piv * row_i[j] - f * row_r[j]) // prev
            row_i[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return pivots, swaps


def rank(A: RatMatrix) -> int:
    if A.nrows == 0 or A.ncols == 0:
        return 0
    M = _integer_rows(A.rows)
    pivots, _ = _bareiss(M, A.ncols)
    return len(pivots)


def det(A: RatMatrix) -> Fraction:
    if A.nrows != A.ncols:
        raise ValueError(f"determinant of non-square {A.shape} matrix")
    n = A.nrows
    if n == 0:
        return Fraction(1)
    scales = [lcm(*(v.denominator for v in r)) for r in A.rows]
    M = _integer_rows(A.rows)
    pivots, swaps = _bareiss(M, n)
    if len(pivots) < n:
        return Fraction(0)
    d = Fraction(M[n - 1][n - 1])
    for s in scales:
        d /= s
    return -d if swaps % 2 else d


def solve(A: RatMatrix, B: RatMatrix) -> RatMatrix:
    """Exact ``X`` with ``A @ X == B`` for square nonsingular ``A``."""
    n = A.nrows
    if A.ncols != n:
        raise ValueError(f"solve needs a square matrix, got {A.shape}")
    if B.nrows != n:
        raise ValueError(f"right-hand side has {B.nrows} rows, expected {n}")
    m = B.ncols
    aug = _integer_rows([a + b for a, b in zip(A.rows, B.rows)])
    M = [list(r) for r in aug]
    pivots, _ = _bareiss(M, n)
    if len(pivots) < n:
        raise SingularMatrixError(len(pivots), n)
    # Back substitution on D*X, which is integral (Cramer); divisions are exact.
    D = M[n - 1][n - 1]
    X = [[0] * m for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = M[i]
        for k in range(m):
            acc = D * row[n + k]
            for j in range(i + 1, n):
                if row[j]:
                    acc -= row[j] * X[j][k]
            q, rem = divmod(acc, row[i])
            assert rem == 0, "non-exact back substitution"
            X[i][k] = q
    for i in range(n):
        row = aug[i]
        for k in range(m):
            lhs = sum(row[j] * X[j][k] for j in range(n) if row[j])
            if lhs != D * row[n + k]:
                raise ArithmeticError("solve failed re-multiplication check")
    return RatMatrix([[Fraction(v, D) for v in r] for r in X])


def inverse(A: RatMatrix) -> RatMatrix:
    if A.nrows != A.ncols:
        raise ValueError(f"inverse of non-square {A.shape} matrix")
    return solve(A, RatMatrix.identity(A.nrows))


def rref(A: RatMatrix) -> tuple[RatMatrix, list[int]]:
    rows = [list(r) for r in A.rows]
    pivots = []
    r = 0
    for c in range(A.ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return RatMatrix(rows), pivots


def nullspace(A: RatMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    R, pivots = rref(A)
    free = [c for c in range(A.ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * A.ncols
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -R[i, f]
        basis.append(tuple(x))
    return basis


@dataclass(frozen=True)
class SylvesterResult:
    positive_definite: bool
    minors: tuple[Fraction, ...]
    failing_minor: int | None  # 1-based order of the first non-positive minor


def sylvester_pd(A: RatMatrix) -> SylvesterResult:
    """Positive definiteness by the signs of the leading principal minors."""
    if not A.is_symmetric():
        raise ValueError("sylvester_pd needs a square symmetric matrix")
    minors = tuple(det(A.leading(k)) for k in range(1, A.nrows + 1))
    failing = next((k + 1 for k, m in enumerate(minors) if m <= 0), None)
    return SylvesterResult(failing is None, minors, failing)


# -- linear feasibility -------------------------------------------------------


@dataclass(frozen=True)
class LinearSystem:
    """``A q = b`` with ``q[j] >= 0`` wherever ``nonneg[j]`` is set."""

    A: RatMatrix
    b: tuple[Fraction, ...]
    nonneg: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(Fraction(v) for v in self.b))
        object.__setattr__(self, "nonneg", tuple(bool(v) for v in self.nonneg))
        if len(self.b) != self.A.nrows:
            raise ValueError(f"b has length {len(self.b)}, A has {self.A.nrows} rows")
        if len(self.nonneg) != self.A.ncols:
            raise ValueError(f"{len(self.nonneg)} nonnegativity flags for {self.A.ncols} variables")

    @classmethod
    def nonnegative(cls, A: RatMatrix, b: Sequence) -> "LinearSystem":
        return cls(A, tuple(b), (True,) * A.ncols)

    def satisfied_by(self, q: Sequence[Fraction]) -> bool:
        if any(flag and v < 0 for flag, v in zip(self.nonneg, q)):
            return False
        return all(sum(a * v for a, v in zip(row, q)) == bi for row, bi in zip(self.A.rows, self.b))


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Farkas multipliers ``y``: ``y^T A >= 0`` on nonnegative variables,
    ``== 0`` on free ones, and ``y^T b < 0``.

    Any feasible ``q`` would give ``0 <= (y^T A) q = y^T b < 0``.
    """

    multipliers: tuple[Fraction, ...]
    combined: tuple[Fraction, ...]
    bound: Fraction

    def check(self, system: LinearSystem) -> bool:
        combined = tuple(
            sum((y * system.A[i, j] for i, y in enumerate(self.multipliers)), Fraction(0))
            for j in range(system.A.ncols)
        )
        bound = sum((y * bi for y, bi in zip(self.multipliers, system.b)), Fraction(0))
        if combined != self.combined or bound != self.bound or bound >= 0:
            return False
        return all(c >= 0 if flag else c == 0 for c, flag in zip(combined, system.nonneg))

    def describe(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"q{j}" for j in range(len(self.combined))]
        terms = [f"{rat_to_str(c)}*{nm}" for c, nm in zip(self.combined, names) if c]
        lhs = " + ".join(terms) if terms else "0"
        return f"0 <= {lhs} = {rat_to_str(self.bound)} < 0"


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: tuple[Fraction, ...] | None = None
    certificate: InfeasibilityCertificate | None = None


class _Row:
    """Inequality ``coeffs . q <= rhs`` (or equality) with its derivation.

    ``y`` are multipliers on the original equalities, ``z >= 0`` on the
    original nonnegativity constraints ``-q_j <= 0``.
    """

    __slots__ = ("coeffs", "rhs", "y", "z")

    def __init__(self, coeffs, rhs, y, z):
        self.coeffs, self.rhs, self.y, self.z = coeffs, rhs, y, z

    def axpy(self, f: Fraction, other: "_Row") -> "_Row":
        return _Row(
            [a + f * b for a, b in zip(self.coeffs, other.coeffs)],
            self.rhs + f * other.rhs,
            [a + f * b for a, b in zip(self.y, other.y)],
            [a + f * b for a, b in zip(self.z, other.z)],
        )

    def scaled(self, f: Fraction) -> "_Row":
        return _Row(
            [f * a for a in self.coeffs], f * self.rhs, [f * a for a in self.y], [f * a for a in self.z]
        )

    def key(self):
        return tuple(self.coeffs), self.rhs

    def history(self) -> frozenset[int]:
        return frozenset(k for k, v in enumerate(self.z) if v)


def _certificate(row: _Row, system: LinearSystem) -> InfeasibilityCertificate:
    # Equality rows have free-sign multipliers; inequality rows have rhs < 0.
    scale = -1 / row.rhs
    y = tuple(scale * v for v in row.y)
    combined = tuple(
        sum((yi * system.A[i, j] for i, yi in enumerate(y)), Fraction(0)) for j in range(system.A.ncols)
    )
    bound = sum((yi * bi for yi, bi in zip(y, system.b)), Fraction(0))
    return InfeasibilityCertificate(y, combined, bound)


def feasible(system: LinearSystem, cap: int = FM_VARIABLE_CAP) -> FeasibilityResult:
    """Decide ``{q : A q = b, q >= 0 where flagged}`` exactly.

    Equalities are eliminated by exact Gauss-Jordan substitution, then the
    remaining variables by Fourier-Motzkin with multiplier tracking, so an
    infeasible system always yields a checkable Farkas certificate.
    Feasible systems yield the witness obtained by back substitution taking
    each variable at its smallest admissible value.
    """
    A, b = system.A, system.b
    nvar, neq = A.ncols, A.nrows
    if nvar > cap:
        raise SizeError(
            f"Fourier-Motzkin limited to {cap} variables, system has {nvar}", nvar, cap
        )
    zero = Fraction(0)
    eqs = [
        _Row(list(A.rows[i]), b[i], [Fraction(int(k == i)) for k in range(neq)], [zero] * nvar)
        for i in range(neq)
    ]
    ineqs = [
        _Row([Fraction(-int(k == j)) for k in range(nvar)], zero, [zero] * neq,
             [Fraction(int(k == j)) for k in range(nvar)])
        for j in range(nvar)
        if system.nonneg[j]
    ]

    # Gauss-Jordan on the equalities, substituting into everything else.
    pivot_of: dict[int, _Row] = {}
    remaining = list(eqs)
    for j in range(nvar):
        p = next((r for r in remaining if r.coeffs[j]), None)
        if p is None:
            continue
        remaining.remove(p)
        p = p.scaled(1 / p.coeffs[j])
        remaining = [r.axpy(-r.coeffs[j], p) if r.coeffs[j] else r for r in remaining]
        pivot_of = {k: (r.axpy(-r.coeffs[j], p) if r.coeffs[j] else r) for k, r in pivot_of.items()}
        ineqs = [r.axpy(-r.coeffs[j], p) if r.coeffs[j] else r for r in ineqs]
        pivot_of[j] = p
    for r in remaining:
        if r.rhs != 0:
            return FeasibilityResult(False, certificate=_certificate(r, system))

    # Fourier-Motzkin over the free (non-pivot) variables.
    order = [j for j in range(nvar) if j not in pivot_of]
    stages: list[tuple[int, list[_Row]]] = []
    rows = _dedupe(ineqs)
    for eliminated, j in enumerate(order, start=1):
        pos = [r for r in rows if r.coeffs[j] > 0]
        neg = [r for r in rows if r.coeffs[j] < 0]
        keep = [r for r in rows if r.coeffs[j] == 0]
        stages.append((j, pos + neg))
        combined = [p.scaled(-n.coeffs[j]).axpy(p.coeffs[j], n) for p in pos for n in neg]
        for r in combined:
            r.coeffs[j] = zero
        rows = _prune(keep, _dedupe(combined), eliminated)
    for r in rows:
        if r.rhs < 0:
            return FeasibilityResult(False, certificate=_certificate(r, system))

    q = [zero] * nvar
    for j, bounds in reversed(stages):
        lower, upper = None, None
        for r in bounds:
            rest = r.rhs - sum((c * q[k] for k, c in enumerate(r.coeffs) if c and k != j), zero)
            v = rest / r.coeffs[j]
            if r.coeffs[j] > 0:
                upper = v if upper is None else min(upper, v)
            else:
                lower = v if lower is None else max(lower, v)
        if lower is not None:
            q[j] = lower
        elif upper is not None:
            q[j] = min(upper, zero)
    for j, p in pivot_of.items():
        q[j] = p.rhs - sum((c * q[k] for k, c in enumerate(p.coeffs) if c and k != j), zero)
    witness = tuple(q)
    if not system.satisfied_by(witness):
        raise ArithmeticError("Fourier-Motzkin witness failed verification")
    return FeasibilityResult(True, witness=witness)


def _prune(keep: list[_Row], new: list[_Row], eliminated: int) -> list[_Row]:
    """Drop derived rows that are implied by others.

    Chernikov: after ``eliminated`` steps a row combining more than
    ``eliminated + 1`` original inequalities is redundant. Kohler: so is a row
    whose set of original inequalities contains another row's set.
    """
    new = [r for r in new if len(r.history()) <= eliminated + 1]
    rows = sorted(_dedupe(keep + new), key=lambda r: len(r.history()))
    kept: list[_Row] = []
    seen: list[frozenset[int]] = []
    for r in rows:
        h = r.history()
        if h and any(s < h for s in seen):
            continue
        kept.append(r)
        seen.append(h)
    return kept


def _dedupe(rows: list[_Row]) -> list[_Row]:
    """Drop trivial rows and duplicates after normalising by the largest |coefficient|.

    Among duplicates the row with the fewest original inequalities wins, so
    the history-based pruning never discards the only copy of a row.
    """
    seen: dict = {}
    for r in rows:
        m = max((abs(c) for c in r.coeffs), default=Fraction(0))
        if m == 0:
            if r.rhs >= 0:
                continue
        else:
            r = r.scaled(1 / m)
        k = r.key()
        if k not in seen or len(r.history()) < len(seen[k].history()):
            seen[k] = r
    return list(seen.values())
