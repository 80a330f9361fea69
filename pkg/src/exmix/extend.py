"""Can an n-exchangeable law be the n-coordinate restriction of an N-exchangeable one?

Decided exactly on type weights: the unknowns are the mass-N type weights,
constrained to be nonnegative and to marginalize onto the given law.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactla import (
    FM_VARIABLE_CAP,
    InfeasibilityCertificate,
    LinearSystem,
    RatMatrix,
    SizeError,
    rat_to_str,
    sylvester_pd,
)
from .exactla import feasible as _feasible
from .measures import ExchangeableLaw
from .typecomb import TypeIndex, count_types


def marginalize(law: ExchangeableLaw) -> ExchangeableLaw:
    """Law of the first N-1 coordinates of an N-exchangeable law.

    Dropping the last coordinate of a tuple of type ``nu + e_a`` leaves type
    ``nu``; by exchangeability that happens with probability ``(nu[a]+1)/N``.
    """
    N = law.n
    if N < 2:
        raise ValueError("marginalize needs N >= 2")
    out: dict = {}
    for mu, w in law.weights.items():
        for a in mu.support():
            counts = list(mu.counts)
            counts[a] -= 1
            nu = type(mu)(tuple(counts))
            out[nu] = out.get(nu, Fraction(0)) + w * Fraction(mu[a], N)
    return ExchangeableLaw(N - 1, law.alphabet, out)


def marginalization_matrix(N: int, n: int, d: int) -> RatMatrix:
    """Linear map from mass-N type weights to mass-n type weights."""
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    result = RatMatrix.identity(count_types(N, d))
    for m in range(N, n, -1):
        src, dst = TypeIndex(m, d), TypeIndex(m - 1, d)
        step = [[Fraction(0)] * len(src) for _ in range(len(dst))]
        for j, mu in enumerate(src):
            for a in mu.support():
                counts = list(mu.counts)
                counts[a] -= 1
                step[dst.index(type(mu)(tuple(counts)))][j] += Fraction(mu[a], m)
        result = RatMatrix(step) @ result
    return result


@dataclass(frozen=True)
class ExtensionProblem:
    base: ExchangeableLaw
    target: int

    def __post_init__(self):
        if self.target <= self.base.n:
            raise ValueError(f"target N={self.target} must exceed n={self.base.n}")


@dataclass(frozen=True)
class ExtensionResult:
    extendible: bool
    witness: ExchangeableLaw | None
    certificate: InfeasibilityCertificate | None
    variables: tuple[str, ...]

    def to_json(self) -> dict:
        out: dict = {"extendible": self.extendible}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.certificate is not None:
            cert = self.certificate
            out["certificate"] = {
                "multipliers": [rat_to_str(v) for v in cert.multipliers],
                "combined": {nm: rat_to_str(c) for nm, c in zip(self.variables, cert.combined)},
                "bound": rat_to_str(cert.bound),
                "inequality": cert.describe([f"Q({nm})" for nm in self.variables]),
            }
        return out


def extend_check(problem: ExtensionProblem, cap: int = FM_VARIABLE_CAP) -> ExtensionResult:
    base, N = problem.base, problem.target
    d = base.d
    nvar = count_types(N, d)
    if nvar > cap:
        raise SizeError(f"extension to N={N} over {d} symbols needs {nvar} unknowns > cap {cap}", nvar, cap)
    A = marginalization_matrix(N, base.n, d)
    b = [base.weight(nu) for nu in TypeIndex(base.n, d)]
    system = LinearSystem.nonnegative(A, b)
    targets = TypeIndex(N, d)
    names = tuple(str(mu) for mu in targets)
    result = _feasible(system, cap=cap)
    if not result.feasible:
        assert result.certificate.check(system)
        return ExtensionResult(False, None, result.certificate, names)
    witness = ExchangeableLaw(N, base.alphabet, dict(zip(targets, result.witness)))
    restricted = witness
    for _ in range(N - base.n):
        restricted = marginalize(restricted)
    if restricted != base:
        raise ArithmeticError("extension witness does not marginalize onto the base law")
    return ExtensionResult(True, witness, None, names)


def gaussian_covariance(epsilon) -> RatMatrix:
    """Covariance forced on (X1, X2, X3) by exchangeably extending a centred
    pair with variances ``1 + epsilon`` and covariance ``-1``."""
    v = 1 + Fraction(epsilon)
    return RatMatrix([[v, -1, -1], [-1, v, -1], [-1, -1, v]])


@dataclass(frozen=True)
class GaussianCheck:
    status: str  # "consistent" | "degenerate" | "inconsistent"
    minors: tuple[Fraction, ...]
    failing_minor: int | None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "minors": [rat_to_str(m) for m in self.minors],
            "failing_minor": self.failing_minor,
        }


def gaussian_extension_check(epsilon) -> GaussianCheck:
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    res = sylvester_pd(gaussian_covariance(eps))
    if res.positive_definite:
        return GaussianCheck("consistent", res.minors, None)
    k = res.failing_minor
    if res.minors[k - 1] == 0 and k == len(res.minors):
        return GaussianCheck("degenerate", res.minors, k)
    return GaussianCheck("inconsistent", res.minors, k)
