import random
from fractions import Fraction
from itertools import product

import pytest

from exmix.dyson import (
    build_pair,
    build_w,
    finite_difference_identity,
    m_row,
    verify_hompol,
)
from exmix.exactla import RatMatrix, SizeError
from exmix.typecomb import TypeIndex, TypeVector, monomial, type_of_indices

F = Fraction
half = F(1, 2)


def wright_fisher_counts(lam):
    """Number of ordered n-draws (with replacement) from a population of
    composition ``lam`` landing on each type. Equals W(lam, .)."""
    n, d = sum(lam), len(lam)
    population = [a for a, c in enumerate(lam) for _ in range(c)]
    counts = {}
    for draw in product(population, repeat=n):
        nu = type_of_indices(draw, d)
        counts[nu] = counts.get(nu, 0) + 1
    return counts


def iterated_difference(n, h):
    """Delta_{h_1} ... Delta_{h_n} t**n evaluated at 0, by nesting shifts."""
    g = lambda t: t**n  # noqa: E731
    for step in h:
        g = (lambda f, s: (lambda t: f(t + s) - f(t)))(g, step)
    return g(F(0))


class TestW:
    def test_n2_d2(self):
        assert build_w(2, 2) == RatMatrix([[4, 0, 0], [1, 2, 1], [0, 0, 4]])

    @pytest.mark.parametrize("n, d", [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
    def test_matches_wright_fisher(self, n, d):
        index = TypeIndex(n, d)
        W = build_w(n, d)
        for i, lam in enumerate(index):
            wf = wright_fisher_counts(lam.counts)
            for j, nu in enumerate(index):
                assert W[i, j] == wf.get(nu, 0)

    @pytest.mark.parametrize("n", range(1, 6))
    @pytest.mark.parametrize("d", range(1, 5))
    def test_rows_are_scaled_transition_probabilities(self, n, d):
        W = build_w(n, d)
        assert all(v >= 0 for row in W.rows for v in row)
        assert all(sum(row) == n**n for row in W.rows)

    def test_n1_is_identity(self):
        for d in range(1, 6):
            assert build_w(1, d) == RatMatrix.identity(d)

    def test_power_expansion(self):
        # (lam . x)**n == sum_nu W(lam, nu) x**nu for arbitrary x
        rnd = random.Random(7)
        for n, d in [(2, 3), (3, 2), (3, 3), (4, 2)]:
            index = TypeIndex(n, d)
            W = build_w(n, d)
            x = [F(rnd.randint(-9, 9), rnd.randint(1, 5)) for _ in range(d)]
            for i, lam in enumerate(index):
                lhs = sum(l * v for l, v in zip(lam.counts, x)) ** n
                assert lhs == sum(W[i, j] * monomial(x, nu.counts) for j, nu in enumerate(index))

    def test_size_cap(self):
        with pytest.raises(SizeError) as info:
            build_w(4, 4, cap=10)
        assert info.value.required == 35

    def test_size_cap_from_env(self, monkeypatch):
        monkeypatch.setenv("EXMIX_SIZE_CAP", "5")
        with pytest.raises(SizeError):
            build_pair(3, 3)


class TestInverse:
    def test_n2_d2(self):
        pair = build_pair(2, 2)
        assert pair.M == RatMatrix([[F(1, 4), 0, 0], [F(-1, 8), F(1, 2), F(-1, 8)], [0, 0, F(1, 4)]])

    @pytest.mark.parametrize("n, d", [(1, 3), (2, 2), (3, 3), (4, 3), (3, 4), (5, 2)])
    def test_two_sided(self, n, d):
        pair = build_pair(n, d)
        I = RatMatrix.identity(pair.W.nrows)
        assert pair.M @ pair.W == I
        assert pair.W @ pair.M == I

    def test_m_row_examples(self):
        pair = build_pair(2, 2)
        assert m_row(pair, TypeVector((1, 1))) == {
            TypeVector((0, 2)): F(-1, 8),
            TypeVector((1, 1)): F(1, 2),
            TypeVector((2, 0)): F(-1, 8),
        }
        assert m_row(pair, TypeVector((2, 0))) == {
            TypeVector((0, 2)): 0,
            TypeVector((1, 1)): 0,
            TypeVector((2, 0)): F(1, 4),
        }

    def test_m_row_wrong_mass(self):
        with pytest.raises(ValueError):
            m_row(build_pair(2, 2), TypeVector((2, 1)))

    def test_monomial_recovery(self):
        # x**nu == sum_lam M(nu, lam) (lam . x)**n
        rnd = random.Random(11)
        n, d = 3, 3
        pair = build_pair(n, d)
        x = [F(rnd.randint(-5, 5), rnd.randint(1, 4)) for _ in range(d)]
        for nu in pair.index:
            total = sum(
                c * sum(l * v for l, v in zip(lam.counts, x)) ** n for lam, c in m_row(pair, nu).items()
            )
            assert total == monomial(x, nu.counts)


class TestHompol:
    @pytest.mark.parametrize("n, d, dim", [(2, 2, 3), (1, 5, 5), (4, 3, 15)])
    def test_full_rank(self, n, d, dim):
        report = verify_hompol(n, d)
        assert report.passed
        assert report.rank == report.expected == dim
        assert report.to_json()["pass"] is True


class TestFiniteDifference:
    @pytest.mark.parametrize(
        "h, value", [((1, 1), 2), ((F(5, 3),), F(5, 3)), ((half, 2, -3), -18), ((1, 1, -3), -18)]
    )
    def test_examples(self, h, value):
        report = finite_difference_identity(len(h), h)
        assert report.lhs == report.rhs == value
        assert report.passed

    def test_step_count_mismatch(self):
        with pytest.raises(ValueError):
            finite_difference_identity(3, [1, 2])

    def test_against_nested_shifts(self):
        rnd = random.Random(5)
        for _ in range(100):
            n = rnd.randint(1, 5)
            h = [F(rnd.randint(-20, 20), rnd.randint(1, 9)) for _ in range(n)]
            report = finite_difference_identity(n, h)
            assert report.lhs == iterated_difference(n, h)
            assert report.passed
