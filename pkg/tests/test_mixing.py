import json
from fractions import Fraction
from itertools import product
from math import prod

import pytest

from conftest import random_law
from exmix.cli import fixture_dir
from exmix.dyson import build_pair
from exmix.measures import ExchangeableLaw, SignedMixingMeasure
from exmix.mixing import (
    canonical_xi,
    cone_parametrize,
    psi_of_type,
    t_independence_check,
    tv_norm,
    tv_sweep,
)
from exmix.typecomb import Alphabet, TypeVector, enumerate_types, type_of_indices

F = Fraction
half = F(1, 2)


def tuple_law(xi, n):
    """Probability of every ordered tuple under int pi^n xi(dpi), atoms only."""
    return {
        x: sum((w * prod((p[a] for a in x), start=F(1)) for p, w in xi.atoms.items()), F(0))
        for x in product(range(xi.d), repeat=n)
    }


def represents(xi, law):
    return all(v == law.singleton_probability(x) for x, v in tuple_law(xi, law.n).items())


def load_fixture(name):
    return SignedMixingMeasure.from_json(json.loads((fixture_dir() / name).read_text()))


class TestPsi:
    def test_pair_of_distinct_symbols(self):
        psi = psi_of_type(build_pair(2, 2), TypeVector((1, 1)))
        assert psi.atoms == {(1, 0): -half, (0, 1): -half, (half, half): 2}

    def test_constant_pair(self):
        psi = psi_of_type(build_pair(2, 2), TypeVector((2, 0)))
        assert psi.atoms == {(1, 0): 1}

    def test_three_distinct_symbols(self):
        eps = TypeVector((1, 1, 1))
        psi = psi_of_type(build_pair(3, 3), eps)
        assert psi.total_mass() == 1
        assert represents(psi, ExchangeableLaw.point_mass(eps))

    @pytest.mark.parametrize("n, d", [(1, 3), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3), (2, 4)])
    def test_every_type_represents_its_point_mass(self, n, d):
        pair = build_pair(n, d)
        for eps in enumerate_types(n, d):
            psi = psi_of_type(pair, eps)
            assert psi.total_mass() == 1
            assert represents(psi, ExchangeableLaw.point_mass(eps))

    def test_alphabet_size_mismatch(self):
        with pytest.raises(ValueError):
            psi_of_type(build_pair(2, 2), TypeVector((1, 1)), Alphabet.of_size(3))


class TestCanonical:
    def test_uniform_permutation_n2(self):
        xi = canonical_xi(ExchangeableLaw.uniform_permutation(2))
        assert xi == load_fixture("nonu-i.json")
        assert xi.atoms == {(half, half): 2, (1, 0): -half, (0, 1): -half}

    def test_vertex_point_mass(self):
        for n, d in [(1, 2), (3, 3), (4, 2)]:
            nu = TypeVector((n,) + (0,) * (d - 1))
            xi = canonical_xi(ExchangeableLaw.point_mass(nu))
            assert xi.atoms == {(1,) + (0,) * (d - 1): 1}

    @pytest.mark.parametrize("counts", [(1, 1), (2, 1), (1, 1, 1), (2, 0, 2), (3, 1)])
    def test_iid_at_type_rational_point(self, counts):
        # Q(eps) = W(lam, eps) / n**n, so the average of the psi's collapses
        # to W M = I: the canonical measure is the single atom at lam / n.
        n = sum(counts)
        pi = tuple(F(c, n) for c in counts)
        law = ExchangeableLaw.iid(pi, n)
        xi = canonical_xi(law)
        assert represents(xi, law)
        assert xi.atoms == {pi: 1}

    def test_iid_off_grid_is_signed(self):
        # Q = (4/9, 4/9, 1/9) on (0,2), (1,1), (2,0); the (1,1) share of psi puts
        # -1/2 * 4/9 on each vertex, so the law extends to every N yet xi is signed
        law = ExchangeableLaw.iid((F(1, 3), F(2, 3)), 2)
        xi = canonical_xi(law)
        assert represents(xi, law)
        assert xi.atoms == {(1, 0): F(-1, 9), (0, 1): F(2, 9), (half, half): F(8, 9)}

    def test_random_laws(self, rng):
        for _ in range(40):
            n, d = rng.randint(1, 4), rng.randint(1, 3)
            law = random_law(rng, n, d)
            xi = canonical_xi(law)
            assert xi.total_mass() == 1
            assert xi.is_atomic
            assert all((c * n).denominator == 1 for p in xi.atoms for c in p)
            assert all(w != 0 for w in xi.atoms.values())
            assert represents(xi, law)

    def test_relabelling_equivariance(self, rng):
        for _ in range(20):
            n, d = rng.randint(1, 3), rng.randint(2, 3)
            law = random_law(rng, n, d)
            perm = list(range(d))
            rng.shuffle(perm)
            moved = ExchangeableLaw(
                n,
                law.alphabet,
                {TypeVector(tuple(nu[perm[i]] for i in range(d))): w for nu, w in law.weights.items()},
            )
            xi, xi_moved = canonical_xi(law), canonical_xi(moved)
            assert xi_moved.atoms == {tuple(p[perm[i]] for i in range(d)): w for p, w in xi.atoms.items()}


class TestTIndependence:
    @pytest.mark.parametrize(
        "n, d, counts", [(2, 2, (2, 0)), (2, 2, (1, 1)), (3, 3, (2, 1, 0)), (3, 3, (0, 0, 3)), (4, 3, (1, 0, 3))]
    )
    def test_examples(self, n, d, counts):
        law = ExchangeableLaw.point_mass(TypeVector(counts))
        assert t_independence_check(law, TypeVector(counts))

    def test_all_types_small(self):
        for n, d in [(2, 3), (3, 3), (2, 4), (3, 4)]:
            for eps in enumerate_types(n, d):
                assert t_independence_check(ExchangeableLaw.point_mass(eps), eps)

    def test_mismatched_type(self):
        with pytest.raises(ValueError):
            t_independence_check(ExchangeableLaw.uniform_permutation(2), TypeVector((1, 1, 1)))


class TestTV:
    def test_examples(self):
        assert tv_norm(canonical_xi(ExchangeableLaw.uniform_permutation(2))) == 3
        assert tv_norm(load_fixture("nonu-ii.json")) == F(7, 2)
        # 7/2 * 2/3 + 10 * 1/3
        assert tv_norm(load_fixture("nonu-iii.json")) == F(17, 3)

    def test_probability_measure(self):
        xi = SignedMixingMeasure(Alphabet.of_size(2), {(F(1, 3), F(2, 3)): F(1, 4), (1, 0): F(3, 4)})
        assert tv_norm(xi) == 1

    def test_irrational_density_gives_interval(self):
        xi = SignedMixingMeasure.from_json(
            {"atoms": [], "density": [{"from": "0", "to": "1", "poly": ["-1/2", "0", "3"]}]}
        )
        lo, hi = tv_norm(xi)
        assert lo < hi

    def test_sweep(self):
        res = tv_sweep("uniform_permutation", 3)
        assert [n for n, _ in res.rows] == [1, 2, 3]
        assert res.rows[0][1] == 1 and res.rows[1][1] == 3
        assert res.truncated_at is None

    def test_sweep_truncates_at_cap(self):
        res = tv_sweep("uniform_permutation", 5, cap=9)
        assert [n for n, _ in res.rows] == [1, 2]
        assert res.truncated_at == 3

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            tv_sweep("bernoulli", 2)


class TestCone:
    values = {"1": F(1), "2": F(2)}

    def test_uniform_permutation_n2(self):
        xi = canonical_xi(ExchangeableLaw.uniform_permutation(2))
        cone = cone_parametrize(xi, self.values, 2)
        assert cone.points == {(1, 2): 2, (1, 1): -half, (2, 2): -half}
        assert cone.total_mass() == 1

    def test_preserves_mass_and_tv(self, rng):
        for _ in range(20):
            n, d = rng.randint(1, 4), rng.randint(1, 3)
            xi = canonical_xi(random_law(rng, n, d))
            values = {s: F(rng.randint(-50, 50), rng.randint(1, 7)) + F(i, 1000) for i, s in enumerate(xi.alphabet.symbols)}
            if len(set(values.values())) < d:
                continue
            cone = cone_parametrize(xi, values, n)
            assert cone.total_mass() == xi.total_mass()
            assert cone.tv_norm() == tv_norm(xi)
            assert all(list(t) == sorted(t) and len(t) == n for t in cone.points)

    def test_rejects_off_grid_atom(self):
        xi = SignedMixingMeasure(Alphabet.of_size(2), {(F(1, 3), F(2, 3)): 1})
        with pytest.raises(ValueError):
            cone_parametrize(xi, self.values, 2)

    def test_rejects_repeated_values(self):
        xi = canonical_xi(ExchangeableLaw.uniform_permutation(2))
        with pytest.raises(ValueError):
            cone_parametrize(xi, {"1": 1, "2": 1}, 2)


def test_tuple_oracle_sanity():
    law = ExchangeableLaw.uniform_permutation(2)
    assert law.singleton_probability((0, 1)) == half
    assert type_of_indices((0, 1), 2) == TypeVector((1, 1))
