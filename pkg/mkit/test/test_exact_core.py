"""Exact polynomials, forms, series and plane maps."""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest

from mkit.core.errors import MalformedInputError, PreconditionError
from mkit.core.forms import (DifferentialForm, differential, exterior_derivative, interior_euler,
                             wedge, wedge_df)
from mkit.core.francoise import homotopy_potential
from mkit.core.local_algebra import detect_weights, simple_boundary_germ
from mkit.core.maps import (PlaneMap, apply_map, compose_maps, flow_map, invert_map,
                            map_identity_defect, pullback, unit_inverse, work_cap)
from mkit.core.poly import Poly
from mkit.core.rational import format_rational, parse_rational, rational_sqrt
from mkit.core.series import (SeriesT, compose_series, compose_univariate, reciprocal, revert,
                              series_power)
from mkit.core.weights import A1_WEIGHTS, MORSE_WEIGHTS, WeightSystem, parse_weights

from .conftest import TABLE_GERMS


class TestRationals:

    def test_parse_and_format(self):
        assert parse_rational("-3/6") == Fraction(-1, 2)
        assert format_rational(Fraction(4, 2)) == "2"
        assert format_rational(Fraction(-1, 2)) == "-1/2"

    @pytest.mark.parametrize("text", ["0.5", "1e3", "1/0", "", "a/b", "1//2"])
    def test_rejects_non_rationals(self, text):
        with pytest.raises(MalformedInputError):
            parse_rational(text)

    def test_rational_sqrt(self):
        assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
        assert rational_sqrt(Fraction(2)) is None
        assert rational_sqrt(Fraction(-1)) is None


class TestWeights:

    def test_levels(self):
        assert (A1_WEIGHTS.level_x, A1_WEIGHTS.level_y, A1_WEIGHTS.frame_margin) == (2, 1, 2)
        assert (MORSE_WEIGHTS.level_x, MORSE_WEIGHTS.level_y) == (1, 1)
        assert A1_WEIGHTS.monomials_at(4) == [(2, 0), (1, 2), (0, 4)]

    @pytest.mark.parametrize("text", ["1,1/2", "1:1/2", "1 1/2"])
    def test_parse_override(self, text):
        assert parse_weights(text) == WeightSystem(1, Fraction(1, 2))

    def test_non_positive_weights(self):
        with pytest.raises(MalformedInputError):
            WeightSystem(0, 1)

    @pytest.mark.parametrize("family,mu", TABLE_GERMS)
    def test_table_weights(self, family, mu):
        assert _weights_of(family, mu) == detect_weights(simple_boundary_germ(family, mu))


class TestPoly:

    def test_arithmetic(self):
        x, y = Poly.x(), Poly.y()
        p = (x + y) ** 2
        assert p == Poly({(2, 0): 1, (1, 1): 2, (0, 2): 1})
        assert (p - x * x).coefficient(1, 1) == 2
        assert p.diff_x() == Poly({(1, 0): 2, (0, 1): 2})
        assert p.evaluate(Fraction(1, 2), 1) == Fraction(9, 4)

    def test_zero_terms_dropped(self):
        p = Poly({(1, 0): 1, (0, 1): 0})
        assert len(p) == 1
        assert (p - p).is_zero()

    def test_division_by_x(self):
        p = Poly({(2, 1): 3, (3, 0): 1})
        assert p.divisible_by_x(2)
        assert p.div_x(2).mul_x(2) == p
        assert not Poly.y().divisible_by_x(1)

    def test_truncate_by_level(self):
        p = Poly({(1, 0): 1, (0, 2): 1, (0, 3): 1, (2, 0): 1})
        assert p.truncate(A1_WEIGHTS, 2) == Poly({(1, 0): 1, (0, 2): 1})
        assert p.lowest_level(A1_WEIGHTS) == 2
        assert p.highest_level(A1_WEIGHTS) == 4

    def test_level_cache_shared_across_threads(self, random_poly):
        p = random_poly(8, 12)
        expected = Poly(dict(p.items())).pieces(A1_WEIGHTS)
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda _: p.pieces(A1_WEIGHTS), range(32)))
        assert all(r == expected for r in results)
        low = sum((expected.get(level, Poly.zero()) for level in range(7)), Poly.zero())
        assert p.truncate(A1_WEIGHTS, 6) == low

    def test_json_order_is_canonical(self):
        p = Poly({(0, 2): 1, (1, 0): Fraction(-1, 2), (2, 0): 5})
        encoded = p.to_json()
        assert [t["e"] for t in encoded["terms"]] == [[1, 0], [2, 0], [0, 2]]
        assert Poly.from_json(encoded) == p

    @pytest.mark.parametrize("bad", [
        {"terms": [{"e": [1, 0], "c": "1"}, {"e": [1, 0], "c": "2"}]},
        {"terms": [{"e": [1], "c": "1"}]},
        {"terms": [{"e": [1, 0], "c": "0.5"}]},
        {"polynomial": []},
    ])
    def test_malformed_json(self, bad):
        with pytest.raises(MalformedInputError):
            Poly.from_json(bad)


class TestForms:

    def test_d_of_two_form(self):
        with pytest.raises(PreconditionError, match="top degree"):
            exterior_derivative(DifferentialForm.two_form(Poly.x()))

    def test_d_squared_vanishes(self, random_poly):
        for _ in range(100):
            f = random_poly(6, 6)
            assert exterior_derivative(exterior_derivative(DifferentialForm.function(f))).is_zero()

    def test_euler_contraction_identity(self, rng, random_poly):
        # f theta = df ^ (E _| theta) for quasihomogeneous f of weight degree 1
        for _ in range(100):
            family, mu = rng.choice(TABLE_GERMS)
            f = simple_boundary_germ(family, mu)
            weights = _weights_of(family, mu)
            theta = DifferentialForm.two_form(random_poly(5, 5))
            assert theta.scale(f) == wedge_df(f, interior_euler(weights, theta))

    def test_homotopy_potential_inverts_d(self, random_poly):
        for _ in range(100):
            g = random_poly(6, 5, min_degree=1)
            pi = differential(g)
            h = homotopy_potential(pi)
            assert differential(h) == pi
            assert h.constant_term() == 0

    def test_homotopy_potential_needs_closed_form(self):
        with pytest.raises(PreconditionError, match="not closed"):
            homotopy_potential(DifferentialForm.one_form(Poly.y(), Poly.zero()))

    def test_martinet_primitive(self):
        # alpha0 = x^2 dy - (x y / 2) dx has d alpha0 = (5/2) x dx^dy
        alpha0 = DifferentialForm.one_form(Poly.monomial(1, 1, Fraction(-1, 2)), Poly.monomial(2, 0))
        omega0 = DifferentialForm.two_form(Poly.x())
        assert exterior_derivative(alpha0) == omega0.scale(Fraction(5, 2))

    def test_wedge_df_is_antisymmetric(self, random_poly):
        for _ in range(50):
            f, g = random_poly(5, 4), random_poly(5, 4)
            assert wedge_df(f, differential(g)) == -wedge_df(g, differential(f))

    def test_wedge_matches_wedge_df(self, random_poly):
        for _ in range(20):
            f = random_poly(4, 4)
            eta = DifferentialForm.one_form(random_poly(3, 3), random_poly(3, 3))
            assert wedge(differential(f), eta) == wedge_df(f, eta)

    def test_membership(self):
        assert DifferentialForm.two_form(Poly.monomial(1, 2)).in_x_omega2()
        assert not DifferentialForm.two_form(Poly.y()).in_x_omega2()


class TestSeries:

    def test_power_round_trip(self, random_poly, rng):
        for _ in range(20):
            s = SeriesT.of([1] + [Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for _ in range(6)])
            p = Fraction(rng.choice([1, 2, 3, -2]), rng.choice([2, 3, 5]))
            assert series_power(series_power(s, p), 1 / p) == s

    def test_fractional_power(self):
        s = SeriesT.of([1, Fraction(5, 7), 0])
        assert series_power(s, Fraction(2, 5)) == SeriesT.of([1, Fraction(2, 7), Fraction(-3, 49)])

    def test_power_needs_unit(self):
        with pytest.raises(PreconditionError):
            series_power(SeriesT.of([0, 1]), Fraction(1, 2))

    def test_revert(self):
        s = SeriesT.of([0, 1, 1, 0, 0])
        r = revert(s)
        assert compose_univariate(s, r) == SeriesT.identity(4)

    def test_reciprocal(self):
        s = SeriesT.of([1, -1, 0, 0])
        assert reciprocal(s) == SeriesT.of([1, 1, 1, 1])

    def test_compose_with_function(self):
        f = Poly({(1, 0): 1, (0, 2): 1})
        composed = compose_series(SeriesT.of([1, 2]), f, 4, A1_WEIGHTS)
        assert composed == Poly({(0, 0): 1, (1, 0): 2, (0, 2): 2})


class TestMaps:

    def test_inverse_through_cap(self, random_diffeo):
        for _ in range(10):
            phi = random_diffeo(8)
            psi = invert_map(phi, 8)
            assert map_identity_defect(phi, psi, 8) is None
            assert psi.boundary_preserving

    def test_singular_linear_part(self):
        phi = PlaneMap(Poly.x(), Poly.monomial(0, 2), A1_WEIGHTS, 4)
        with pytest.raises(PreconditionError, match="singular linear part"):
            invert_map(phi, 4)

    def test_pullback_commutes_with_d(self, random_diffeo, random_poly):
        cap = 8
        for _ in range(10):
            phi = random_diffeo(cap + 2)
            alpha = DifferentialForm.one_form(random_poly(3, 3), random_poly(3, 3))
            lhs = exterior_derivative(pullback(phi, alpha, cap + 2)).truncate(A1_WEIGHTS, cap)
            rhs = pullback(phi, exterior_derivative(alpha), cap)
            assert lhs == rhs

    def test_pullback_is_functorial(self, random_diffeo):
        cap = 6
        phi, psi = random_diffeo(cap), random_diffeo(cap)
        omega = DifferentialForm.two_form(Poly({(1, 0): 1, (1, 1): 2}))
        composite = compose_maps(phi, psi, cap)
        assert pullback(composite, omega, cap) == pullback(psi, pullback(phi, omega, cap), cap)

    def test_flow_of_level_raising_field(self):
        # v = (x y, 0): exact flow x -> x e^y
        flow = flow_map((Poly.monomial(1, 1), Poly.zero()), A1_WEIGHTS, 6)
        expected = Poly({(1, 0): 1, (1, 1): 1, (1, 2): Fraction(1, 2), (1, 3): Fraction(1, 6),
                         (1, 4): Fraction(1, 24)})
        assert flow.fx == expected
        assert flow.fy == Poly.y()

    def test_flow_rejects_linear_field(self):
        with pytest.raises(PreconditionError, match="does not raise level"):
            flow_map((Poly.x(), Poly.zero()), A1_WEIGHTS, 4)

    def test_unit_inverse(self):
        u = Poly({(0, 0): 2, (0, 1): 1})
        inv = unit_inverse(u, A1_WEIGHTS, 5)
        assert u.mul_truncated(inv, A1_WEIGHTS, 5) == Poly.one()

    def test_work_cap(self):
        assert work_cap(10, Fraction(1)) == 10
        assert work_cap(10, Fraction(1, 2)) == 22

    def test_map_must_fix_origin(self):
        with pytest.raises(MalformedInputError):
            PlaneMap(Poly.x() + 1, Poly.y(), A1_WEIGHTS, 2)

    def test_apply_map(self):
        phi = PlaneMap(Poly.monomial(1, 0, 2), Poly.y(), A1_WEIGHTS, 4)
        assert apply_map(Poly({(1, 0): 1, (0, 2): 1}), phi, 4) == Poly({(1, 0): 2, (0, 2): 1})


def _weights_of(family: str, mu: int) -> WeightSystem:
    # only the drawn family is built; C_1 has no positive weights
    table = {
        'A': lambda: WeightSystem(1, Fraction(1, mu + 1)),
        'B': lambda: WeightSystem(Fraction(1, mu), Fraction(1, 2)),
        'C': lambda: WeightSystem(Fraction(mu - 1, mu), Fraction(1, mu)),
        'F': lambda: WeightSystem(Fraction(1, 2), Fraction(1, 3)),
    }
    return table[family]()
