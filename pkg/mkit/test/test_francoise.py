"""Decomposition omega = x sum c_i(f) e_i dx^dy + df ^ d(xi) and its certificates."""

from fractions import Fraction

import pytest

from mkit.core.errors import PreconditionError
from mkit.core.forms import DifferentialForm, differential, wedge_df
from mkit.core.francoise import (decompose, decompose_ordinary, divide_by_df, is_trivial, normal_form,
                                 verify_certificate)
from mkit.core.local_algebra import detect_weights, milnor_boundary, milnor_ordinary, simple_boundary_germ
from mkit.core.poly import Poly
from mkit.core.series import SeriesT

from .conftest import TABLE_GERMS


def _germ(family, mu):
    f = simple_boundary_germ(family, mu)
    return milnor_boundary(f, detect_weights(f))


@pytest.fixture
def a1_germ():
    return _germ('A', 1)


def test_worked_example(a1_germ):
    # x (1 + y) dx^dy over x + y^2: c = (1), xi = -x^2 / 4
    omega = DifferentialForm.two_form(Poly({(1, 0): 1, (1, 1): 1}))
    result = decompose(omega, a1_germ, 8)
    assert [ci.trimmed() for ci in result.c] == [SeriesT.of([1])]
    assert result.xi == Poly.monomial(2, 0, Fraction(-1, 4))
    assert not result.flagged
    assert result.to_json()["c"] == [["1"]]


def test_f_power_needs_two_passes(a1_germ):
    f = a1_germ.f
    omega = DifferentialForm.two_form(f.mul_x())
    result = decompose(omega, a1_germ)
    assert result.c[0].trimmed() == SeriesT.of([0, 1])
    assert result.xi.is_zero()


@pytest.mark.parametrize("family,mu", TABLE_GERMS)
def test_random_certificates(family, mu, random_omega_in_x):
    germ = _germ(family, mu)
    for _ in range(20):
        omega = random_omega_in_x(germ.weights, 8, 4)
        result = decompose(omega, germ)
        assert not result.flagged
        assert verify_certificate(result, omega, germ.f)
        assert result.xi.divisible_by_x(2)


def test_normal_forms_are_fixed_points(rng):
    for _ in range(50):
        germ = _germ(*rng.choice(TABLE_GERMS))
        c = [SeriesT.of([Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(rng.randint(1, 3))])
             for _ in range(germ.mu)]
        omega = normal_form(germ, c)
        result = decompose(omega, germ)
        assert [ci.trimmed() for ci in result.c] == [ci.trimmed() for ci in c]
        assert result.xi.is_zero()


def test_exact_shift_changes_only_xi(rng, random_poly):
    for _ in range(20):
        germ = _germ(*rng.choice(TABLE_GERMS))
        c = [SeriesT.of([Fraction(rng.randint(-5, 5))]) for _ in range(germ.mu)]
        g = random_poly(2, 3).mul_x(2)
        omega = normal_form(germ, c) + wedge_df(germ.f, differential(g))
        result = decompose(omega, germ)
        assert [ci.trimmed() for ci in result.c] == [ci.trimmed() for ci in c]
        assert result.xi == g


def test_torsion_free(rng, random_poly):
    # pairs built from xi first: df ^ d(xi) carries no invariant
    for family, mu in [('A', 2), ('B', 3), ('C', 3), ('F', 4)]:
        germ = _germ(family, mu)
        xi = random_poly(3, 4).mul_x(2)
        assert is_trivial(wedge_df(germ.f, differential(xi)), germ)


def test_max_order_flags_residual(a1_germ):
    omega = DifferentialForm.two_form(a1_germ.f.mul_x())
    result = decompose(omega, a1_germ, max_order=1)
    assert result.flagged
    assert result.iterations == 1
    assert verify_certificate(result, omega, a1_germ.f)


def test_tampered_certificate_fails(a1_germ):
    omega = DifferentialForm.two_form(Poly({(1, 0): 1, (1, 1): 1}))
    result = decompose(omega, a1_germ)
    forged = type(result)(result.germ, (SeriesT.of([2]),), result.xi, result.residual, result.iterations)
    assert not verify_certificate(forged, omega, a1_germ.f)


def test_requires_x_factor(a1_germ):
    with pytest.raises(PreconditionError, match="not in xΩ²"):
        decompose(DifferentialForm.two_form(Poly.y()), a1_germ)


def test_division_identity(a1_germ):
    eta = DifferentialForm.one_form(Poly.monomial(1, 1), Poly.monomial(2, 0))
    theta, h = divide_by_df(a1_germ, eta)
    f = a1_germ.f
    assert wedge_df(f, eta) == theta.scale(f) + wedge_df(f, differential(h))


@pytest.mark.parametrize("eta,theta,h", [
    (DifferentialForm.one_form(Poly.monomial(1, 0, Fraction(-1, 2)), Poly.zero()),
     Poly.zero(), Poly.monomial(2, 0, Fraction(-1, 4))),
    (DifferentialForm.one_form(Poly.zero(), Poly.monomial(2, 1)),
     Poly.monomial(1, 1, Fraction(2, 3)), Poly.monomial(2, 2, Fraction(1, 6))),
    (DifferentialForm.one_form(Poly.monomial(2, 0), Poly.zero()),
     Poly.zero(), Poly.monomial(3, 0, Fraction(1, 3))),
])
def test_division_by_df_values(a1_germ, eta, theta, h):
    got_theta, got_h = divide_by_df(a1_germ, eta)
    assert got_theta == DifferentialForm.two_form(theta)
    assert got_h == h
    assert got_h.divisible_by_x(2)


def test_ordinary_decomposition():
    f = Poly({(2, 0): 1, (0, 2): 1})
    germ = milnor_ordinary(f, detect_weights(f))
    omega = DifferentialForm.two_form(Poly({(0, 0): 1, (2, 0): 3, (0, 2): 3, (1, 1): 1}))
    result = decompose_ordinary(omega, germ)
    assert verify_certificate(result, omega, f)
    assert result.c[0].trimmed() == SeriesT.of([1, 3])


def test_decompose_rejects_ordinary_germ():
    f = Poly({(2, 0): 1, (0, 2): 1})
    with pytest.raises(PreconditionError):
        decompose(DifferentialForm.two_form(Poly.x()), milnor_ordinary(f, detect_weights(f)))
