"""Shared fixtures: seeded generators for polynomials, forms and plane maps."""

import os
import random
from fractions import Fraction

import pytest

from mkit.core.forms import DifferentialForm
from mkit.core.maps import PlaneMap
from mkit.core.poly import Poly
from mkit.core.weights import A1_WEIGHTS, WeightSystem

INPUTS_DIR = os.path.join(os.path.dirname(__file__), 'inputs')

# Table 1 germs: (family, mu)
TABLE_GERMS = ([('A', mu) for mu in range(1, 7)] +
               [('B', mu) for mu in range(2, 7)] +
               [('C', mu) for mu in range(2, 7)] +
               [('F', 4)])


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture
def inputs_dir():
    return INPUTS_DIR


def _rational(rng: random.Random, bound: int = 5) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, 3))


def _poly(rng: random.Random, max_degree: int, terms: int, min_degree: int = 0, bound: int = 5) -> Poly:
    monos = [(i, j) for i in range(max_degree + 1) for j in range(max_degree + 1 - i) if i + j >= min_degree]
    picked = rng.sample(monos, min(terms, len(monos)))
    return Poly({m: _rational(rng, bound) for m in picked})


@pytest.fixture
def random_poly(rng):
    """random_poly(max_degree, terms, min_degree=0, bound=5)"""
    def make(max_degree: int, terms: int, min_degree: int = 0, bound: int = 5) -> Poly:
        return _poly(rng, max_degree, terms, min_degree, bound)
    return make


@pytest.fixture
def random_omega_in_x(rng):
    """Sparse x g dx^dy with every monomial of quasidegree at most the given bound."""
    def make(weights: WeightSystem, max_quasidegree: int = 8, terms: int = 4) -> DifferentialForm:
        limit = weights.level_of(max_quasidegree)
        monos = [(i, j) for i in range(1, limit // weights.level_x + 1)
                 for j in range(0, limit // weights.level_y + 1)
                 if weights.level((i, j)) <= limit]
        picked = rng.sample(monos, min(terms, len(monos)))
        return DifferentialForm.two_form(Poly({m: _rational(rng) for m in picked}))
    return make


@pytest.fixture
def random_diffeo(rng):
    """
    Random polynomial map with positive diagonal linear part.

    boundary=True keeps x | x o Phi; otherwise a small y-term enters the x component.
    """
    scales = [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3)]

    def make(cap: int, boundary: bool = True, weights: WeightSystem = A1_WEIGHTS) -> PlaneMap:
        a, d = rng.choice(scales), rng.choice(scales)
        fx = Poly.monomial(1, 0, a) + _poly(rng, 2, 2, min_degree=1, bound=2).mul_x()
        fy = Poly.monomial(0, 1, d) + _poly(rng, 3, 3, min_degree=2, bound=2)
        if not boundary:
            fx = fx + Poly.monomial(0, 2, rng.choice([1, -1]))
        return PlaneMap(fx, fy, weights, cap)
    return make
