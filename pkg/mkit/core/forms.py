"""
Differential forms on the plane with polynomial coefficients.

Degree 0 is a function, degree 1 is P dx + Q dy and degree 2 is g dx^dy.
The boundary H is the line {x = 0}; the membership tests below decide the
relative spaces used by the deformation module.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

from .errors import MalformedInputError, PreconditionError
from .poly import Poly
from .weights import WeightSystem


@dataclass(frozen=True)
class DifferentialForm:
    degree: int
    components: Tuple[Poly, ...]

    def __post_init__(self):
        expected = 2 if self.degree == 1 else 1
        if self.degree not in (0, 1, 2):
            raise MalformedInputError(f"form degree must be 0, 1 or 2, got {self.degree}")
        if len(self.components) != expected:
            raise MalformedInputError(f"degree {self.degree} form needs {expected} components")

    @classmethod
    def function(cls, f: Poly) -> "DifferentialForm":
        return cls(0, (f,))

    @classmethod
    def one_form(cls, p: Poly, q: Poly) -> "DifferentialForm":
        return cls(1, (p, q))

    @classmethod
    def two_form(cls, g: Poly) -> "DifferentialForm":
        return cls(2, (g,))

    @classmethod
    def zero(cls, degree: int) -> "DifferentialForm":
        return cls(degree, (Poly.zero(), Poly.zero()) if degree == 1 else (Poly.zero(),))

    @property
    def coefficient(self) -> Poly:
        """The single coefficient of a function or 2-form."""
        if self.degree == 1:
            raise MalformedInputError("a 1-form has two coefficients")
        return self.components[0]

    @property
    def dx(self) -> Poly:
        return self.components[0]

    @property
    def dy(self) -> Poly:
        return self.components[1]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def _check_same_degree(self, other: "DifferentialForm") -> None:
        if self.degree != other.degree:
            raise MalformedInputError(f"cannot combine forms of degree {self.degree} and {other.degree}")

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check_same_degree(other)
        return DifferentialForm(self.degree, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check_same_degree(other)
        return DifferentialForm(self.degree, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(self.degree, tuple(-a for a in self.components))

    def scale(self, factor) -> "DifferentialForm":
        """Multiply by a rational or by a function."""
        return DifferentialForm(self.degree, tuple(a * factor for a in self.components))

    def truncate(self, weights: WeightSystem, cap: int) -> "DifferentialForm":
        return DifferentialForm(self.degree, tuple(a.truncate(weights, cap) for a in self.components))

    # relative spaces along H = {x = 0}

    def in_x_omega0_H(self) -> bool:
        """Function in (x^2)."""
        return self.degree == 0 and self.coefficient.divisible_by_x(2)

    def in_x_omega1_H(self) -> bool:
        """1-form with dx-coefficient in (x) and dy-coefficient in (x^2)."""
        return self.degree == 1 and self.dx.divisible_by_x(1) and self.dy.divisible_by_x(2)

    def in_x_omega2(self) -> bool:
        """2-form with coefficient in (x)."""
        return self.degree == 2 and self.coefficient.divisible_by_x(1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self.degree == other.degree and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.degree, self.components))

    def to_json(self) -> Dict:
        if self.degree == 0:
            return self.coefficient.to_json()
        if self.degree == 1:
            return {"dx": self.dx.to_json(), "dy": self.dy.to_json()}
        return {"dxdy": self.coefficient.to_json()}

    @classmethod
    def from_json(cls, data) -> "DifferentialForm":
        if not isinstance(data, dict):
            raise MalformedInputError("form must be a JSON object")
        if "dxdy" in data:
            return cls.two_form(Poly.from_json(data["dxdy"]))
        if "dx" in data or "dy" in data:
            zero = {"terms": []}
            return cls.one_form(Poly.from_json(data.get("dx", zero)), Poly.from_json(data.get("dy", zero)))
        if "terms" in data:
            return cls.function(Poly.from_json(data))
        raise MalformedInputError("form must carry 'dxdy', 'dx'/'dy' or 'terms'")

    def __str__(self) -> str:
        if self.degree == 0:
            return str(self.coefficient)
        if self.degree == 1:
            return f"({self.dx}) dx + ({self.dy}) dy"
        return f"({self.coefficient}) dx^dy"


def exterior_derivative(form: DifferentialForm) -> DifferentialForm:
    if form.degree == 2:
        raise PreconditionError("top degree")
    if form.degree == 0:
        f = form.coefficient
        return DifferentialForm.one_form(f.diff_x(), f.diff_y())
    return DifferentialForm.two_form(form.dy.diff_x() - form.dx.diff_y())


def differential(f: Poly) -> DifferentialForm:
    """df as a 1-form."""
    return DifferentialForm.one_form(f.diff_x(), f.diff_y())


def wedge_df(f: Poly, eta: DifferentialForm) -> DifferentialForm:
    """df ^ eta = (f_x Q - f_y P) dx^dy."""
    if eta.degree != 1:
        raise MalformedInputError("wedge_df expects a 1-form")
    return DifferentialForm.two_form(f.diff_x() * eta.dy - f.diff_y() * eta.dx)


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """Wedge product; degrees must add up to at most 2."""
    if a.degree + b.degree > 2:
        raise PreconditionError(f"wedge of degrees {a.degree} and {b.degree} exceeds the plane")
    if a.degree == 0:
        return b.scale(a.coefficient)
    if b.degree == 0:
        return a.scale(b.coefficient)
    return DifferentialForm.two_form(a.dx * b.dy - a.dy * b.dx)


def interior_euler(weights: WeightSystem, form: DifferentialForm) -> DifferentialForm:
    """Contraction with the Euler field m1 x d/dx + m2 y d/dy."""
    if form.degree == 0:
        raise PreconditionError("cannot contract a function with a vector field")
    ex = Poly.x().scale(weights.m1)
    ey = Poly.y().scale(weights.m2)
    if form.degree == 1:
        return DifferentialForm.function(ex * form.dx + ey * form.dy)
    g = form.coefficient
    return DifferentialForm.one_form(-(ey * g), ex * g)


def interior(vector: Tuple[Poly, Poly], form: DifferentialForm) -> DifferentialForm:
    """Contraction with the vector field a d/dx + b d/dy."""
    a, b = vector
    if form.degree == 0:
        raise PreconditionError("cannot contract a function with a vector field")
    if form.degree == 1:
        return DifferentialForm.function(a * form.dx + b * form.dy)
    g = form.coefficient
    return DifferentialForm.one_form(-(b * g), a * g)
