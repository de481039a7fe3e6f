"""
Truncated polynomial maps of the plane.

A PlaneMap (fx, fy) sends (x, y) to (fx(x, y), fy(x, y)). Composition,
substitution and pullback are computed with every product truncated at an
integer level cap of a WeightSystem; results are exact through that cap.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Callable, Dict, List, Optional, Tuple

from .errors import MalformedInputError, PreconditionError
from .forms import DifferentialForm
from .poly import Poly
from .weights import WeightSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlaneMap:
    fx: Poly
    fy: Poly
    weights: WeightSystem
    cap: int

    def __post_init__(self):
        if self.fx.constant_term() or self.fy.constant_term():
            raise MalformedInputError("plane maps must fix the origin")

    @classmethod
    def identity(cls, weights: WeightSystem, cap: int) -> "PlaneMap":
        return cls(Poly.x(), Poly.y(), weights, cap)

    @classmethod
    def linear(cls, a, b, c, d, weights: WeightSystem, cap: int) -> "PlaneMap":
        """(a x + b y, c x + d y)"""
        return cls(Poly({(1, 0): a, (0, 1): b}), Poly({(1, 0): c, (0, 1): d}), weights, cap)

    def linear_part(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.fx.coefficient(1, 0), self.fx.coefficient(0, 1),
                self.fy.coefficient(1, 0), self.fy.coefficient(0, 1))

    def jacobian_at_origin(self) -> Fraction:
        a, b, c, d = self.linear_part()
        return a * d - b * c

    def jacobian(self) -> Poly:
        return self.fx.diff_x() * self.fy.diff_y() - self.fx.diff_y() * self.fy.diff_x()

    def require_invertible(self) -> None:
        if self.jacobian_at_origin() == 0:
            raise PreconditionError("singular linear part")

    @property
    def boundary_preserving(self) -> bool:
        return self.fx.divisible_by_x(1)

    def truncated(self, cap: int) -> "PlaneMap":
        return PlaneMap(self.fx.truncate(self.weights, cap), self.fy.truncate(self.weights, cap), self.weights, cap)

    def compression(self) -> Fraction:
        """
        Smallest ratio level(component term) / level(variable).

        Below 1 the map lowers levels, and a composite with this map as the
        inner factor needs the outer factor through cap / compression.
        """
        ratios = []
        for comp, var_level in ((self.fx, self.weights.level_x), (self.fy, self.weights.level_y)):
            low = comp.lowest_level(self.weights)
            if low is not None:
                ratios.append(Fraction(low, var_level))
        return min(ratios, default=Fraction(1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PlaneMap):
            return NotImplemented
        return self.fx == other.fx and self.fy == other.fy

    def __hash__(self) -> int:
        return hash((self.fx, self.fy))

    def to_json(self) -> Dict:
        return {"x": self.fx.to_json(), "y": self.fy.to_json()}

    @classmethod
    def from_json(cls, data, weights: WeightSystem, cap: int) -> "PlaneMap":
        if not isinstance(data, dict) or "x" not in data or "y" not in data:
            raise MalformedInputError("map must be an object with 'x' and 'y' polynomials")
        return cls(Poly.from_json(data["x"]), Poly.from_json(data["y"]), weights, cap)

    def __str__(self) -> str:
        return f"(x, y) -> ({self.fx}, {self.fy})"


def work_cap(cap: int, compression: Fraction) -> int:
    """Level an outer factor must reach so that its composite with a compressing map is exact through cap."""
    if compression >= 1:
        return cap
    return ceil(Fraction(cap + 1) / compression)


def _power_table(p: Poly, top: int, weights: WeightSystem, cap: int) -> List[Poly]:
    table = [Poly.one()]
    for _ in range(top):
        table.append(table[-1].mul_truncated(p, weights, cap))
    return table


def substitute(p: Poly, fx: Poly, fy: Poly, weights: WeightSystem, cap: int) -> Poly:
    """p(fx, fy) truncated at level cap."""
    if p.is_zero():
        return Poly.zero()
    by_x: Dict[int, Dict[int, Fraction]] = {}
    for (i, j), c in p.items():
        by_x.setdefault(i, {})[j] = c
    top_y = max(j for row in by_x.values() for j in row)
    y_powers = _power_table(fy, top_y, weights, cap)
    result = Poly.zero()
    x_power = Poly.one()
    current = 0
    for i in sorted(by_x):
        while current < i:
            x_power = x_power.mul_truncated(fx, weights, cap)
            current += 1
        if x_power.is_zero():
            break
        inner = Poly.zero()
        for j, c in by_x[i].items():
            inner = inner + y_powers[j].scale(c)
        result = result + x_power.mul_truncated(inner, weights, cap)
    return result.truncate(weights, cap)


def apply_map(p: Poly, phi: PlaneMap, cap: int) -> Poly:
    """p o phi truncated at cap."""
    return substitute(p, phi.fx, phi.fy, phi.weights, cap)


def pullback(phi: PlaneMap, form: DifferentialForm, cap: int) -> DifferentialForm:
    """phi^* form with every coefficient truncated at level cap."""
    if cap < 0:
        raise PreconditionError("cap must be non-negative")
    phi.require_invertible()
    w = phi.weights
    if form.degree == 0:
        return DifferentialForm.function(apply_map(form.coefficient, phi, cap))
    if form.degree == 1:
        p = apply_map(form.dx, phi, cap)
        q = apply_map(form.dy, phi, cap)
        ax, ay = phi.fx.diff_x(), phi.fx.diff_y()
        bx, by = phi.fy.diff_x(), phi.fy.diff_y()
        return DifferentialForm.one_form(
            p.mul_truncated(ax, w, cap) + q.mul_truncated(bx, w, cap),
            p.mul_truncated(ay, w, cap) + q.mul_truncated(by, w, cap))
    g = apply_map(form.coefficient, phi, cap)
    return DifferentialForm.two_form(g.mul_truncated(phi.jacobian().truncate(w, cap), w, cap))


def compose_maps(outer: PlaneMap, inner: PlaneMap, cap: int) -> PlaneMap:
    """outer o inner: first inner, then outer; pullbacks compose as inner^* outer^*."""
    w = inner.weights
    return PlaneMap(substitute(outer.fx, inner.fx, inner.fy, w, cap),
                    substitute(outer.fy, inner.fx, inner.fy, w, cap), w, cap)


def _graded_fixed_point(step: Callable[[object, int], object], start, cap: int, first_cap: int = 1):
    """
    Iterate value <- step(value, level_cap) with level_cap = first_cap .. cap.

    The step must gain at least one level of accuracy per application, so
    pass k is exact through level_cap and low passes stay cheap.
    """
    value = start
    for level_cap in range(first_cap, cap + 1):
        value = step(value, level_cap)
    return value


def invert_map(phi: PlaneMap, cap: int) -> PlaneMap:
    """Psi with phi o Psi = id through cap, from Psi = L^-1 (id - N o Psi)."""
    phi.require_invertible()
    w = phi.weights
    a, b, c, d = phi.linear_part()
    det = a * d - b * c
    ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det
    linear_x = Poly({(1, 0): a, (0, 1): b})
    linear_y = Poly({(1, 0): c, (0, 1): d})
    nx, ny = phi.fx - linear_x, phi.fy - linear_y

    def apply_inverse_linear(u: Poly, v: Poly) -> Tuple[Poly, Poly]:
        return u.scale(ia) + v.scale(ib), u.scale(ic) + v.scale(id_)

    start = apply_inverse_linear(Poly.x(), Poly.y())
    if nx.is_zero() and ny.is_zero():
        return PlaneMap(start[0], start[1], w, cap)

    def step(psi: Tuple[Poly, Poly], level_cap: int) -> Tuple[Poly, Poly]:
        px, py = psi
        u = Poly.x() - substitute(nx, px, py, w, level_cap)
        v = Poly.y() - substitute(ny, px, py, w, level_cap)
        ux, uy = apply_inverse_linear(u, v)
        return ux.truncate(w, level_cap), uy.truncate(w, level_cap)

    first = min(w.level_x, w.level_y)
    px, py = _graded_fixed_point(step, start, cap, first_cap=first)
    logger.debug(f"inverted map through level {cap}")
    return PlaneMap(px, py, w, cap)


def apply_vector_field(vector: Tuple[Poly, Poly], h: Poly, weights: WeightSystem, cap: int) -> Poly:
    """v(h) = a h_x + b h_y truncated at cap."""
    a, b = vector
    return a.mul_truncated(h.diff_x(), weights, cap) + b.mul_truncated(h.diff_y(), weights, cap)


def raises_level(vector: Tuple[Poly, Poly], weights: WeightSystem) -> bool:
    a, b = vector
    low_a = a.lowest_level(weights)
    low_b = b.lowest_level(weights)
    return ((low_a is None or low_a > weights.level_x) and
            (low_b is None or low_b > weights.level_y))


def flow_map(vector: Tuple[Poly, Poly], weights: WeightSystem, cap: int) -> PlaneMap:
    """Time-one map of a level-raising vector field by the Lie series sum v^n(id)/n!."""
    if not raises_level(vector, weights):
        raise PreconditionError("vector field does not raise level")
    components = []
    for start in (Poly.x(), Poly.y()):
        total = start
        term = start
        n = 0
        while True:
            n += 1
            term = apply_vector_field(vector, term, weights, cap).scale(Fraction(1, n))
            if term.is_zero():
                break
            total = total + term
        components.append(total.truncate(weights, cap))
    return PlaneMap(components[0], components[1], weights, cap)


def unit_inverse(u: Poly, weights: WeightSystem, cap: int) -> Poly:
    """1/u through cap for u(0) != 0, by the geometric series in u/u(0) - 1."""
    u0 = u.constant_term()
    if u0 == 0:
        raise PreconditionError("not a unit")
    rest = u.scale(1 / u0) - 1
    result = Poly.one()
    term = Poly.one()
    while True:
        term = -term.mul_truncated(rest, weights, cap)
        if term.is_zero():
            break
        result = result + term
    return result.scale(1 / u0).truncate(weights, cap)


def scaling_map(sx, sy, weights: WeightSystem, cap: int) -> PlaneMap:
    """(sx x, sy y)"""
    return PlaneMap(Poly.monomial(1, 0, sx), Poly.monomial(0, 1, sy), weights, cap)


def map_identity_defect(phi: PlaneMap, psi: PlaneMap, cap: int) -> Optional[int]:
    """Lowest level where phi o psi differs from the identity, or None through cap."""
    comp = compose_maps(phi, psi, cap)
    dx = comp.fx - Poly.x()
    dy = comp.fy - Poly.y()
    levels = [lvl for lvl in (dx.lowest_level(phi.weights), dy.lowest_level(phi.weights)) if lvl is not None]
    return min(levels) if levels else None
