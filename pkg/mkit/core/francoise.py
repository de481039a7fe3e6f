"""
Iterative decomposition of a 2-form in the deformation module of f.

Each pass writes the working form as x*g dx^dy, reduces g modulo the
boundary Jacobian ideal, divides the ideal part by df and recurses on the
quotient, so that

    omega = x * sum_i c_i(f) e_i dx^dy + df ^ d(xi) + f^n * residual

holds exactly after n passes. For polynomial input the loop ends with a
zero residual.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import PreconditionError, VerificationError
from .forms import DifferentialForm, exterior_derivative, interior_euler, wedge_df
from .local_algebra import BoundaryGerm, graded_reduce
from .poly import Poly
from .series import SeriesT
from .weights import WeightSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecompositionResult:
    germ: BoundaryGerm
    c: Tuple[SeriesT, ...]
    xi: Poly
    residual: DifferentialForm
    iterations: int

    @property
    def flagged(self) -> bool:
        """True when max_order was reached before the residual vanished."""
        return not self.residual.is_zero()

    def invariants(self, order: int) -> Tuple[SeriesT, ...]:
        """The c_i padded or cut to a common order."""
        return tuple(ci.pad(order) for ci in self.c)

    def to_json(self) -> Dict:
        return {"mu": self.germ.mu,
                "basis": [[m.ex, m.ey] for m in self.germ.basis],
                "c": [ci.to_json() for ci in self.c],
                "xi": self.xi.to_json(),
                "residual": None if self.residual.is_zero() else self.residual.coefficient.to_json(),
                "iterations": self.iterations}


def euler_invert(weights: WeightSystem, rhs: DifferentialForm) -> DifferentialForm:
    """theta with L_E theta = rhs: divide x^i y^j by m1 i + m2 j + M."""
    if rhs.degree != 2:
        raise PreconditionError("euler_invert expects a 2-form")
    terms = {(i, j): c / (weights.m1 * i + weights.m2 * j + weights.M)
             for (i, j), c in rhs.coefficient.items()}
    return DifferentialForm.two_form(Poly(terms))


def homotopy_potential(pi: DifferentialForm, require_boundary: bool = False) -> Poly:
    """h with dh = pi and h(0) = 0 for a closed 1-form pi."""
    if pi.degree != 1:
        raise PreconditionError("homotopy_potential expects a 1-form")
    if not exterior_derivative(pi).is_zero():
        raise PreconditionError("not closed")
    if require_boundary and not pi.in_x_omega1_H():
        raise PreconditionError("not in xΩ¹_H")
    terms: Dict[Tuple[int, int], Fraction] = {}
    for (i, j), c in pi.dx.items():
        key = (i + 1, j)
        terms[key] = terms.get(key, 0) + c / (i + j + 1)
    for (i, j), c in pi.dy.items():
        key = (i, j + 1)
        terms[key] = terms.get(key, 0) + c / (i + j + 1)
    h = Poly(terms)
    if DifferentialForm.one_form(h.diff_x(), h.diff_y()) != pi:
        raise VerificationError("fatal invariant violation: dh differs from pi")
    if require_boundary and not h.divisible_by_x(2):
        raise VerificationError("fatal invariant violation: potential not in (x^2)")
    return h


def divide_by_df(germ: BoundaryGerm, eta: DifferentialForm) -> Tuple[DifferentialForm, Poly]:
    """Split df ^ eta = f * theta + df ^ dh."""
    if germ.boundary and not eta.in_x_omega1_H():
        raise PreconditionError("not in xΩ¹_H")
    f, w = germ.f, germ.weights
    theta = euler_invert(w, exterior_derivative(eta))
    h = homotopy_potential(eta - interior_euler(w, theta), require_boundary=germ.boundary)
    lhs = wedge_df(f, eta)
    rhs = theta.scale(f) + wedge_df(f, DifferentialForm.one_form(h.diff_x(), h.diff_y()))
    if lhs != rhs:
        raise VerificationError("fatal invariant violation: division identity failed")
    return theta, h


def _combination(germ: BoundaryGerm, c: List[SeriesT]) -> Poly:
    """sum_i c_i(f) e_i, exactly."""
    total = Poly.zero()
    for e, ci in zip(germ.basis_polys, c):
        acc = Poly.zero()
        for coeff in reversed(ci.coeffs):
            acc = acc * germ.f + coeff
        total = total + acc * e
    return total


def _normal_part(germ: BoundaryGerm, c: List[SeriesT]) -> DifferentialForm:
    comb = _combination(germ, c)
    return DifferentialForm.two_form(comb.mul_x() if germ.boundary else comb)


def _run(omega: DifferentialForm, germ: BoundaryGerm, max_order: int) -> DecompositionResult:
    if omega.degree != 2:
        raise PreconditionError("decompose expects a 2-form")
    if germ.boundary and not omega.in_x_omega2():
        raise PreconditionError("not in xΩ²")
    f = germ.f
    coeffs: List[List[Fraction]] = [[] for _ in range(germ.mu)]
    xi = Poly.zero()
    f_power = Poly.one()
    working = omega
    passes = 0
    while not working.is_zero() and passes < max_order:
        g = working.coefficient.div_x() if germ.boundary else working.coefficient
        cert = graded_reduce(g, germ)
        for i, value in enumerate(cert.c):
            coeffs[i].append(value)
        if germ.boundary:
            eta = DifferentialForm.one_form(-(cert.q.mul_x()), cert.p.mul_x(2))
        else:
            eta = DifferentialForm.one_form(-cert.q, cert.p)
        theta, h = divide_by_df(germ, eta)
        xi = xi + f_power * h
        f_power = f_power * f
        working = theta
        passes += 1
        logger.debug(f"pass {passes}: c={[str(v) for v in cert.c]}")
    if not working.is_zero():
        logger.warning(f"decomposition stopped at max_order={max_order} with a non-zero residual")
    c = tuple(SeriesT(tuple(row) if row else (Fraction(0),)) for row in coeffs)
    return DecompositionResult(germ, c, xi, working, passes)


def decompose(omega: DifferentialForm, germ: BoundaryGerm, max_order: Optional[int] = None) -> DecompositionResult:
    """Invariants c_i, potential xi and residual of omega in x Omega^2."""
    from ..config import config
    if not germ.boundary:
        raise PreconditionError("decompose needs a boundary germ; use decompose_ordinary")
    result = _run(omega, germ, config.max_order if max_order is None else max_order)
    if not verify_certificate(result, omega, germ.f):
        raise VerificationError("decomposition certificate failed")
    logger.info(f"decomposed over mu={germ.mu} in {result.iterations} passes")
    return result


def decompose_ordinary(omega: DifferentialForm, germ: BoundaryGerm, max_order: Optional[int] = None) -> DecompositionResult:
    """Boundary-free variant: ideal (f_x, f_y), no restriction on eta or xi."""
    from ..config import config
    if germ.boundary:
        raise PreconditionError("decompose_ordinary needs an ordinary germ")
    result = _run(omega, germ, config.max_order if max_order is None else max_order)
    if not verify_certificate(result, omega, germ.f):
        raise VerificationError("decomposition certificate failed")
    return result


def verify_certificate(result: DecompositionResult, omega: DifferentialForm, f: Poly) -> bool:
    """Recheck omega = normal part + df ^ d(xi) + f^n * residual exactly."""
    germ = result.germ
    if f != germ.f or len(result.c) != germ.mu:
        return False
    normal = _normal_part(germ, list(result.c))
    exact = wedge_df(f, DifferentialForm.one_form(result.xi.diff_x(), result.xi.diff_y()))
    defect = omega - normal - exact
    if not result.residual.is_zero():
        defect = defect - result.residual.scale(f ** result.iterations)
    if not defect.is_zero():
        return False
    if germ.boundary:
        return result.xi.divisible_by_x(2) and result.residual.in_x_omega2()
    return True


def normal_form(germ: BoundaryGerm, c: List[SeriesT]) -> DifferentialForm:
    """x * sum c_i(f) e_i dx^dy (without the x factor for ordinary germs)."""
    return _normal_part(germ, c)


def is_trivial(omega: DifferentialForm, germ: BoundaryGerm, max_order: Optional[int] = None) -> bool:
    """True iff omega lies in df ^ d(x Omega^0_H), i.e. every invariant vanishes."""
    runner = decompose if germ.boundary else decompose_ordinary
    result = runner(omega, germ, max_order)
    return not result.flagged and all(ci.is_zero() for ci in result.c)
