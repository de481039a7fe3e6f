#!/usr/bin/env python3
"""
Coordinate normalizations for Martinet pairs and Morse functions.

The boundary pipeline takes a Martinet 2-form omega = g dx^dy and a function
f that is regular at 0 with a Morse restriction to {g = 0}, and builds a
map P with

    P^*(kappa X dX^dY) = omega,    (X + s Y^2) o P = psi(f / k)

exactly through a level cap. Every map is built with rational arithmetic:
the orientation constant kappa and the scale k are reported instead of
being absorbed by irrational rescalings.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .base import PipelineStage
from .errors import PreconditionError, VerificationError
from .forms import DifferentialForm
from .francoise import decompose, decompose_ordinary
from .local_algebra import BoundaryGerm, graded_reduce, milnor_boundary, milnor_ordinary
from .maps import (PlaneMap, apply_map, compose_maps, flow_map, invert_map, pullback,
                   scaling_map, substitute, unit_inverse, work_cap, _graded_fixed_point)
from .poly import Poly
from .rational import format_rational, rational_sqrt, sign
from .series import SeriesT, compose_series, revert, series_power
from .weights import A1_WEIGHTS, MORSE_WEIGHTS, WeightSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalizationResult:
    """
    A Morse normalizer Phi with its series.

    psi, w and v are kept at the internal order used to build the map; order
    is the reporting order N.
    """
    map: PlaneMap
    psi: SeriesT
    w: SeriesT
    v: SeriesT
    c: SeriesT
    cap: int
    order: int
    sign: int = 1

    def to_json(self) -> Dict:
        n = self.order
        return {"phi": self.map.to_json(),
                "psi": self.psi.pad(n).to_json(),
                "w": self.w.pad(n).to_json(),
                "v": self.v.pad(n).to_json(),
                "c": self.c.pad(n).to_json(),
                "sign": "+1" if self.sign > 0 else "-1",
                "cap": self.cap}


@dataclass(frozen=True)
class BoundaryNormalization:
    """f o map = scale * (x + sign * y^2) with map boundary-preserving."""
    map: PlaneMap
    sign: int
    scale: Fraction


@dataclass(frozen=True)
class MorseNormalization:
    """f o map = a x^2 + b y^2."""
    map: PlaneMap
    a: Fraction
    b: Fraction


def a1_form(s: int) -> Poly:
    """x + s y^2"""
    return Poly({(1, 0): 1, (0, 2): s})


def morse_form(a, b) -> Poly:
    return Poly({(2, 0): a, (0, 2): b})


def solve_vey_ode(c: SeriesT) -> SeriesT:
    """w with (2/5) t w' + w = c and w(0) = 1: w_k = 5 c_k / (5 + 2k)."""
    if c[0] != 1:
        raise PreconditionError("invariant not normalized")
    return SeriesT(tuple(Fraction(5) * ck / (5 + 2 * k) for k, ck in enumerate(c.coeffs)))


def build_morse_normalizer(c: SeriesT, cap: int, s: int = 1, order: Optional[int] = None) -> NormalizationResult:
    """Phi = (x v(f), y sqrt(v(f))) with f = x + s y^2 and v = w^(2/5)."""
    weights = A1_WEIGHTS
    order = c.order if order is None else order
    internal = max(cap // 2 + 1, order)
    cc = c.pad(internal)
    w = solve_vey_ode(cc)
    v = series_power(w, Fraction(2, 5))
    root = series_power(v, Fraction(1, 2))
    psi = SeriesT((Fraction(0),) + v.coeffs)
    fhat = a1_form(s)
    full = cap + weights.frame_margin
    phi = PlaneMap(compose_series(v, fhat, full, weights).mul_x().truncate(weights, full),
                   Poly.y().mul_truncated(compose_series(root, fhat, full, weights), weights, full),
                   weights, full)
    source = DifferentialForm.two_form(Poly.x())
    expected = compose_series(cc, fhat, cap, weights).mul_x().truncate(weights, cap)
    if pullback(phi, source, cap).coefficient != expected:
        raise VerificationError("fatal invariant violation: Phi^*(x dx^dy) differs from x c(f) dx^dy")
    if apply_map(fhat, phi, cap) != compose_series(psi, fhat, cap, weights):
        raise VerificationError("fatal invariant violation: f o Phi differs from psi(f)")
    logger.info(f"morse normalizer through level {cap} for c={c}")
    return NormalizationResult(phi, psi, w, v, cc, cap, order, s)


def build_ordinary_normalizer(c: SeriesT, a, b, cap: int, order: Optional[int] = None) -> NormalizationResult:
    """
    Phi = (x r(f), y r(f)) with f = a x^2 + b y^2, r = sqrt(v) and (t v)' = c / c(0).

    Phi^*(c(0) dx^dy) = c(f) dx^dy and f o Phi = phi(f) with phi = t v.
    The returned w slot holds the normalized invariant c / c(0).
    """
    weights = MORSE_WEIGHTS
    if c[0] == 0:
        raise PreconditionError("invariant not normalized")
    order = c.order if order is None else order
    full = cap + weights.frame_margin
    internal = max(full // 2 + 1, order)
    c0 = c[0]
    chat = c.pad(internal).scale(1 / c0)
    v = SeriesT(tuple(ck / (k + 1) for k, ck in enumerate(chat.coeffs)))
    root = series_power(v, Fraction(1, 2))
    phi_series = SeriesT((Fraction(0),) + v.coeffs)
    fhat = morse_form(a, b)
    r = compose_series(root, fhat, full, weights)
    phi = PlaneMap(Poly.x().mul_truncated(r, weights, full), Poly.y().mul_truncated(r, weights, full), weights, full)
    expected = compose_series(c.pad(internal), fhat, cap, weights)
    if pullback(phi, DifferentialForm.two_form(Poly.const(c0)), cap).coefficient != expected:
        raise VerificationError("fatal invariant violation: Phi^*(c0 dx^dy) differs from c(f) dx^dy")
    if apply_map(fhat, phi, cap) != compose_series(phi_series, fhat, cap, weights):
        raise VerificationError("fatal invariant violation: f o Phi differs from phi(f)")
    return NormalizationResult(phi, phi_series, chat, v, c.pad(internal), cap, order, sign(a * b))


def flatten_martinet_curve(g: Poly, cap: int, weights: WeightSystem = A1_WEIGHTS) -> PlaneMap:
    """
    Map Theta with x o Theta = g and positive Jacobian at 0.

    New coordinates are (g, +-y) when g_x(0) != 0 and (g, -+x) otherwise.
    """
    if g.constant_term():
        raise PreconditionError("omega does not vanish at 0")
    gx0, gy0 = g.coefficient(1, 0), g.coefficient(0, 1)
    if gx0 == 0 and gy0 == 0:
        raise PreconditionError("not a Martinet point")
    g = g.truncate(weights, cap)
    if gx0 != 0:
        return PlaneMap(g, Poly.monomial(0, 1, sign(gx0)), weights, cap)
    return PlaneMap(g, Poly.monomial(1, 0, -sign(gy0)), weights, cap)


def martinet_frame(g: Poly, cap: int) -> PlaneMap:
    """Flattening map for the Martinet coefficient g, or the identity when g is already in (x)."""
    weights = A1_WEIGHTS
    if g.constant_term():
        raise PreconditionError("omega does not vanish at 0")
    if g.coefficient(1, 0) == 0 and g.coefficient(0, 1) == 0:
        raise PreconditionError("not a Martinet point")
    if g.divisible_by_x(1):
        return PlaneMap.identity(weights, cap)
    # g is kept whole: the push-forward reads it above cap
    return flatten_martinet_curve(g, max(cap, g.highest_level(weights)), weights)


def push_forward(theta: PlaneMap, omega: DifferentialForm, f: Poly,
                 form_cap: int) -> Tuple[DifferentialForm, Poly]:
    """(N^* omega, f o N) for N the inverse of theta: omega through form_cap, f a frame margin higher."""
    weights = theta.weights
    map_cap = form_cap + weights.frame_margin
    if theta == PlaneMap.identity(weights, map_cap):
        return omega.truncate(weights, form_cap), f.truncate(weights, map_cap)
    inverse = invert_map(theta, map_cap)
    omega1 = pullback(inverse, omega, form_cap)
    f1 = apply_map(f, inverse, map_cap)
    if not omega1.in_x_omega2():
        raise VerificationError("fatal invariant violation: flattened omega not in x Omega^2")
    return omega1, f1


def normalize_A1_boundary(f: Poly, cap: int) -> BoundaryNormalization:
    """Boundary-preserving Phi with f o Phi = k (x + s y^2) through cap."""
    weights = A1_WEIGHTS
    if f.constant_term():
        raise PreconditionError("f(0,0) must vanish")
    b = f.coefficient(1, 0)
    if b == 0:
        raise PreconditionError("f not regular")
    restricted = f.at_x_zero() + [Fraction(0)] * (cap + 3)
    if restricted[1] != 0:
        raise PreconditionError("restriction not critical")
    a = restricted[2]
    if a == 0:
        raise PreconditionError("restriction not Morse")

    # one-variable Morse lemma: f(0, z(y)) = a y^2
    ratio = SeriesT(tuple(restricted[k + 2] / a for k in range(cap + 1)))
    half = series_power(ratio, Fraction(1, 2))
    z = revert(SeriesT((Fraction(0),) + half.coeffs[:cap]))
    new_y = Poly.from_univariate(z.coeffs, 'y')

    g = substitute(f, Poly.x(), new_y, weights, cap)
    rest = g - Poly.monomial(0, 2, a)
    if not rest.divisible_by_x(1):
        raise VerificationError("fatal invariant violation: restriction not reduced to a y^2")
    e = rest.div_x()
    b = e.constant_term()

    def step(x_map: Poly, level_cap: int) -> Poly:
        unit = substitute(e, x_map, Poly.y(), weights, level_cap)
        return unit_inverse(unit, weights, level_cap).mul_x().scale(b).truncate(weights, level_cap)

    new_x = _graded_fixed_point(step, Poly.x(), cap, first_cap=weights.level_x)
    straight = PlaneMap(new_x, new_y, weights, cap)
    if apply_map(f, straight, cap) != Poly({(1, 0): b, (0, 2): a}).truncate(weights, cap):
        raise VerificationError("fatal invariant violation: f not reduced to b x + a y^2")

    s = sign(a)
    root = rational_sqrt(abs(a))
    if root is not None:
        scaling, k = scaling_map(1 / b, 1 / root, weights, cap), Fraction(1)
    else:
        scaling, k = scaling_map(abs(a) / b, 1, weights, cap), abs(a)
    phi = compose_maps(straight, scaling, cap)
    if apply_map(f, phi, cap) != a1_form(s).scale(k).truncate(weights, cap):
        raise VerificationError("fatal invariant violation: f o Phi differs from k (x + s y^2)")
    return BoundaryNormalization(phi, s, k)


def normalize_morse(f: Poly, cap: int) -> MorseNormalization:
    """N with f o N = a x^2 + b y^2 through cap, by a rational diagonalization and graded corrections."""
    weights = MORSE_WEIGHTS
    if f.constant_term():
        raise PreconditionError("f(0,0) must vanish")
    if f.coefficient(1, 0) or f.coefficient(0, 1):
        raise PreconditionError("f not critical")
    qa, qb, qc = f.coefficient(2, 0), f.coefficient(1, 1), f.coefficient(0, 2)
    if 4 * qa * qc - qb * qb == 0:
        raise PreconditionError("f not Morse")
    if qa != 0:
        linear = PlaneMap.linear(1, -qb / (2 * qa), 0, 1, weights, cap)
        a, b = qa, qc - qb * qb / (4 * qa)
    elif qc != 0:
        linear = PlaneMap.linear(1, 0, -qb / (2 * qc), 1, weights, cap)
        a, b = -qb * qb / (4 * qc), qc
    else:
        linear = PlaneMap.linear(1, 1, -1, 1, weights, cap)
        a, b = -qb, qb
    fhat = morse_form(a, b)
    germ = milnor_ordinary(fhat, weights)
    current = linear
    for _ in range(cap + 1):
        rest = apply_map(f, current, cap) - fhat
        low = rest.lowest_level(weights)
        if low is None:
            return MorseNormalization(current, a, b)
        cert = graded_reduce(rest.piece(weights, low), germ)
        if any(cert.c):
            raise VerificationError("fatal invariant violation: Morse correction left a constant")
        correction = PlaneMap(Poly.x() - cert.p, Poly.y() - cert.q, weights, cap)
        current = compose_maps(current, correction, cap)
    raise VerificationError("Morse normalization did not converge")


def trivialize_deformation(c: SeriesT, omega: DifferentialForm, germ: BoundaryGerm, cap: int) -> PlaneMap:
    """
    Map Phi preserving f (and H for boundary germs) with Phi^* omega0 = omega through cap.

    omega0 is x c(f) dx^dy, or c(f) dx^dy for an ordinary germ. Each pass
    decomposes the defect omega - Phi^* omega0 as df ^ d(zeta) and composes
    Phi with the time-one flow of the field v with v _| omega0 = -zeta df.
    """
    weights = germ.weights
    fhat = germ.f
    full = cap + weights.frame_margin
    base = compose_series(c, fhat, full, weights)
    base_inverse = unit_inverse(base, weights, full)
    coefficient = base.mul_x() if germ.boundary else base
    omega0 = DifferentialForm.two_form(coefficient.truncate(weights, full))
    target = omega.truncate(weights, cap)
    fx, fy = fhat.diff_x(), fhat.diff_y()
    runner = decompose if germ.boundary else decompose_ordinary
    phi = PlaneMap.identity(weights, full)
    for attempt in range(cap + 2):
        defect = target - pullback(phi, omega0, cap)
        if defect.is_zero():
            logger.debug(f"trivialized through level {cap} after {attempt} corrections")
            return phi
        split = runner(defect, germ, max_order=cap + 2)
        if split.flagged or any(not ci.is_zero() for ci in split.c):
            raise VerificationError("deformation is not trivial")
        zeta = split.xi.div_x() if germ.boundary else split.xi
        factor = zeta.mul_truncated(base_inverse, weights, full)
        field_ = (-factor.mul_truncated(fy, weights, full), factor.mul_truncated(fx, weights, full))
        phi = compose_maps(phi, flow_map(field_, weights, full), full)
    raise VerificationError("trivialization did not converge")


@dataclass(frozen=True)
class PairInvariants:
    """Invariants of a Martinet pair read off the decomposition."""
    c: SeriesT
    kappa: Fraction
    sign: int
    scale: Fraction
    psi: SeriesT
    order: int

    @property
    def psi_total(self) -> SeriesT:
        """psi(t / k): the series with (X + s Y^2) o P = psi_total(f)."""
        return self.psi.substitute_scale(1 / self.scale)

    @property
    def psi_hat(self) -> SeriesT:
        """psi_total normalized to derivative 1 at 0."""
        total = self.psi_total
        return total.scale(1 / total[1])

    @property
    def modulus(self) -> Fraction:
        return self.kappa ** 2 / self.scale ** 5

    @property
    def orientation(self) -> int:
        return sign(self.kappa)


@dataclass(frozen=True)
class PairNormalization:
    map: PlaneMap
    invariants: PairInvariants
    normalizer: NormalizationResult
    cap: int

    @property
    def psi(self) -> SeriesT:
        return self.invariants.psi_total.pad(self.invariants.order)

    def to_json(self) -> Dict:
        inv = self.invariants
        report = self.normalizer.to_json()
        report.update({"phi": self.map.to_json(),
                       "psi": self.psi.to_json(),
                       "psi_hat": inv.psi_hat.pad(inv.order).to_json(),
                       "c": inv.c.pad(inv.order).to_json(),
                       "sign": "+1" if inv.sign > 0 else "-1",
                       "kappa": format_rational(inv.kappa),
                       "scale": format_rational(inv.scale),
                       "modulus": format_rational(inv.modulus),
                       "cap": self.cap})
        return report


class PairNormalizer(PipelineStage):
    """Brings a Martinet pair (omega, f) to (kappa x dx^dy, x + s y^2) up to the series psi."""

    def __init__(self, omega: DifferentialForm, f: Poly, cap: Optional[int] = None, order: Optional[int] = None):
        super().__init__()
        from ..config import config
        if omega.degree != 2:
            raise PreconditionError("omega must be a 2-form")
        self.weights = A1_WEIGHTS
        self.omega = omega
        self.f = f - f.constant_term()
        self.order = config.normal_form_order if order is None else order
        self.cap = (self.weights.level_of(self.order + config.normalizer_headroom)
                    if cap is None else cap)
        self.margin = self.weights.frame_margin

    # stages

    def _flatten(self) -> PlaneMap:
        return martinet_frame(self.omega.coefficient, self.cap)

    def _stage_chain(self, form_cap: int, theta: PlaneMap):
        omega1, f1 = self.run_stage('push_forward', push_forward, theta, self.omega, self.f, form_cap)
        bn = self.run_stage('normalize_function', normalize_A1_boundary, f1, form_cap + self.margin)
        omega2 = pullback(bn.map, omega1, form_cap)
        germ = milnor_boundary(a1_form(bn.sign), self.weights)
        split = self.run_stage('decompose', decompose, omega2, germ, form_cap + 2)
        valid = (form_cap - 2) // 2
        c = split.c[0].pad(valid)
        if c[0] == 0:
            raise PreconditionError("omega is not Martinet", 'decompose')
        return bn, omega2, germ, c

    def _invariants_from(self, c: SeriesT, bn: BoundaryNormalization, order: int) -> PairInvariants:
        kappa = c[0]
        chat = c.scale(1 / kappa)
        v = series_power(solve_vey_ode(chat), Fraction(2, 5))
        psi = SeriesT((Fraction(0),) + v.coeffs)
        return PairInvariants(c, kappa, bn.sign, bn.scale, psi, order)

    def invariants(self) -> PairInvariants:
        """c, kappa, s, k and psi through the requested order, without building maps."""
        theta = self.run_stage('flatten', self._flatten)
        form_cap = 2 * self.order + 4
        bn, _, _, c = self._stage_chain(form_cap, theta)
        return self._invariants_from(c, bn, self.order)

    def run(self) -> PairNormalization:
        """Full pipeline with the composite map and its final verification."""
        theta = self.run_stage('flatten', self._flatten)
        full = self.cap + self.margin
        target = work_cap(full, theta.compression())
        form_cap = target + 2 * self.margin
        bn, omega2, germ, c = self._stage_chain(form_cap, theta)
        inv = self._invariants_from(c, bn, self.order)

        trivial = self.run_stage('trivialize', trivialize_deformation, c, omega2, germ, target)
        chat = self.run_stage('rescale', c.scale, 1 / inv.kappa)
        morse = self.run_stage('morse_normalizer', build_morse_normalizer, chat, target, bn.sign, self.order)

        outer = compose_maps(morse.map, trivial, target)
        outer = compose_maps(outer, invert_map(bn.map, target), target)
        if theta == PlaneMap.identity(self.weights, self.cap):
            composite = outer.truncated(full)
        else:
            composite = compose_maps(outer, theta, full)
        self.run_stage('verify', self._verify, composite, inv)
        self.log('info', f"normalized pair through level {self.cap}: kappa={inv.kappa} s={inv.sign} k={inv.scale}")
        return PairNormalization(composite, inv, morse, self.cap)

    def _verify(self, composite: PlaneMap, inv: PairInvariants) -> None:
        verify_pair_normalization(composite, inv, self.omega, self.f, self.cap)


def verify_pair_normalization(composite: PlaneMap, inv: PairInvariants, omega: DifferentialForm,
                              f: Poly, cap: int, form_cap: Optional[int] = None) -> None:
    """
    Raise unless P^*(kappa x dx^dy) = omega through form_cap (default cap)
    and (x + s y^2) o P = psi(f / k) through cap.
    """
    weights = composite.weights
    form_cap = cap if form_cap is None else form_cap
    model = DifferentialForm.two_form(Poly.monomial(1, 0, inv.kappa))
    if pullback(composite, model, form_cap) != omega.truncate(weights, form_cap):
        raise VerificationError("pullback of kappa x dx^dy does not reproduce omega")
    f = f - f.constant_term()
    if apply_map(a1_form(inv.sign), composite, cap) != compose_series(inv.psi_total, f, cap, weights):
        raise VerificationError("pullback of x + s y^2 does not reproduce psi(f)")


def normalize_pair(omega: DifferentialForm, f: Poly, cap: Optional[int] = None,
                   order: Optional[int] = None) -> PairNormalization:
    """Composite normalizing map P and psi for a Martinet pair with A1 boundary function."""
    return PairNormalizer(omega, f, cap, order).run()


@dataclass(frozen=True)
class OrdinaryInvariants:
    """Invariants of a pair with omega(0) != 0 and f Morse, in the frame where f = a x^2 + b y^2."""
    c: SeriesT
    a: Fraction
    b: Fraction
    order: int

    @property
    def phi(self) -> SeriesT:
        """Primitive of c vanishing at 0."""
        return self.c.integral()

    @property
    def phi_hat(self) -> SeriesT:
        return self.phi.scale(1 / self.c[0])

    @property
    def modulus(self) -> Fraction:
        return self.c[0] ** 2 / (self.a * self.b)

    @property
    def sign(self) -> int:
        return sign(self.a * self.b)


@dataclass(frozen=True)
class OrdinaryNormalization:
    map: PlaneMap
    invariants: OrdinaryInvariants
    normalizer: NormalizationResult
    cap: int


def _ordinary_chain(omega: DifferentialForm, f: Poly, form_cap: int):
    weights = MORSE_WEIGHTS
    if omega.degree != 2:
        raise PreconditionError("omega must be a 2-form")
    if omega.coefficient.constant_term() == 0:
        raise PreconditionError("omega vanishes at 0")
    morse = normalize_morse(f - f.constant_term(), form_cap + weights.frame_margin)
    omega1 = pullback(morse.map, omega, form_cap)
    germ = milnor_ordinary(morse_form(morse.a, morse.b), weights)
    split = decompose_ordinary(omega1, germ, form_cap + 2)
    return morse, omega1, germ, split.c[0].pad(form_cap // 2)


def ordinary_invariants(omega: DifferentialForm, f: Poly, order: int) -> OrdinaryInvariants:
    """c through the requested order for omega(0) != 0 and f Morse."""
    morse, _, _, c = _ordinary_chain(omega, f, 2 * order + 2)
    return OrdinaryInvariants(c, morse.a, morse.b, order)


def normalize_ordinary_pair(omega: DifferentialForm, f: Poly, cap: int, order: int) -> OrdinaryNormalization:
    """P with P^*(c(0) dx^dy) = omega and (a x^2 + b y^2) o P = phi(f) through cap, phi = t v."""
    weights = MORSE_WEIGHTS
    margin = weights.frame_margin
    target = cap + margin
    form_cap = target + 2 * margin
    morse, omega1, germ, c = _ordinary_chain(omega, f, form_cap)
    trivial = trivialize_deformation(c, omega1, germ, target)
    model = build_ordinary_normalizer(c, morse.a, morse.b, target, order)
    outer = compose_maps(model.map, trivial, target)
    composite = compose_maps(outer, invert_map(morse.map, target), target)
    source = DifferentialForm.two_form(Poly.const(c[0]))
    if pullback(composite, source, cap) != omega.truncate(weights, cap):
        raise VerificationError("pullback of c(0) dx^dy does not reproduce omega")
    f0 = f - f.constant_term()
    if apply_map(morse_form(morse.a, morse.b), composite, cap) != compose_series(model.psi, f0, cap, weights):
        raise VerificationError("pullback of a x^2 + b y^2 does not reproduce phi(f)")
    logger.info(f"ordinary pair normalized through level {cap}: a={morse.a} b={morse.b}")
    return OrdinaryNormalization(composite, OrdinaryInvariants(c, morse.a, morse.b, order), model, cap)
