#!/usr/bin/env python3
"""
Classification of singular Lagrangian germs L = (alpha, f) on the plane.

Up to diffeomorphism, gauge shifts alpha -> alpha + d(xi) and f -> f + const,
a generic germ is one of four normal forms:

    LNF0  omega(0) != 0, f regular
    LNF1  omega(0) != 0, f Morse                     invariant phi
    LNF2  omega Martinet, f regular on the curve     sign
    LNF3  omega Martinet, f regular, f|curve Morse   invariant psi, sign

where omega = d(alpha). Anything else is reported as NONGENERIC.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional

from .base import PipelineStage
from .errors import MalformedInputError, PreconditionError
from .forms import DifferentialForm, differential, exterior_derivative
from .maps import PlaneMap, apply_map, pullback
from .normalizer import (PairNormalizer, martinet_frame, normalize_ordinary_pair,
                         ordinary_invariants, push_forward)
from .poly import Poly
from .rational import format_rational, sign
from .series import SeriesT

logger = logging.getLogger(__name__)

# level cap of the flattened frame used for the restriction tests
RESTRICTION_CAP = 4


class ClassTag(str, Enum):
    LNF0 = "LNF0"
    LNF1 = "LNF1"
    LNF2 = "LNF2"
    LNF3 = "LNF3"
    NONGENERIC = "NONGENERIC"


@dataclass(frozen=True)
class LagrangianGerm:
    """The pair of potentials (alpha, f) of a Lagrangian linear in velocities."""
    alpha: DifferentialForm
    f: Poly

    def __post_init__(self):
        if self.alpha.degree != 1:
            raise MalformedInputError("alpha must be a 1-form")

    @property
    def omega(self) -> DifferentialForm:
        return exterior_derivative(self.alpha)

    def to_json(self) -> Dict:
        return {"alpha": self.alpha.to_json(), "f": self.f.to_json()}

    @classmethod
    def from_json(cls, data) -> "LagrangianGerm":
        if not isinstance(data, dict) or "alpha" not in data or "f" not in data:
            raise MalformedInputError("germ must be an object with 'alpha' and 'f'")
        return cls(DifferentialForm.from_json(data["alpha"]), Poly.from_json(data["f"]))


@dataclass(frozen=True)
class GenericityConditions:
    omega_nonzero: bool
    martinet: bool
    f_regular: bool
    f_morse: bool
    restriction_critical: Optional[bool] = None
    restriction_morse: Optional[bool] = None

    def to_json(self) -> Dict[str, Optional[bool]]:
        return {"omega_nonzero": self.omega_nonzero,
                "martinet": self.martinet,
                "f_regular": self.f_regular,
                "f_morse": self.f_morse,
                "restriction_critical": self.restriction_critical,
                "restriction_morse": self.restriction_morse}


@dataclass
class ClassificationReport:
    class_tag: ClassTag
    conditions: GenericityConditions
    sign: Optional[int] = None
    invariant: Optional[SeriesT] = None
    modulus: Optional[Fraction] = None
    normalizer: Optional[PlaneMap] = None
    reason: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict:
        return {"class": self.class_tag.value,
                "sign": None if self.sign is None else ("+1" if self.sign > 0 else "-1"),
                "invariant": None if self.invariant is None else self.invariant.to_json(),
                "modulus": None if self.modulus is None else format_rational(self.modulus),
                "normalizer": None if self.normalizer is None else self.normalizer.to_json(),
                "conditions": self.conditions.to_json(),
                "reason": self.reason,
                "details": self.details}


def _hessian_nondegenerate(f: Poly) -> bool:
    a, b, c = f.coefficient(2, 0), f.coefficient(1, 1), f.coefficient(0, 2)
    return 4 * a * c - b * b != 0


def _restricted_germ(omega: DifferentialForm, f: Poly, cap: int = RESTRICTION_CAP):
    """omega and f in the flattened frame where the Martinet curve is {x = 0}."""
    theta = martinet_frame(omega.coefficient, cap)
    return push_forward(theta, omega, f, cap)


def genericity_check(alpha: DifferentialForm, f: Poly) -> GenericityConditions:
    """Evaluate every test the normal forms depend on at the origin."""
    omega = exterior_derivative(alpha)
    g = omega.coefficient
    f = f - f.constant_term()
    omega_nonzero = g.constant_term() != 0
    martinet = not omega_nonzero and (g.coefficient(1, 0) != 0 or g.coefficient(0, 1) != 0)
    f_regular = f.coefficient(1, 0) != 0 or f.coefficient(0, 1) != 0
    f_morse = not f_regular and _hessian_nondegenerate(f)
    critical = morse = None
    if martinet:
        _, flat_f = _restricted_germ(omega, f)
        restricted = flat_f.at_x_zero() + [Fraction(0)] * 3
        critical = restricted[1] == 0
        morse = critical and restricted[2] != 0
    return GenericityConditions(omega_nonzero, martinet, f_regular, f_morse, critical, morse)


def gauge_reduce(alpha: DifferentialForm, xi: Poly) -> DifferentialForm:
    """alpha + d(xi): same omega, same classification."""
    return alpha + differential(xi)


def pullback_germ(germ: LagrangianGerm, phi: PlaneMap, cap: int) -> LagrangianGerm:
    """(phi^* alpha, f o phi) truncated at cap."""
    return LagrangianGerm(pullback(phi, germ.alpha, cap), apply_map(germ.f, phi, cap))


class LagrangianClassifier(PipelineStage):
    """Dispatches a germ to its normal form and computes the matching invariant."""

    def __init__(self, germ: LagrangianGerm, cap: Optional[int] = None, order: Optional[int] = None,
                 with_normalizer: bool = False):
        super().__init__()
        from ..config import config
        self.germ = germ
        self.f = germ.f - germ.f.constant_term()
        self.omega = germ.omega
        self.order = config.normal_form_order if order is None else order
        self.cap = cap
        self.with_normalizer = with_normalizer

    def classify(self) -> ClassificationReport:
        conditions = self.run_stage('genericity', genericity_check, self.germ.alpha, self.f)
        if conditions.omega_nonzero:
            if conditions.f_regular:
                report = ClassificationReport(ClassTag.LNF0, conditions)
            elif conditions.f_morse:
                report = self.run_stage('lnf1', self._ordinary, conditions)
            else:
                report = self._nongeneric(conditions, "f critical and not Morse")
        elif conditions.martinet:
            if not conditions.f_regular:
                report = self._nongeneric(conditions, "f critical at a Martinet point")
            elif not conditions.restriction_critical:
                report = self.run_stage('lnf2', self._fold, conditions)
            elif conditions.restriction_morse:
                report = self.run_stage('lnf3', self._martinet_pair, conditions)
            else:
                report = self._nongeneric(conditions, "restriction to the Martinet curve degenerate")
        else:
            report = self._nongeneric(conditions, "codimension > 2")
        self.log('info', f"classified as {report.class_tag.value}")
        return report

    def _nongeneric(self, conditions: GenericityConditions, reason: str) -> ClassificationReport:
        return ClassificationReport(ClassTag.NONGENERIC, conditions, reason=reason)

    def _ordinary(self, conditions: GenericityConditions) -> ClassificationReport:
        if self.with_normalizer:
            cap = self.cap if self.cap is not None else 2 * self.order + 2
            result = normalize_ordinary_pair(self.omega, self.f, cap, self.order)
            inv, normalizer = result.invariants, result.map
        else:
            inv, normalizer = ordinary_invariants(self.omega, self.f, self.order), None
        return ClassificationReport(ClassTag.LNF1, conditions, sign=inv.sign,
                                    invariant=inv.phi_hat.pad(self.order), modulus=inv.modulus,
                                    normalizer=normalizer,
                                    details={"c": inv.c.pad(self.order).to_json(),
                                             "a": format_rational(inv.a), "b": format_rational(inv.b)})

    def _fold(self, conditions: GenericityConditions) -> ClassificationReport:
        # orientation of the Martinet coefficient fixed to positive before reading the sign
        omega1, f1 = _restricted_germ(self.omega, self.f)
        kappa = omega1.coefficient.coefficient(1, 0)
        slope = f1.coefficient(0, 1)
        if kappa < 0:
            slope = -slope
        if slope == 0:
            raise PreconditionError("restriction not regular")
        return ClassificationReport(ClassTag.LNF2, conditions, sign=-sign(slope),
                                    details={"kappa": format_rational(abs(kappa))})

    def _martinet_pair(self, conditions: GenericityConditions) -> ClassificationReport:
        normalizer = PairNormalizer(self.omega, self.f, self.cap, self.order)
        normalizer_map = None
        if self.with_normalizer:
            result = normalizer.run()
            inv, normalizer_map = result.invariants, result.map
        else:
            inv = normalizer.invariants()
        return ClassificationReport(ClassTag.LNF3, conditions, sign=inv.sign,
                                    invariant=inv.psi_hat.pad(self.order), modulus=inv.modulus,
                                    normalizer=normalizer_map,
                                    details={"c": inv.c.pad(self.order).to_json(),
                                             "kappa": format_rational(inv.kappa),
                                             "scale": format_rational(inv.scale),
                                             "orientation": inv.orientation})


def classify(germ: LagrangianGerm, cap: Optional[int] = None, order: Optional[int] = None,
             with_normalizer: bool = False) -> ClassificationReport:
    """Normal form tag, sign, invariant series and genericity record of a germ."""
    return LagrangianClassifier(germ, cap, order, with_normalizer).classify()
