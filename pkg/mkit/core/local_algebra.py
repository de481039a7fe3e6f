"""
Local algebra of a quasihomogeneous boundary singularity.

The boundary Jacobian ideal (x f_x, f_y) and the ordinary Jacobian ideal
(f_x, f_y) are graded by quasidegree, so their quotients are computed one
level at a time by exact Gaussian elimination over the monomial multiples
of the generators. Every elimination row remembers which multiples built
it, which turns a reduction into an exact cofactor certificate.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .errors import MalformedInputError, PreconditionError, VerificationError
from .poly import Monomial, Poly, monomial_order_key
from .weights import WeightSystem, parse_weights  # noqa: F401  re-exported for callers

logger = logging.getLogger(__name__)

Label = Tuple[int, Tuple[int, int]]


@dataclass
class _Row:
    pivot: Tuple[int, int]
    entries: Dict[Tuple[int, int], Fraction]
    provenance: Dict[Label, Fraction]


class GradedEchelon:
    """
    Row-reduced spans of a graded ideal with two homogeneous generators.

    Level L holds every multiple m * g_k with level(m) + level(g_k) = L.
    Within a level the pivot of a row is its monomial with the largest
    x-power, so the surviving monomials favour low powers of x.
    """

    def __init__(self, generators: Tuple[Poly, Poly], weights: WeightSystem):
        self.weights = weights
        self.generators = generators
        self.generator_levels: List[Optional[int]] = []
        for g in generators:
            low = g.lowest_level(weights)
            if low is not None and not g.is_quasihomogeneous(weights, low):
                raise PreconditionError("not quasihomogeneous in given coordinates")
            self.generator_levels.append(low)
        self._levels: Dict[int, Dict[Tuple[int, int], _Row]] = {}

    @staticmethod
    def _priority(mono: Tuple[int, int]) -> Tuple[int, int]:
        return (mono[0], -mono[1])

    def rows_at(self, level: int) -> Dict[Tuple[int, int], _Row]:
        rows = self._levels.get(level)
        if rows is None:
            rows = self._build_level(level)
            self._levels[level] = rows
        return rows

    def _build_level(self, level: int) -> Dict[Tuple[int, int], _Row]:
        rows: Dict[Tuple[int, int], _Row] = {}
        for k, (g, g_level) in enumerate(zip(self.generators, self.generator_levels)):
            if g_level is None or g_level > level:
                continue
            for (mi, mj) in self.weights.monomials_at(level - g_level):
                entries = {(i + mi, j + mj): c for (i, j), c in g.items()}
                entries, provenance = self._eliminate(rows, entries, {(k, (mi, mj)): Fraction(1)})
                if not entries:
                    continue
                pivot = max(entries, key=self._priority)
                scale = 1 / entries[pivot]
                rows[pivot] = _Row(pivot,
                                   {m: c * scale for m, c in entries.items()},
                                   {lab: c * scale for lab, c in provenance.items()})
        logger.debug(f"level {level}: {len(rows)} pivots over {len(self.weights.monomials_at(level))} monomials")
        return rows

    def _eliminate(self, rows: Dict[Tuple[int, int], _Row], entries: Dict, provenance: Dict):
        """Reduce entries against rows, highest priority column first."""
        entries = dict(entries)
        provenance = dict(provenance)
        while True:
            candidates = [m for m in entries if m in rows]
            if not candidates:
                return entries, provenance
            col = max(candidates, key=self._priority)
            factor = entries[col]
            row = rows[col]
            for m, c in row.entries.items():
                value = entries.get(m, 0) - factor * c
                if value:
                    entries[m] = value
                else:
                    entries.pop(m, None)
            for lab, c in row.provenance.items():
                value = provenance.get(lab, 0) - factor * c
                if value:
                    provenance[lab] = value
                else:
                    provenance.pop(lab, None)

    def survivors(self, level: int) -> List[Tuple[int, int]]:
        rows = self.rows_at(level)
        return [m for m in self.weights.monomials_at(level) if m not in rows]

    def reduce_piece(self, piece: Poly, level: int) -> Tuple[Dict[Tuple[int, int], Fraction], Dict[Label, Fraction]]:
        """Split a homogeneous piece as sum remainder[s] * s + sum cof[(k, m)] * m * g_k."""
        rows = self.rows_at(level)
        remainder, provenance = self._eliminate(rows, dict(piece.items()), {})
        cofactors = {lab: -c for lab, c in provenance.items()}
        return remainder, cofactors


@lru_cache(maxsize=64)
def _echelon_for(g1: Poly, g2: Poly, weights: WeightSystem) -> GradedEchelon:
    return GradedEchelon((g1, g2), weights)


def ideal_generators(f: Poly, boundary: bool) -> Tuple[Poly, Poly]:
    """(x f_x, f_y) for the boundary ideal, (f_x, f_y) for the ordinary one."""
    fx = f.diff_x()
    return (fx.mul_x() if boundary else fx), f.diff_y()


@dataclass(frozen=True)
class BoundaryGerm:
    f: Poly
    weights: WeightSystem
    mu: int
    mu1: int
    mu0: int
    basis: Tuple[Monomial, ...]
    boundary: bool = True
    stop_level: int = 0

    @property
    def echelon(self) -> GradedEchelon:
        g1, g2 = ideal_generators(self.f, self.boundary)
        return _echelon_for(g1, g2, self.weights)

    @property
    def basis_polys(self) -> List[Poly]:
        return [Poly.monomial(m.ex, m.ey) for m in self.basis]

    def to_json(self) -> Dict:
        return {"weights": self.weights.to_json(),
                "mu": self.mu, "mu1": self.mu1, "mu0": self.mu0,
                "basis": [[m.ex, m.ey] for m in self.basis],
                "boundary": self.boundary}


@dataclass(frozen=True)
class ReductionCertificate:
    """g = sum c_i e_i + p * g1 + q * g2 with (g1, g2) the germ's ideal generators."""
    c: Tuple[Fraction, ...]
    p: Poly
    q: Poly

    def check(self, g: Poly, germ: BoundaryGerm) -> bool:
        g1, g2 = ideal_generators(germ.f, germ.boundary)
        rebuilt = sum((e.scale(ci) for e, ci in zip(germ.basis_polys, self.c)), Poly.zero())
        return rebuilt + self.p * g1 + self.q * g2 == g


def detect_weights(f: Poly) -> WeightSystem:
    """Weights (m1, m2) with m1 i + m2 j = 1 on the whole support of f."""
    if f.is_zero():
        raise PreconditionError("zero function has no weights")
    if f.constant_term():
        raise PreconditionError("f(0,0) must vanish")
    rows = sorted({(i, j) for (i, j), _ in f.items()}, key=monomial_order_key)
    if len(rows) == 1:
        raise PreconditionError("underdetermined")
    solution = None
    for a_index in range(len(rows)):
        for b_index in range(a_index + 1, len(rows)):
            (i1, j1), (i2, j2) = rows[a_index], rows[b_index]
            det = i1 * j2 - i2 * j1
            if det:
                solution = (Fraction(j2 - j1, det), Fraction(i1 - i2, det))
                break
        if solution:
            break
    if solution is None:
        # all support rows on one ray: a single equation, or inconsistent ones
        raise PreconditionError("not quasihomogeneous in given coordinates")
    m1, m2 = solution
    if m1 <= 0 or m2 <= 0 or any(m1 * i + m2 * j != 1 for i, j in rows):
        raise PreconditionError("not quasihomogeneous in given coordinates")
    return WeightSystem(m1, m2)


def check_quasihomogeneous(f: Poly, weights: WeightSystem) -> None:
    if f.constant_term():
        raise PreconditionError("f(0,0) must vanish")
    if f.is_zero() or not f.is_quasihomogeneous(weights, weights.denom):
        raise PreconditionError("not quasihomogeneous in given coordinates")


def _quotient_basis(echelon: GradedEchelon, weights: WeightSystem, cap: int) -> Tuple[List[Tuple[int, int]], int]:
    width = weights.frame_margin
    last_survivor = -width
    found: List[Tuple[int, int]] = []
    for level in range(cap + 1):
        survivors = echelon.survivors(level)
        if survivors:
            found.extend(survivors)
            last_survivor = level
        if last_survivor <= level - width:
            return sorted(found, key=monomial_order_key), level
    raise PreconditionError("multiplicity not finite within cap")


def default_cap(weights: WeightSystem, quasidegree: Optional[int] = None) -> int:
    from ..config import config
    return weights.level_of(quasidegree if quasidegree is not None else config.milnor_cap_quasidegree)


def milnor_ordinary(f: Poly, weights: WeightSystem, cap: Optional[int] = None) -> BoundaryGerm:
    """The ordinary Milnor algebra O/(f_x, f_y) as a germ."""
    check_quasihomogeneous(f, weights)
    cap = default_cap(weights) if cap is None else cap
    g1, g2 = ideal_generators(f, boundary=False)
    basis, stop = _quotient_basis(_echelon_for(g1, g2, weights), weights, cap)
    mu = len(basis)
    return BoundaryGerm(f, weights, mu, mu, 0, tuple(Monomial(*m) for m in basis), boundary=False, stop_level=stop)


def boundary_order(f: Poly) -> int:
    """ord_y of f_y(0, y)."""
    restricted = f.diff_y().at_x_zero()
    for k, c in enumerate(restricted):
        if c:
            return k
    raise PreconditionError("multiplicity not finite within cap")


def milnor_boundary(f: Poly, weights: WeightSystem, cap: Optional[int] = None) -> BoundaryGerm:
    """Milnor numbers and monomial basis of O/(x f_x, f_y), with mu = mu1 + mu0 checked."""
    check_quasihomogeneous(f, weights)
    cap = default_cap(weights) if cap is None else cap
    g1, g2 = ideal_generators(f, boundary=True)
    basis, stop = _quotient_basis(_echelon_for(g1, g2, weights), weights, cap)
    mu = len(basis)
    mu1 = milnor_ordinary(f, weights, cap).mu
    mu0 = boundary_order(f)
    if mu != mu1 + mu0:
        raise VerificationError(f"fatal invariant violation: mu={mu} but mu1+mu0={mu1}+{mu0}")
    logger.info(f"milnor {f}: mu={mu} mu1={mu1} mu0={mu0} basis={basis}")
    return BoundaryGerm(f, weights, mu, mu1, mu0, tuple(Monomial(*m) for m in basis), boundary=True, stop_level=stop)


def graded_reduce(g: Poly, germ: BoundaryGerm) -> ReductionCertificate:
    """Exact certificate g = sum c_i e_i + p * g1 + q * g2, level by level."""
    echelon = germ.echelon
    index = {(m.ex, m.ey): n for n, m in enumerate(germ.basis)}
    coords = [Fraction(0)] * germ.mu
    p_terms: Dict[Tuple[int, int], Fraction] = {}
    q_terms: Dict[Tuple[int, int], Fraction] = {}
    for level, piece in sorted(g.pieces(germ.weights).items()):
        remainder, cofactors = echelon.reduce_piece(piece, level)
        for mono, c in remainder.items():
            if mono not in index:
                raise VerificationError(f"fatal invariant violation: {mono} survives outside the basis")
            coords[index[mono]] += c
        for (k, mono), c in cofactors.items():
            target = p_terms if k == 0 else q_terms
            value = target.get(mono, 0) + c
            if value:
                target[mono] = value
            else:
                target.pop(mono, None)
    return ReductionCertificate(tuple(coords), Poly(p_terms), Poly(q_terms))


FAMILIES = ('A', 'B', 'C', 'F')


def simple_boundary_germ(family: str, mu: int) -> Poly:
    """Normal forms of the simple boundary singularities."""
    family = family.upper()
    if family == 'A' and mu >= 1:
        return Poly({(1, 0): 1, (0, mu + 1): 1})
    if family == 'B' and mu >= 2:
        return Poly({(mu, 0): 1, (0, 2): 1})
    if family == 'C' and mu >= 2:
        return Poly({(1, 1): 1, (0, mu): 1})
    if family == 'F' and mu == 4:
        return Poly({(2, 0): 1, (0, 3): 1})
    raise MalformedInputError(f"no simple boundary singularity {family}{mu}")
