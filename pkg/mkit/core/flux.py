#!/usr/bin/env python3
"""
Numeric oracle for the period relation of the A1 pair f = x + y^2.

The half-cycle gamma(t) = {x = t - y^2, x >= 0} joins the two points of
{f = t} on the boundary line. With the canonical primitive alpha = A dy,
A(x, y) = int_0^x s c(s + y^2) ds, its period V(t) satisfies

    t V'(t) = c(t) V0(t),    V0(t) = int_gamma(t) x^2 dy - (x y / 2) dx = (4/3) t^(5/2)

so c can be read back from sampled fluxes. Everything here is double
precision Gauss-Legendre quadrature on top of the exact polynomial A.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from numpy.polynomial.legendre import leggauss

from .errors import MalformedInputError, PreconditionError
from .poly import Poly
from .series import SeriesT

logger = logging.getLogger(__name__)

PARAMETRIZATIONS = ("y", "angle")


@dataclass(frozen=True)
class FluxSample:
    t: float
    V: float
    V0: float
    Vprime: float
    residual: float
    series_residual: float
    series_gap: float

    def to_json(self) -> Dict[str, float]:
        return asdict(self)


def _require_positive(t: float) -> None:
    if not t > 0:
        raise PreconditionError(f"t must be positive, got {t}")


def _require_nodes(nodes: int) -> None:
    if nodes < 8:
        raise PreconditionError(f"at least 8 quadrature nodes needed, got {nodes}")


def canonical_primitive(c: SeriesT) -> Poly:
    """A = int_0^x s c(s + y^2) ds, so that d(A dy) = x c(f) dx^dy and A(0, y) = 0."""
    f = Poly({(1, 0): 1, (0, 2): 1})
    composed = Poly.zero()
    for coeff in reversed(c.coeffs):
        composed = composed * f + coeff
    return composed.mul_x().integrate_x()


def _half_cycle(t: float, nodes: int, parametrization: str):
    """Nodes y, weights including dy/du, and x = t - y^2 on gamma(t)."""
    u, w = leggauss(nodes)
    root = math.sqrt(t)
    if parametrization == "y":
        y = root * u
        weights = root * w
    elif parametrization == "angle":
        theta = 0.5 * math.pi * u
        y = root * np.sin(theta)
        weights = root * np.cos(theta) * 0.5 * math.pi * w
    else:
        raise PreconditionError(f"unknown parametrization {parametrization!r}")
    return t - y ** 2, y, weights


def flux_V0(t: float, nodes: Optional[int] = None) -> float:
    """Period of alpha0 = x^2 dy - (x y / 2) dx over gamma(t)."""
    from ..config import config
    nodes = config.quadrature_nodes if nodes is None else nodes
    _require_positive(t)
    _require_nodes(nodes)
    u, w = leggauss(nodes)
    root = math.sqrt(t)
    y = root * u
    x = t - y ** 2
    # along gamma dx = -2y dy
    integrand = x ** 2 + (x * y / 2) * (2 * y)
    return float(np.sum(root * w * integrand))


def flux_V(t: float, c: SeriesT, nodes: Optional[int] = None, parametrization: str = "y") -> float:
    """Period of the canonical primitive A dy over gamma(t)."""
    from ..config import config
    nodes = config.quadrature_nodes if nodes is None else nodes
    _require_positive(t)
    _require_nodes(nodes)
    x, y, weights = _half_cycle(t, nodes, parametrization)
    return float(np.sum(weights * canonical_primitive(c).evaluate_float(x, y)))


def flux_V_series(t: float, c: SeriesT) -> float:
    """Closed form (4/3) sum c_k t^(k + 5/2) / (k + 5/2)."""
    _require_positive(t)
    return (4.0 / 3.0) * sum(float(ck) * t ** (k + 2.5) / (k + 2.5) for k, ck in enumerate(c.coeffs))


def _relative_residual(t: float, derivative: float, ct: float, v0: float) -> float:
    target = ct * v0
    return abs(t * derivative - target) / max(1.0, abs(target))


def flux_sample(t: float, c: SeriesT, fd_step: float, nodes: int) -> FluxSample:
    """One grid point: quadrature and series periods with central-difference derivatives."""
    _require_positive(t)
    h = fd_step * t
    v = flux_V(t, c, nodes)
    v0 = flux_V0(t, nodes)
    vprime = (flux_V(t + h, c, nodes) - flux_V(t - h, c, nodes)) / (2 * h)
    series_prime = (flux_V_series(t + h, c) - flux_V_series(t - h, c)) / (2 * h)
    ct = float(c.evaluate_float(t))
    series_v = flux_V_series(t, c)
    return FluxSample(t=float(t), V=v, V0=v0, Vprime=vprime,
                      residual=_relative_residual(t, vprime, ct, v0),
                      series_residual=_relative_residual(t, series_prime, ct, v0),
                      series_gap=abs(v - series_v) / max(1.0, abs(series_v)))


def flux_samples(c: SeriesT, t_grid: Sequence[float], fd_step: Optional[float] = None,
                 nodes: Optional[int] = None) -> List[FluxSample]:
    from ..config import config
    fd_step = config.fd_step if fd_step is None else fd_step
    nodes = config.quadrature_nodes if nodes is None else nodes
    if config.parallel_processing and len(t_grid) > 1:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(lambda t: flux_sample(t, c, fd_step, nodes), t_grid))
    return [flux_sample(t, c, fd_step, nodes) for t in t_grid]


def check_flux_relation(c: SeriesT, t_grid: Sequence[float], fd_step: Optional[float] = None,
                        nodes: Optional[int] = None) -> float:
    """Largest relative residual of t V' = c V0 over the grid, quadrature and series forms together."""
    samples = flux_samples(c, t_grid, fd_step, nodes)
    if not samples:
        return 0.0
    worst = max(max(s.residual, s.series_residual) for s in samples)
    logger.info(f"flux relation over {len(samples)} points: max residual {worst:.3e}")
    return worst


def recover_invariant(samples: Sequence[FluxSample], order: int,
                      condition_limit: Optional[float] = None) -> np.ndarray:
    """Least-squares coefficients c_0 .. c_order from (3/4) t^(-3/2) V'(t)."""
    from ..config import config
    condition_limit = config.condition_limit if condition_limit is None else condition_limit
    if not samples or len(samples) < order + 1:
        raise PreconditionError("grid insufficient")
    t = np.array([s.t for s in samples], dtype=float)
    target = 0.75 * t ** -1.5 * np.array([s.Vprime for s in samples], dtype=float)
    design = np.vander(t, order + 1, increasing=True)
    condition = np.linalg.cond(design)
    if not np.isfinite(condition) or condition > condition_limit:
        logger.error(f"least-squares design condition {condition:.3e} exceeds {condition_limit:.1e}")
        raise PreconditionError("grid insufficient")
    coeffs, *_ = np.linalg.lstsq(design, target, rcond=None)
    return coeffs


def flux_stokes_defect(t: float, nodes: Optional[int] = None) -> float:
    """|int_gamma alpha0 - (5/2) int_{x >= 0, f <= t} x dx dy|: the cycle closes along x = 0 where alpha0 vanishes."""
    from ..config import config
    nodes = config.quadrature_nodes if nodes is None else nodes
    _require_positive(t)
    _require_nodes(nodes)
    u, w = leggauss(nodes)
    root = math.sqrt(t)
    y = root * u
    top = t - y ** 2
    # inner x-integral over [0, t - y^2] for every y node
    x = 0.5 * top[:, None] * (u[None, :] + 1.0)
    inner = np.sum(0.5 * top[:, None] * w[None, :] * x, axis=1)
    area = float(np.sum(root * w * inner))
    return abs(flux_V0(t, nodes) - 2.5 * area)


def parse_grid(text: str) -> List[float]:
    """'a:b:n' -> n equally spaced points from a to b inclusive."""
    try:
        a, b, n = text.split(":")
        start, stop, count = float(a), float(b), int(n)
    except ValueError as e:
        raise MalformedInputError(f"grid must look like a:b:n, got {text!r}") from e
    if count < 1 or start <= 0 or stop < start:
        raise MalformedInputError(f"grid must satisfy 0 < a <= b and n >= 1, got {text!r}")
    return [float(v) for v in np.linspace(start, stop, count)]


def flux_report(c: SeriesT, t_grid: Sequence[float], fd_step: Optional[float] = None,
                nodes: Optional[int] = None) -> pd.DataFrame:
    """Sample table with one row per grid point; max_residual is the largest of both residual columns."""
    samples = flux_samples(c, t_grid, fd_step, nodes)
    frame = pd.DataFrame([s.to_json() for s in samples],
                         columns=["t", "V", "V0", "Vprime", "residual", "series_residual", "series_gap"])
    frame.attrs["max_residual"] = (float(frame[["residual", "series_residual"]].to_numpy().max())
                                   if len(frame) else 0.0)
    return frame
