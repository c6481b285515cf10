"""
Boundary-layer profile phi_s solving phi = -1/2 phi'' + phi^(2 s + 1), phi(0) = 0, phi(inf) = 1.

The first integral 1/2 phi'^2 = G(phi) with
G(phi) = phi^(2s+2)/(s+1) + s/(s+1) - phi^2 gives x(phi) = int_0^phi dt / sqrt(2 G(t)).
The integral is taken in u = 1 - phi, where G has a double root at u = 0 that is
evaluated without cancellation.
"""
import logging
import math
from functools import lru_cache
from typing import Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from nlsground.config import settings
from nlsground.core.errors import InvalidParamsError, QuadratureError
from nlsground.core.models.schemas import LayerProfile

logger = logging.getLogger(__name__)

SERIES_TERMS = 40
SERIES_LIMIT = 0.1
EXTENSION_SPACING = 1e-2


def first_integral_gap(u: np.ndarray, sigma: float) -> np.ndarray:
    """G(1 - u), accurate for u near zero."""
    u = np.asarray(u, dtype=float)
    power = 2.0 * sigma + 2.0
    with np.errstate(divide="ignore"):
        remainder = np.expm1(power * np.log1p(-u)) + power * u
    small = power * u < SERIES_LIMIT
    if np.any(small):
        us = u[small]
        term = np.ones_like(us)
        series = np.zeros_like(us)
        for k in range(1, SERIES_TERMS + 1):
            term = term * (power - k + 1.0) / k * (-us)
            if k >= 2:
                series += term
        remainder = np.where(small, 0.0, remainder)
        remainder[small] = series
    return (remainder - (sigma + 1.0) * u ** 2) / (sigma + 1.0)


def _segment_integrals(lower: np.ndarray, upper: np.ndarray, sigma: float, order: int) -> np.ndarray:
    nodes, weights = leggauss(order)
    middle = 0.5 * (lower + upper)
    half = 0.5 * (upper - lower)
    points = middle[:, None] + half[:, None] * nodes[None, :]
    integrand = 1.0 / np.sqrt(2.0 * first_integral_gap(points, sigma))
    return half * (integrand @ weights)


@lru_cache(maxsize=32)
def solve_layer_ode(sigma: float, x_cut: float = 10.0) -> LayerProfile:
    """Tabulate the boundary-layer profile on [0, x_cut].

    Args:
        sigma: Nonlinearity power, positive
        x_cut: Right end of the returned sample table

    Returns:
        LayerProfile with samples (x, phi, phi'), the analytic slope at 0 and an
        interpolant valid for every x >= 0

    Raises:
        InvalidParamsError: If sigma <= 0 or x_cut <= 0
        QuadratureError: If the composite Gauss-Legendre error estimate is too large
    """
    if not sigma > 0 or not x_cut > 0:
        raise InvalidParamsError(f"Layer profile needs sigma > 0 and x_cut > 0, got {sigma}, {x_cut}")

    u_nodes = settings.LAYER_EPS_CUT ** np.linspace(0.0, 1.0, settings.LAYER_NODES)
    coarse = _segment_integrals(u_nodes[1:], u_nodes[:-1], sigma, 10)
    fine = _segment_integrals(u_nodes[1:], u_nodes[:-1], sigma, 20)
    error = float(np.max(np.abs(fine - coarse)))
    if not np.all(np.isfinite(fine)) or error > settings.LAYER_QUAD_TOL:
        raise QuadratureError(f"Layer quadrature error estimate {error:.3e} exceeds "
                              f"{settings.LAYER_QUAD_TOL:.1e} for sigma={sigma}")

    x = np.concatenate([[0.0], np.cumsum(fine)])
    values = 1.0 - u_nodes
    slopes = np.sqrt(2.0 * first_integral_gap(u_nodes, sigma))
    slopes[0] = math.sqrt(2.0 * sigma / (sigma + 1.0))
    interpolant = CubicHermiteSpline(x, values, slopes)
    tail_rate = 2.0 * math.sqrt(sigma)
    x_end, gap_end = float(x[-1]), float(u_nodes[-1])

    def evaluate(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        inner = interpolant(np.clip(y, 0.0, x_end))
        outer = 1.0 - gap_end * np.exp(-tail_rate * (y - x_end))
        return np.where(y <= x_end, inner, outer)

    if x_cut <= x_end:
        keep = x <= x_cut
        x, values, slopes = x[keep], values[keep], slopes[keep]
    else:
        extra = np.linspace(x_end, x_cut, max(2, int((x_cut - x_end) / EXTENSION_SPACING) + 1))[1:]
        decay = gap_end * np.exp(-tail_rate * (extra - x_end))
        extra_values = 1.0 - decay
        valid = (extra_values < 1.0) & (np.diff(np.concatenate([[values[-1]], extra_values])) > 0)
        count = int(np.argmin(valid)) if not np.all(valid) else valid.size
        x = np.concatenate([x, extra[:count]])
        values = np.concatenate([values, extra_values[:count]])
        slopes = np.concatenate([slopes, tail_rate * decay[:count]])

    for array in (x, values, slopes):
        array.flags.writeable = False
    logger.debug(f"Layer profile sigma={sigma}: {x.size} samples, quadrature table ends at x={x_end:.4f}")
    return LayerProfile(sigma=sigma, x=x, values=values, slopes=slopes,
                        slope0=math.sqrt(2.0 * sigma / (sigma + 1.0)), x_cut=x_cut, x_end=x_end,
                        tail_rate=tail_rate, interpolant=evaluate)


def layer_profile_eval(layer: LayerProfile, y: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Evaluate the layer profile, extended as an odd function to y < 0."""
    y = np.asarray(y, dtype=float)
    value = np.sign(y) * layer.interpolant(np.abs(y))
    return float(value) if np.ndim(value) == 0 else value


def layer_level_crossing(layer: LayerProfile, level: float) -> float:
    """The y >= 0 at which the layer profile reaches ``level`` in (0, 1)."""
    if not 0 < level < 1:
        raise InvalidParamsError(f"Level must lie in (0, 1), got {level}")
    upper = layer.x_end
    while layer.interpolant(upper) < level:
        upper *= 2.0
    return brentq(lambda y: float(layer.interpolant(y)) - level, 0.0, upper, xtol=1e-14)


def layer_limit_profile(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Large-sigma limit min(sin(sqrt(2) x), 1) for x >= 0, odd for x < 0."""
    x = np.asarray(x, dtype=float)
    corner = math.pi / (2.0 * math.sqrt(2.0))
    magnitude = np.where(np.abs(x) < corner, np.sin(math.sqrt(2.0) * np.abs(x)), 1.0)
    value = np.sign(x) * magnitude
    return float(value) if np.ndim(value) == 0 else value
