"""
Large-sigma limit of the 1D harmonic ground state.

For gamma <= pi the limit is the linear Gaussian. For gamma > pi it is flat, equal
to 1 on [-x_gamma, x_gamma], and for x > x_gamma solves

    mu phi = -1/2 phi'' + gamma^2 x^2/2 phi,  phi(x_gamma) = 1, phi'(x_gamma) = 0,  phi -> 0,

with x_gamma fixed by x_gamma + int_{x_gamma}^inf phi^2 = 1/2.
"""
import logging
import math
from enum import Enum
from functools import lru_cache
from typing import List, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq
from scipy.special import erfcx

from nlsground.config import settings
from nlsground.core.errors import BracketError, RegimeError
from nlsground.core.models.schemas import ShootingSolution

logger = logging.getLogger(__name__)

PROFILE_SAMPLES = 2001
MAX_BRACKET_DOUBLINGS = 60


class _Fate(Enum):
    GROWTH = "growth"
    OVER_DECAY = "over-decay"


def _crossing(x, y):
    return y[0]


_crossing.terminal = True
_crossing.direction = -1


def _turning(x, y):
    return y[1]


_turning.terminal = True
_turning.direction = 1


def _integrate(gamma: float, mu: float, x_gamma: float, dense: bool = False):
    x_max = x_gamma + 10.0 / math.sqrt(gamma) * max(1.0, math.sqrt(mu))

    def rhs(x, y):
        return [y[1], (gamma ** 2 * x ** 2 - 2.0 * mu) * y[0], y[0] ** 2]

    return solve_ivp(rhs, (x_gamma, x_max), [1.0, 0.0, 0.0], method="DOP853", rtol=1e-11,
                     atol=1e-13, events=[_crossing, _turning], dense_output=dense)


def _fate(gamma: float, mu: float, x_gamma: float) -> _Fate:
    solution = _integrate(gamma, mu, x_gamma)
    if solution.t_events[0].size:
        return _Fate.OVER_DECAY
    if solution.t_events[1].size:
        return _Fate.GROWTH
    x, phi, slope = solution.t[-1], solution.y[0, -1], solution.y[1, -1]
    decay_rate = math.sqrt(max(gamma ** 2 * x ** 2 - 2.0 * mu, 0.0))
    return _Fate.OVER_DECAY if slope < -decay_rate * phi else _Fate.GROWTH


def _bracket_mu(gamma: float, x_gamma: float) -> Tuple[float, float]:
    """Bisection on mu between a growing and an over-decaying trajectory."""
    lower = 0.5 * gamma ** 2 * x_gamma ** 2
    step = max(gamma, 1.0)
    upper = lower + step
    trace: List[Tuple[float, float]] = []
    while _fate(gamma, upper, x_gamma) is _Fate.GROWTH:
        trace.append((upper, 1.0))
        if len(trace) > MAX_BRACKET_DOUBLINGS:
            raise BracketError(f"No over-decaying trajectory found for gamma={gamma}, x_gamma={x_gamma}", trace)
        lower, step = upper, 2.0 * step
        upper = lower + step
    while upper - lower > settings.SHOOT_MU_RTOL * max(1.0, upper):
        middle = 0.5 * (lower + upper)
        if _fate(gamma, middle, x_gamma) is _Fate.GROWTH:
            lower = middle
        else:
            upper = middle
    return lower, upper


def _outer_solution(gamma: float, x_gamma: float):
    lower, upper = _bracket_mu(gamma, x_gamma)
    mu = 0.5 * (lower + upper)
    solution = _integrate(gamma, mu, x_gamma, dense=True)
    x_stop = solution.t[-1]
    phi_stop = max(solution.y[0, -1], 0.0)
    tail = phi_stop ** 2 * math.sqrt(math.pi / gamma) / 2.0 * erfcx(math.sqrt(gamma) * x_stop)
    return mu, solution, solution.y[2, -1] + tail


def _normalization_excess(gamma: float, x_gamma: float) -> float:
    _, _, mass = _outer_solution(gamma, x_gamma)
    return x_gamma + mass - 0.5


@lru_cache(maxsize=64)
def shoot_sigma_limit(gamma: float) -> ShootingSolution:
    """Solve the free-boundary problem of the large-sigma harmonic limit.

    An inner bisection on mu separates growing from over-decaying trajectories;
    an outer root search on x_gamma enforces the unit-mass condition.

    Args:
        gamma: Trap frequency, must exceed pi

    Returns:
        Plateau edge x_gamma, eigenvalue mu and the outer profile samples

    Raises:
        RegimeError: If gamma <= pi
        BracketError: If the normalization cannot be bracketed on [0, 1/2]
    """
    if gamma <= math.pi:
        raise RegimeError(f"Free-boundary limit needs gamma > pi, got {gamma}")
    excess_left = _normalization_excess(gamma, 0.0)
    excess_right = _normalization_excess(gamma, 0.5)
    if not (excess_left < 0 < excess_right):
        raise BracketError(f"Normalization not bracketed for gamma={gamma}",
                           [(0.0, excess_left), (0.5, excess_right)])
    x_gamma = brentq(lambda x: _normalization_excess(gamma, x), 0.0, 0.5, xtol=settings.SHOOT_X_TOL)
    mu, solution, mass = _outer_solution(gamma, x_gamma)

    x = np.linspace(x_gamma, solution.t[-1], PROFILE_SAMPLES)
    states = solution.sol(x)
    values = np.maximum(states[0], 0.0)
    slopes = states[1]
    for array in (x, values, slopes):
        array.flags.writeable = False
    logger.info(f"Shooting gamma={gamma}: x_gamma={x_gamma:.10f}, mu={mu:.10f}")
    return ShootingSolution(gamma=gamma, x_gamma=x_gamma, mu=mu, x=x, values=values,
                            slopes=slopes, norm_residual=x_gamma + mass - 0.5)


def sigma_limit_profile(gamma: float, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Evaluate the large-sigma limit profile: Gaussian for gamma <= pi, flat-top otherwise."""
    points = np.abs(np.asarray(x, dtype=float))
    if gamma <= math.pi:
        value = (gamma / math.pi) ** 0.25 * np.exp(-0.5 * gamma * points ** 2)
    else:
        solution = shoot_sigma_limit(gamma)
        spline = CubicHermiteSpline(solution.x, solution.values, solution.slopes)
        end = solution.x[-1]
        inside = np.clip(points, solution.x_gamma, end)
        beyond = solution.values[-1] * np.exp(-0.5 * gamma * (points ** 2 - end ** 2))
        value = np.where(points <= solution.x_gamma, 1.0,
                         np.where(points <= end, spline(inside), beyond))
    return float(value) if np.ndim(value) == 0 else value
