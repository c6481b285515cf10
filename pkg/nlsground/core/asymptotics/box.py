"""
Approximations of ground states in the box (0, L_1) x ... x (0, L_d) with V = 0.
"""
import logging
import math
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad
from scipy.optimize import bisect, brentq
from scipy.special import gammaln

from nlsground.config import settings
from nlsground.core.asymptotics.layer import layer_level_crossing, solve_layer_ode
from nlsground.core.domain.functionals import energy_from_samples, normalize
from nlsground.core.errors import BracketError, InvalidParamsError, RegimeError
from nlsground.core.models.schemas import (
    BoxLimitCase,
    BoxSigmaLimit,
    BoxTfEstimate,
    BoxWeakEstimate,
    Grid,
    MatchedEstimate,
    Params,
    PlateauEstimate,
    WaveFunction,
)

logger = logging.getLogger(__name__)

BRACKET_RETRIES = 8
Lengths = Union[float, Sequence[float]]


def _lengths(L: Lengths) -> Tuple[float, ...]:
    lengths = (float(L),) if np.ndim(L) == 0 else tuple(float(v) for v in L)
    if not lengths or any(not math.isfinite(v) or v <= 0 for v in lengths):
        raise InvalidParamsError(f"Box lengths must be positive, got {L}")
    return lengths


def _amplitude(lengths: Tuple[float, ...]) -> float:
    return 1.0 / math.sqrt(math.prod(lengths))


def box_weak_estimate(L: Lengths, beta: float, sigma: float) -> BoxWeakEstimate:
    """Energy and chemical potential of the box to first order in beta.

    The first-order coefficient is the interaction integral of the product sine mode,
    2^(d(sigma+1)) A0^(2 sigma)/pi^d [Gamma(sigma+3/2) Gamma(1/2)/Gamma(sigma+2)]^d.
    """
    lengths = _lengths(L)
    if sigma < 0:
        raise InvalidParamsError(f"sigma must be nonnegative, got {sigma}")
    d = len(lengths)
    amplitude = _amplitude(lengths)
    log_bracket = gammaln(sigma + 1.5) + gammaln(0.5) - gammaln(sigma + 2.0)
    coefficient = math.exp(d * (sigma + 1.0) * math.log(2.0) + 2.0 * sigma * math.log(amplitude)
                           - d * math.log(math.pi) + d * log_bracket)
    linear = 0.5 * math.pi ** 2 * sum(1.0 / length ** 2 for length in lengths)
    return BoxWeakEstimate(energy=linear + coefficient * beta / (sigma + 1.0),
                           mu=linear + coefficient * beta, amplitude=amplitude)


def box_tf_estimate(L: Lengths, beta: float, sigma: float) -> BoxTfEstimate:
    """Constant Thomas-Fermi state A0 = 1/sqrt(prod L): E = A0^(2 sigma) beta/(sigma+1), mu = A0^(2 sigma) beta.

    Raises:
        RegimeError: If beta <= 0
    """
    lengths = _lengths(L)
    if beta <= 0:
        raise RegimeError(f"Thomas-Fermi regime requires beta > 0, got {beta}")
    amplitude = _amplitude(lengths)
    mu = amplitude ** (2.0 * sigma) * beta
    return BoxTfEstimate(energy=mu / (sigma + 1.0), mu=mu, amplitude=amplitude)


def _side_profile(layer, y: np.ndarray, span: float) -> np.ndarray:
    corner = 1.0 if span >= layer.x_end else float(layer.interpolant(span))
    return layer.interpolant(y) + layer.interpolant(span - y) - corner


def _side_mass(layer, length: float, mu: float) -> float:
    """int_0^L [phi(x sqrt mu) + phi((L - x) sqrt mu) - phi(L sqrt mu)]^2 dx."""
    span = length * math.sqrt(mu)
    integral, _ = quad(lambda y: float(_side_profile(layer, y, span)) ** 2, 0.0, 0.5 * span,
                       epsabs=1e-14, epsrel=1e-13, limit=500)
    return 2.0 * integral / math.sqrt(mu)


def matched_asymptotic(L: Lengths, beta: float, sigma: float) -> MatchedEstimate:
    """Matched boundary-layer approximation of the box ground state.

    phi_MA(x) = (mu/beta)^(1/(2 sigma)) prod_j [phi_s(x_j sqrt mu) + phi_s((L_j - x_j) sqrt mu) - phi_s(L_j sqrt mu)],
    with mu chosen by bisection so that phi_MA has unit mass.

    Raises:
        RegimeError: If beta <= 0
        BracketError: If widening the bracket around mu_TF does not reach a sign change
    """
    lengths = _lengths(L)
    tf = box_tf_estimate(lengths, beta, sigma)
    if beta < settings.MATCHED_SOFT_BETA:
        logger.warning(f"Matched asymptotics used at beta={beta} < {settings.MATCHED_SOFT_BETA}")
    layer = solve_layer_ode(sigma)

    def mass_excess(mu: float) -> float:
        sides = math.prod(_side_mass(layer, length, mu) for length in lengths)
        return (mu / beta) ** (1.0 / sigma) * sides - 1.0

    lower, upper = 0.5 * tf.mu, 2.0 * tf.mu
    trace: List[Tuple[float, float]] = []
    for _ in range(BRACKET_RETRIES):
        low_value, high_value = mass_excess(lower), mass_excess(upper)
        trace.extend([(lower, low_value), (upper, high_value)])
        if low_value < 0 < high_value:
            break
        if low_value >= 0:
            lower *= 0.5
        if high_value <= 0:
            upper *= 2.0
    else:
        raise BracketError(f"Matched chemical potential not bracketed for L={lengths}, beta={beta}", trace)

    mu = bisect(mass_excess, lower, upper, xtol=1e-300, rtol=settings.MATCHED_RTOL, maxiter=200)
    residual = mass_excess(mu)
    logger.info(f"Matched asymptotics L={lengths}, beta={beta}, sigma={sigma}: "
                f"mu_MA={mu:.10g} (mu_TF={tf.mu:.10g}), mass residual {residual:.1e}")
    return MatchedEstimate(lengths=lengths, beta=beta, sigma=sigma, mu_ma=mu, mu_tf=tf.mu,
                           amplitude=(mu / beta) ** (0.5 / sigma), norm_residual=residual,
                           layer=layer)


def matched_profile_eval(est: MatchedEstimate, *coords: np.ndarray) -> np.ndarray:
    """Evaluate phi_MA at coordinate arrays, one per box direction."""
    if len(coords) != len(est.lengths):
        raise InvalidParamsError(f"Expected {len(est.lengths)} coordinate arrays, got {len(coords)}")
    root = math.sqrt(est.mu_ma)
    value = est.amplitude
    for x, length in zip(coords, est.lengths):
        x = np.clip(np.asarray(x, dtype=float), 0.0, length)
        value = value * _side_profile(est.layer, x * root, length * root)
    return value


def matched_energy(est: MatchedEstimate, grid: Grid) -> float:
    """Energy functional of phi_MA sampled on ``grid`` and normalized there."""
    phi = normalize(WaveFunction(grid, matched_profile_eval(est, *grid.mesh())))
    return energy_from_samples(phi, np.zeros(grid.shape), Params(est.beta, est.sigma))


def boundary_layer_width(est: MatchedEstimate, level: float = 0.99) -> float:
    """Distance from the wall at which the layer profile reaches ``level``."""
    return layer_level_crossing(est.layer, level) / math.sqrt(est.mu_ma)


def fit_width_exponent(L: Lengths, sigma: float, betas: Sequence[float], level: float = 0.99) -> float:
    """Least-squares exponent p of width(beta) ~ beta^p."""
    widths = [boundary_layer_width(matched_asymptotic(L, beta, sigma), level) for beta in betas]
    slope, _ = np.polyfit(np.log(betas), np.log(widths), 1)
    return float(slope)


def box_sigma_limit(L: float, beta: float) -> BoxSigmaLimit:
    """Large-sigma limit of the 1D box ground state.

    Cases: constant 1/sqrt(L) for L <= 1 (mu ~ beta/L^(sigma+1)), sine mode for L >= 2,
    and a sine-plateau-sine profile for 1 < L < 2 with
    mu -> pi^2/(8(L-1)^2), E -> pi^2/(8(L-1)).
    """
    if not (math.isfinite(L) and L > 0):
        raise InvalidParamsError(f"Box length must be positive, got {L}")
    if beta <= 0:
        raise RegimeError(f"Large-sigma box limit requires beta > 0, got {beta}")
    if L <= 1.0:
        if L == 1.0:
            return BoxSigmaLimit(L, beta, BoxLimitCase.CONSTANT, boundary=True, divergent=False,
                                 energy=0.0, mu=beta)
        return BoxSigmaLimit(L, beta, BoxLimitCase.CONSTANT, boundary=False, divergent=True,
                             energy=None, mu=None)
    if L >= 2.0:
        value = math.pi ** 2 / (2.0 * L ** 2)
        return BoxSigmaLimit(L, beta, BoxLimitCase.SINE, boundary=L == 2.0, divergent=False,
                             energy=value, mu=value)
    return BoxSigmaLimit(L, beta, BoxLimitCase.PLATEAU, boundary=False, divergent=False,
                         energy=math.pi ** 2 / (8.0 * (L - 1.0)),
                         mu=math.pi ** 2 / (8.0 * (L - 1.0) ** 2))


def box_sigma_limit_profile(limit: BoxSigmaLimit, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Evaluate the limiting profile; zero outside (0, L)."""
    x = np.asarray(x, dtype=float)
    L = limit.length
    if limit.case == BoxLimitCase.CONSTANT:
        value = np.full_like(x, 1.0 / math.sqrt(L))
    elif limit.case == BoxLimitCase.SINE:
        value = math.sqrt(2.0 / L) * np.sin(math.pi * x / L)
    else:
        edge = L - 1.0
        value = np.where(x < edge, np.sin(math.pi * x / (2.0 * edge)),
                         np.where(x <= 1.0, 1.0, np.sin(math.pi * (L + x - 2.0) / (2.0 * edge))))
    value = np.where((x > 0) & (x < L), value, 0.0)
    return float(value) if np.ndim(value) == 0 else value


def box_sigma_approach(limit: BoxSigmaLimit, sigma: float) -> Tuple[float, float]:
    """Finite-sigma (energy, mu) predicted along the way to the limit.

    Constant case: beta/((sigma+1) L^(sigma+1)) and beta/L^(sigma+1); sine case: the
    weak-interaction expansion; plateau case: the plateau model's mu with the limiting
    energy, or both limits when the plateau model has no solution.
    """
    L, beta = limit.length, limit.beta
    if limit.case == BoxLimitCase.CONSTANT:
        mu = math.exp(math.log(beta) - (sigma + 1.0) * math.log(L))
        return mu / (sigma + 1.0), mu
    if limit.case == BoxLimitCase.SINE:
        weak = box_weak_estimate((L,), beta, sigma)
        return weak.energy, weak.mu
    try:
        plateau = box_plateau_estimate(L, beta, sigma)
    except RegimeError:
        return limit.energy, limit.mu
    return limit.energy, plateau.mu


def box_plateau_estimate(L: float, beta: float, sigma: float) -> PlateauEstimate:
    """Plateau model of the 1D box ground state at finite sigma.

    Quarter sine waves of length x_c at both walls joined by a plateau of height
    A = 1/sqrt(L - x_c); x_c solves (pi^2/(8 beta x_c^2))^(1/sigma) = 1/(L - x_c) and
    mu = pi^2/(8 x_c^2).

    Raises:
        RegimeError: If the edge equation has no root in (0, L/2)
    """
    if not (L > 0 and beta > 0 and sigma > 0):
        raise InvalidParamsError(f"Plateau model needs L, beta, sigma > 0, got {L}, {beta}, {sigma}")

    def mismatch(x_c: float) -> float:
        return math.log(math.pi ** 2 / (8.0 * beta * x_c ** 2)) / sigma + math.log(L - x_c)

    lower, upper = 1e-12 * L, 0.5 * L
    if mismatch(upper) >= 0:
        raise RegimeError(f"No plateau for L={L}, beta={beta}, sigma={sigma}")
    x_c = brentq(mismatch, lower, upper, xtol=1e-14)
    return PlateauEstimate(length=L, beta=beta, sigma=sigma, x_c=x_c,
                           amplitude=1.0 / math.sqrt(L - x_c), mu=math.pi ** 2 / (8.0 * x_c ** 2))
