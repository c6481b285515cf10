"""
Approximations of ground states in an isotropic harmonic trap V = gamma^2 |x|^2 / 2.

    weak interaction   E = d gamma/2 + beta/(sigma+1)^((d+2)/2) (gamma/pi)^(d sigma/2)
                       mu = d gamma/2 + beta/(sigma+1)^(d/2) (gamma/pi)^(d sigma/2)
    Thomas-Fermi       phi = ((mu - gamma^2 |x|^2/2)/beta)_+^(1/(2 sigma))
    attractive limit   eps = |beta|^(-1/(2 - d sigma)), rescaled coupling -1
"""
import dataclasses
import logging
import math
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import betaln

from nlsground.config import settings
from nlsground.core.domain.functionals import normalize
from nlsground.core.errors import ExistenceViolation, InvalidParamsError, RegimeError
from nlsground.core.gflow.gradient_flow import solve_ground_state
from nlsground.core.models.schemas import (
    FlowConfig,
    GaussianProfile,
    Grid,
    GroundStateResult,
    HarmonicWeakEstimate,
    Params,
    PotentialSpec,
    TfEstimate,
    WaveFunction,
)

logger = logging.getLogger(__name__)

UNIT_BALL_VOLUME = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


def _check_dimension(d: int) -> None:
    if d not in UNIT_BALL_VOLUME:
        raise InvalidParamsError(f"Dimension must be 1, 2 or 3, got {d}")


def weak_beta_estimate(d: int, gamma: float, beta: float, sigma: float) -> HarmonicWeakEstimate:
    """Energy and chemical potential to first order in beta.

    Args:
        d: Dimension
        gamma: Trap frequency
        beta: Interaction strength
        sigma: Nonlinearity power

    Returns:
        The two-term expansions and the Gaussian linear ground state
    """
    _check_dimension(d)
    if gamma <= 0 or sigma < 0:
        raise InvalidParamsError(f"Need gamma > 0 and sigma >= 0, got gamma={gamma}, sigma={sigma}")
    overlap = (gamma / math.pi) ** (d * sigma / 2.0)
    linear = d * gamma / 2.0
    return HarmonicWeakEstimate(
        energy=linear + beta / (sigma + 1.0) ** ((d + 2) / 2.0) * overlap,
        mu=linear + beta / (sigma + 1.0) ** (d / 2.0) * overlap,
        profile=GaussianProfile(tuple([float(gamma)] * d)),
    )


def tf_estimate(d: int, gamma: float, beta: float, sigma: float) -> TfEstimate:
    """Thomas-Fermi chemical potential and energy.

    mu_TF = (beta^(1/sigma) gamma^d / (2^(d/2-1) d C_d B(d/2, 1+1/sigma)))^(1/(d/2+1/sigma)),
    E_TF = (2 + d sigma)/(2 sigma + 2 + d sigma) mu_TF, with C_d the unit-ball volume.

    Raises:
        RegimeError: If beta <= 0
    """
    _check_dimension(d)
    if beta <= 0:
        raise RegimeError(f"Thomas-Fermi regime requires beta > 0, got {beta}")
    if gamma <= 0 or sigma <= 0:
        raise InvalidParamsError(f"Need gamma > 0 and sigma > 0, got gamma={gamma}, sigma={sigma}")
    log_denominator = ((d / 2.0 - 1.0) * math.log(2.0) + math.log(d)
                       + math.log(UNIT_BALL_VOLUME[d]) + betaln(d / 2.0, 1.0 + 1.0 / sigma))
    log_mu = (math.log(beta) / sigma + d * math.log(gamma) - log_denominator) / (d / 2.0 + 1.0 / sigma)
    mu = math.exp(log_mu)
    ratio = (2.0 + d * sigma) / (2.0 * sigma + 2.0 + d * sigma)
    return TfEstimate(d=d, gamma=gamma, beta=beta, sigma=sigma, mu_tf=mu,
                      energy_tf=ratio * mu, support_radius=math.sqrt(2.0 * mu) / gamma)


def tf_profile_eval(est: TfEstimate, x: Union[float, Sequence[float], np.ndarray]) -> Union[float, np.ndarray]:
    """Thomas-Fermi amplitude at ``x``; zero on and outside the support radius.

    For d > 1, ``x`` is a point (or an array of points along the last axis).
    """
    points = np.asarray(x, dtype=float)
    radius = np.abs(points) if est.d == 1 else np.sqrt(np.sum(points ** 2, axis=-1))
    fraction = np.clip(1.0 - (radius / est.support_radius) ** 2, 0.0, None)
    value = (est.mu_tf / est.beta) ** (0.5 / est.sigma) * fraction ** (0.5 / est.sigma)
    return float(value) if np.ndim(value) == 0 else value


def tf_profile_norm_sq(est: TfEstimate) -> float:
    """Radial quadrature of the squared Thomas-Fermi profile."""
    surface = est.d * UNIT_BALL_VOLUME[est.d]
    integral, _ = quad(lambda t: t ** (est.d - 1) * (1.0 - t * t) ** (1.0 / est.sigma), 0.0, 1.0,
                       epsabs=1e-14, epsrel=1e-13, limit=200)
    return surface * est.support_radius ** est.d * (est.mu_tf / est.beta) ** (1.0 / est.sigma) * integral


def attractive_epsilon(d: int, sigma: float, beta: float) -> float:
    """Length scale eps = |beta|^(-1/(2 - d sigma)) of the strongly attractive problem.

    Raises:
        ExistenceViolation: If d*sigma >= 2
    """
    if beta >= 0:
        raise InvalidParamsError(f"Attractive limit needs beta < 0, got {beta}")
    if d * sigma >= 2:
        raise ExistenceViolation(f"No attractive ground state for d*sigma = {d * sigma} >= 2")
    return abs(beta) ** (-1.0 / (2.0 - d * sigma))


def attractive_limit_solve(sigma: float, beta: float, grid: Optional[Grid] = None,
                           V: Optional[PotentialSpec] = None,
                           cfg: Optional[FlowConfig] = None) -> GroundStateResult:
    """Ground state of the rescaled attractive problem.

    phi_eps(x) = eps^(d/2) phi(eps x) minimizes
    int 1/2|grad phi|^2 + eps^2 V(eps x)|phi|^2 - 1/(sigma+1)|phi|^(2 sigma+2),
    which for a harmonic trap is the eps^4 V form. The result lives in rescaled
    variables; map it back with ``rescale_to_physical``.
    """
    grid = grid or Grid.uniform(-settings.ATTRACTIVE_HALF_WIDTH, settings.ATTRACTIVE_HALF_WIDTH,
                                settings.ATTRACTIVE_POINTS)
    V = V or PotentialSpec.harmonic(1.0)
    eps = attractive_epsilon(grid.dim, sigma, beta)
    if cfg is None or cfg.warm_start is None:
        start = normalize(WaveFunction(grid, GaussianProfile(tuple([1.0] * grid.dim)).evaluate(*grid.mesh())))
        cfg = FlowConfig(warm_start=start) if cfg is None else dataclasses.replace(cfg, warm_start=start)
    logger.info(f"Attractive limit: beta={beta}, sigma={sigma}, eps={eps:.6g}")
    return solve_ground_state(grid, V.rescaled(eps), Params(beta=-1.0, sigma=sigma), cfg)


def rescale_to_physical(phi_eps: WaveFunction, eps: float) -> WaveFunction:
    """phi(x) = eps^(-d/2) phi_eps(x/eps) on the correspondingly scaled grid."""
    grid = phi_eps.grid
    return WaveFunction(grid.scaled(eps), phi_eps.values * eps ** (-grid.dim / 2.0))
