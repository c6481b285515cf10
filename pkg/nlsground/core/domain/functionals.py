"""
Discrete energy, chemical potential and related functionals.

All integrals use the composite midpoint rule over interior nodes with weight
prod(h); the kinetic term sums squared forward differences over every cell edge,
so it equals the quadratic form of the discrete Laplacian.
"""
import logging

import numpy as np
from scipy.optimize import brentq

from nlsground.core.domain.grid_ops import abs_power, apply_neg_laplacian, forward_differences
from nlsground.core.errors import InvalidInputError, InvalidParamsError, RegimeError
from nlsground.core.models.schemas import Grid, Params, PotentialSpec, WaveFunction

logger = logging.getLogger(__name__)


def _checked(phi: WaveFunction) -> np.ndarray:
    if not np.all(np.isfinite(phi.values)):
        raise InvalidInputError("Wave function contains non-finite values")
    return phi.values


def _checked_params(p: Params) -> None:
    if p.sigma < 0:
        raise InvalidParamsError(f"sigma must be nonnegative, got {p.sigma}")


def quad_norm_sq(phi: WaveFunction) -> float:
    """Quadrature of |phi|^2 over the grid.

    Args:
        phi: Wave function samples

    Returns:
        sum(|phi|^2) * prod(h)

    Raises:
        InvalidInputError: If the samples are not finite
    """
    values = _checked(phi)
    return float(np.sum(values ** 2) * phi.grid.cell_volume)


def normalize(phi: WaveFunction) -> WaveFunction:
    """Project ``phi`` onto the unit sphere of the discrete L2 norm."""
    norm_sq = quad_norm_sq(phi)
    if norm_sq <= 0:
        raise InvalidInputError("Cannot normalize a zero wave function")
    return phi.with_values(phi.values / np.sqrt(norm_sq))


def kinetic_energy(phi: WaveFunction) -> float:
    values = _checked(phi)
    total = sum(np.sum(diff ** 2) for diff in forward_differences(values, phi.grid))
    return float(0.5 * total * phi.grid.cell_volume)


def interaction_integral(phi: WaveFunction, sigma: float) -> float:
    """Quadrature of |phi|^(2 sigma + 2)."""
    values = _checked(phi)
    return float(np.sum(abs_power(values, 2.0 * sigma + 2.0)) * phi.grid.cell_volume)


def energy_from_samples(phi: WaveFunction, potential: np.ndarray, p: Params) -> float:
    """Energy with the potential already sampled on ``phi.grid``."""
    _checked_params(p)
    values = _checked(phi)
    potential_term = float(np.sum(potential * values ** 2) * phi.grid.cell_volume)
    interaction = p.beta / (p.sigma + 1.0) * interaction_integral(phi, p.sigma)
    return kinetic_energy(phi) + potential_term + interaction


def energy(phi: WaveFunction, V: PotentialSpec, p: Params) -> float:
    """Energy E(phi) = int 1/2|grad phi|^2 + V|phi|^2 + beta/(sigma+1)|phi|^(2 sigma+2).

    Raises:
        InvalidParamsError: If sigma is negative
        InvalidInputError: If the samples are not finite
    """
    return energy_from_samples(phi, V.sample(phi.grid), p)


def chemical_potential_from_samples(phi: WaveFunction, potential: np.ndarray, p: Params) -> float:
    gap = p.sigma * p.beta / (p.sigma + 1.0) * interaction_integral(phi, p.sigma)
    return energy_from_samples(phi, potential, p) + gap


def chemical_potential(phi: WaveFunction, V: PotentialSpec, p: Params) -> float:
    """Chemical potential mu = E + sigma*beta/(sigma+1) int |phi|^(2 sigma+2)."""
    return chemical_potential_from_samples(phi, V.sample(phi.grid), p)


def linear_chemical_potential(phi: WaveFunction, potential: np.ndarray) -> float:
    """Kinetic plus potential energy, the chemical potential of the beta=0 problem."""
    values = _checked(phi)
    return kinetic_energy(phi) + float(np.sum(potential * values ** 2) * phi.grid.cell_volume)


def residual_from_samples(phi: WaveFunction, potential: np.ndarray, p: Params, mu: float) -> float:
    values = _checked(phi)
    if not np.isfinite(mu):
        raise InvalidInputError("Chemical potential must be finite")
    residual = (0.5 * apply_neg_laplacian(values, phi.grid) + potential * values
                + p.beta * abs_power(values, 2.0 * p.sigma) * values - mu * values)
    return float(np.sqrt(np.sum(residual ** 2) * phi.grid.cell_volume))


def eigen_residual(phi: WaveFunction, V: PotentialSpec, p: Params, mu: float) -> float:
    """Discrete L2 norm of -1/2 Lap_h phi + V phi + beta|phi|^(2 sigma) phi - mu phi."""
    return residual_from_samples(phi, V.sample(phi.grid), p, mu)


def h1_distance(first: WaveFunction, second: WaveFunction) -> float:
    """Discrete H1 distance using forward differences for the gradient part."""
    if first.grid != second.grid:
        raise InvalidInputError("H1 distance needs wave functions on the same grid")
    diff = _checked(first) - _checked(second)
    gradient = sum(np.sum(d ** 2) for d in forward_differences(diff, first.grid))
    return float(np.sqrt((np.sum(diff ** 2) + gradient) * first.grid.cell_volume))


def thomas_fermi_mu(grid: Grid, V: PotentialSpec, p: Params) -> float:
    """Chemical potential of the Thomas-Fermi density ((mu - V)/beta)_+^(1/sigma) on ``grid``.

    Raises:
        RegimeError: If beta <= 0 or sigma <= 0
    """
    if p.beta <= 0 or p.sigma <= 0:
        raise RegimeError(f"Thomas-Fermi density needs beta > 0 and sigma > 0, got {p}")
    potential = V.sample(grid)
    weight = grid.cell_volume

    def mass_excess(mu: float) -> float:
        density = np.maximum(mu - potential, 0.0) / p.beta
        return float(np.sum(abs_power(density, 1.0 / p.sigma)) * weight) - 1.0

    lower = float(potential.min())
    width = max(1.0, abs(lower))
    while mass_excess(lower + width) <= 0:
        width *= 2.0
    mu = brentq(mass_excess, lower, lower + width, xtol=1e-14, rtol=1e-13)
    logger.debug(f"Grid Thomas-Fermi chemical potential {mu:.6g} for {p}")
    return float(mu)
