"""
Numerical Gagliardo-Nirenberg best constant

    C_b(d, sigma) = inf ||grad f||^(d sigma) ||f||^(2 + (2-d) sigma) / ||f||_(2 sigma+2)^(2 sigma+2),

attained by the free-space soliton. Below criticality (d sigma < 2) the soliton is the
normalized ground state of the focusing problem with V = 0 and beta = -1, reached by the
gradient flow. At and above criticality no such minimizer exists at fixed mass, so
the soliton is computed from (I - Lap_h) Q = |Q|^(2 sigma) Q by Petviashvili iteration.
"""
import logging
import math
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from nlsground.config import settings
from nlsground.core.domain.functionals import (
    interaction_integral,
    kinetic_energy,
    normalize,
    quad_norm_sq,
)
from nlsground.core.domain.grid_ops import abs_power, neg_laplacian_matrix
from nlsground.core.errors import InvalidInputError, InvalidParamsError, NotConverged
from nlsground.core.gflow.gradient_flow import solve_ground_state
from nlsground.core.models.schemas import (
    BestConstant,
    FlowConfig,
    GaussianProfile,
    Grid,
    Params,
    PotentialSpec,
    WaveFunction,
)

logger = logging.getLogger(__name__)

DEFAULT_SPACING = {1: 1.0 / 64.0, 2: 0.125}
GRADIENT_FLOW = "gradient-flow"
PETVIASHVILI = "petviashvili"


def gn_quotient(phi: WaveFunction, sigma: float) -> float:
    """Gagliardo-Nirenberg quotient of the samples, with the discrete norms of the solver.

    Invariant under f -> c f and, on the correspondingly scaled grid, under f -> f(lambda x).
    """
    if not sigma > 0:
        raise InvalidParamsError(f"sigma must be positive, got {sigma}")
    d = phi.grid.dim
    gradient_sq = 2.0 * kinetic_energy(phi)
    mass = quad_norm_sq(phi)
    power = interaction_integral(phi, sigma)
    if power <= 0:
        raise InvalidInputError("Quotient undefined for the zero function")
    log_value = (0.5 * d * sigma * math.log(gradient_sq)
                 + 0.5 * (2.0 + (2.0 - d) * sigma) * math.log(mass)
                 - math.log(power))
    return math.exp(log_value)


def _default_points(d: int, half_width: float) -> int:
    return max(3, int(round(2.0 * half_width / DEFAULT_SPACING[d])) - 1)


def _petviashvili(grid: Grid, sigma: float) -> WaveFunction:
    """Fixed point of Q = S^((2 sigma+1)/(2 sigma)) (I - Lap_h)^(-1) |Q|^(2 sigma) Q,
    S = <Q, (I - Lap_h) Q> / <Q, |Q|^(2 sigma) Q>.

    Raises:
        NotConverged: If the relative update does not fall below tolerance
    """
    operator = (sparse.identity(int(np.prod(grid.shape)), format="csr")
                + neg_laplacian_matrix(grid)).tocsc()
    lu = splu(operator)
    exponent = (2.0 * sigma + 1.0) / (2.0 * sigma)
    q = GaussianProfile(tuple([1.0] * grid.dim)).evaluate(*grid.mesh()).ravel()

    change = float("inf")
    for iteration in range(1, settings.PETVIASHVILI_MAX_ITERS + 1):
        nonlinear = abs_power(q, 2.0 * sigma) * q
        stabilizer = float(q @ (operator @ q)) / float(q @ nonlinear)
        updated = stabilizer ** exponent * lu.solve(nonlinear)
        change = float(np.max(np.abs(updated - q)) / np.max(np.abs(updated)))
        q = updated
        if change < settings.PETVIASHVILI_TOL:
            logger.debug(f"Petviashvili iteration converged in {iteration} steps, S={stabilizer:.12f}")
            return WaveFunction(grid, q.reshape(grid.shape))
    raise NotConverged(f"Petviashvili iteration stopped with relative update {change:.3e}")


def estimate_best_constant(d: int, sigma: float, half_width: float = 16.0,
                           n: Optional[int] = None) -> BestConstant:
    """Estimate C_b(d, sigma) on the box [-half_width, half_width]^d.

    Args:
        d: Dimension, 1 or 2
        sigma: Nonlinearity power
        half_width: Half width of the computational box
        n: Interior points per direction; defaults to spacing 1/64 (1D) or 1/8 (2D)

    Returns:
        The quotient evaluated on the computed soliton

    Raises:
        InvalidParamsError: If d is not 1 or 2 or sigma <= 0
        NotConverged: If the soliton computation does not converge
    """
    if d not in (1, 2):
        raise InvalidParamsError(f"Best constant is estimated for d = 1 or 2, got {d}")
    if not sigma > 0:
        raise InvalidParamsError(f"sigma must be positive, got {sigma}")
    n = n if n is not None else _default_points(d, half_width)
    grid = Grid.uniform(-half_width, half_width, n, d)

    if d * sigma < 2.0:
        start = normalize(WaveFunction(grid, GaussianProfile(tuple([1.0] * d)).evaluate(*grid.mesh())))
        result = solve_ground_state(grid, PotentialSpec.box(), Params(beta=-1.0, sigma=sigma),
                                    FlowConfig(warm_start=start))
        profile, method = result.phi, GRADIENT_FLOW
    else:
        profile, method = _petviashvili(grid, sigma), PETVIASHVILI

    value = gn_quotient(profile, sigma)
    logger.info(f"C_b(d={d}, sigma={sigma}) = {value:.8g} by {method} on [-{half_width}, {half_width}]^{d}, n={n}")
    return BestConstant(d=d, sigma=sigma, value=value, method_tag=method, half_width=half_width, n=n)
