"""
Default computational domains.
"""
import math
from typing import Sequence, Union

from nlsground.config import settings
from nlsground.core.asymptotics.harmonic import tf_estimate
from nlsground.core.errors import InvalidParamsError
from nlsground.core.models.schemas import Grid, Params


def harmonic_half_width(dim: int, gamma: float, p: Params) -> float:
    """R = max(8/sqrt(gamma), 1.5 * sqrt(2 mu_TF)/gamma), keeping the TF support inside the box."""
    if gamma <= 0:
        raise InvalidParamsError(f"Trap frequency must be positive, got {gamma}")
    half_width = settings.HARMONIC_WIDTHS / math.sqrt(gamma)
    if p.beta > 0 and p.sigma > 0:
        tf = tf_estimate(dim, gamma, p.beta, p.sigma)
        half_width = max(half_width, settings.TF_MARGIN * tf.support_radius)
    return half_width


def harmonic_grid(dim: int, gamma: Union[float, Sequence[float]], p: Params, n: int) -> Grid:
    """Symmetric box [-R, R]^dim sized for the loosest trap direction."""
    loosest = min(gamma) if isinstance(gamma, (list, tuple)) else gamma
    half_width = harmonic_half_width(dim, loosest, p)
    return Grid.uniform(-half_width, half_width, n, dim)


def box_grid(lengths: Union[float, Sequence[float]], n: int, dim: int = 1) -> Grid:
    """The box (0, L_1) x ... x (0, L_dim)."""
    return Grid.uniform(0.0, lengths, n, dim)


def capped_points(dim: int, n: int) -> int:
    """Interior point count respecting the 2D grid cap."""
    return min(n, settings.GRID_CAP_2D) if dim == 2 else n
