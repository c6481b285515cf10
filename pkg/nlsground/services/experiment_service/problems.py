"""
Builders shared by the runner and the figure reproductions: grids, potentials,
flow settings, asymptotic reference columns and the solve fan-out.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from nlsground.config import settings
from nlsground.core.asymptotics.box import box_tf_estimate, box_weak_estimate
from nlsground.core.asymptotics.harmonic import tf_estimate, weak_beta_estimate
from nlsground.core.errors import NotConverged
from nlsground.core.gflow.domains import box_grid, capped_points, harmonic_half_width
from nlsground.core.gflow.gradient_flow import continuation_sweep, solve_ground_state
from nlsground.core.models.schemas import (
    FlowConfig,
    Grid,
    GroundStateResult,
    Params,
    PotentialKind,
    PotentialSpec,
)
from nlsground.services.experiment_service.run_spec import RunSpec

logger = logging.getLogger(__name__)

DEFAULT_POINTS = {1: 511, 2: settings.GRID_CAP_2D}


def flow_config(spec: RunSpec) -> FlowConfig:
    return FlowConfig(dt=spec.dt, tol=spec.tol, max_iters=spec.max_iters, linear_solver=spec.linear_solver)


def points(spec: RunSpec, dim: Optional[int] = None) -> int:
    dim = dim or spec.dim
    return capped_points(dim, spec.n or DEFAULT_POINTS[dim])


def potential_from(spec: RunSpec) -> PotentialSpec:
    if spec.potential == "box":
        return PotentialSpec.box()
    if spec.potential == "lattice":
        return PotentialSpec.lattice(tuple(spec.gamma), spec.amplitude, spec.wavenumber)
    return PotentialSpec.harmonic(tuple(spec.gamma))


def box_lengths(spec: RunSpec) -> Tuple[float, ...]:
    return tuple(spec.length) * spec.dim if len(spec.length) == 1 else tuple(spec.length)


def trap_grid(dim: int, V: PotentialSpec, params: Sequence[Params], n: int) -> Grid:
    """Symmetric grid wide enough for every parameter set of a sweep."""
    loosest = min(V.gammas(dim))
    half_width = max(harmonic_half_width(dim, loosest, p) for p in params)
    return Grid.uniform(-half_width, half_width, n, dim)


def grid_for(spec: RunSpec, V: PotentialSpec, params: Sequence[Params]) -> Grid:
    n = points(spec)
    if V.kind == PotentialKind.BOX:
        return box_grid(box_lengths(spec), n, spec.dim)
    return trap_grid(spec.dim, V, params, n)


def asymptotic_columns(V: PotentialSpec, dim: int, p: Params,
                       lengths: Sequence[float] = ()) -> Dict[str, Optional[float]]:
    """Weak-interaction and Thomas-Fermi predictions where a closed form exists."""
    columns: Dict[str, Optional[float]] = {"E_weak": None, "mu_weak": None, "E_TF": None, "mu_TF": None}
    if V.kind == PotentialKind.HARMONIC:
        gammas = V.gammas(dim)
        if len(set(gammas)) != 1:
            return columns
        weak = weak_beta_estimate(dim, gammas[0], p.beta, p.sigma)
        columns.update(E_weak=weak.energy, mu_weak=weak.mu)
        if p.beta > 0 and p.sigma > 0:
            tf = tf_estimate(dim, gammas[0], p.beta, p.sigma)
            columns.update(E_TF=tf.energy_tf, mu_TF=tf.mu_tf)
    elif V.kind == PotentialKind.BOX and lengths:
        weak = box_weak_estimate(lengths, p.beta, p.sigma)
        columns.update(E_weak=weak.energy, mu_weak=weak.mu)
        if p.beta > 0:
            tf = box_tf_estimate(lengths, p.beta, p.sigma)
            columns.update(E_TF=tf.energy, mu_TF=tf.mu)
    return columns


def _solve_one(grid: Grid, V: PotentialSpec, p: Params, cfg: FlowConfig) -> GroundStateResult:
    try:
        return solve_ground_state(grid, V, p, cfg)
    except NotConverged as e:
        logger.warning(f"Item {p} flagged: {str(e)}")
        return e.result


def solve_items(grid: Grid, V: PotentialSpec, params: Sequence[Params], cfg: FlowConfig,
                continuation: bool = True, threads: int = 1) -> List[GroundStateResult]:
    """Solve a parameter list in order.

    With continuation each solve starts from the previous ground state; otherwise the
    solves are independent and fan out to a thread pool. Results keep the input order
    and non-converged items are returned flagged.
    """
    if continuation:
        return continuation_sweep(grid, V, params, cfg)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(lambda p: _solve_one(grid, V, p, cfg), params))
