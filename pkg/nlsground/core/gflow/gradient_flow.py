"""
Normalized gradient flow with semi-implicit backward Euler time stepping.

Each step solves (I + dt(-1/2 Lap_h + V + beta|phi^n|^(2 sigma))) phi* = phi^n with the
nonlinear coefficient lagged at the current iterate, then projects phi* back onto the
unit sphere. 1D systems are tridiagonal (banded LU); 2D systems use the 5-point
stencil with a sparse LU or conjugate gradients.
"""
import dataclasses
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import LinAlgError, solve_banded
from scipy.sparse.linalg import cg, splu

from nlsground.config import settings
from nlsground.core.domain.functionals import (
    chemical_potential_from_samples,
    energy_from_samples,
    linear_chemical_potential,
    normalize,
    residual_from_samples,
    thomas_fermi_mu,
)
from nlsground.core.domain.grid_ops import abs_power, neg_laplacian_matrix
from nlsground.core.errors import (
    ExistenceViolation,
    InvalidInputError,
    InvalidParamsError,
    LinearSolveError,
    NotConverged,
)
from nlsground.core.models.schemas import (
    FlowConfig,
    GaussianProfile,
    Grid,
    GroundStateResult,
    Params,
    PotentialKind,
    PotentialSpec,
    WaveFunction,
)
from nlsground.core.regimes.existence import classify_existence

logger = logging.getLogger(__name__)


class BackwardEulerStepper:
    """One projected backward Euler step on a fixed grid, potential and parameter set."""

    def __init__(self, grid: Grid, potential: np.ndarray, p: Params, dt: float,
                 linear_solver: str = "direct"):
        if not dt > 0:
            raise InvalidParamsError(f"Time step must be positive, got {dt}")
        self.grid = grid
        self.potential = potential
        self.p = p
        self.dt = dt
        self.linear_solver = linear_solver
        self._frozen_coefficient = p.beta == 0 or p.sigma == 0
        self._lu = None
        self._lu_dt = None

    def coefficient(self, values: np.ndarray) -> np.ndarray:
        """Diagonal part V + beta|phi|^(2 sigma) of the operator."""
        return self.potential + self.p.beta * abs_power(values, 2.0 * self.p.sigma)

    def step(self, values: np.ndarray, dt: Optional[float] = None) -> np.ndarray:
        """Projected step of size ``dt``, the stepper's own step by default."""
        dt = self.dt if dt is None else dt
        coefficient = self.coefficient(values)
        if 1.0 + dt * float(coefficient.min()) <= 0:
            raise LinearSolveError(
                f"Shifted operator lost positivity: 1 + dt*min(V + beta|phi|^2sigma) = "
                f"{1.0 + dt * float(coefficient.min()):.3e}")
        if self.grid.dim == 1:
            raw = self._solve_tridiagonal(coefficient, values, dt)
        else:
            raw = self._solve_five_point(coefficient, values, dt)
        norm_sq = float(np.sum(raw ** 2) * self.grid.cell_volume)
        if not np.isfinite(norm_sq) or norm_sq <= 0:
            raise LinearSolveError("Time step produced a non-finite or zero iterate")
        return raw / np.sqrt(norm_sq)

    def _solve_tridiagonal(self, coefficient: np.ndarray, values: np.ndarray, dt: float) -> np.ndarray:
        h = self.grid.h[0]
        off = -0.5 * dt / h ** 2
        bands = np.zeros((3, values.size))
        bands[0, 1:] = off
        bands[1] = 1.0 + dt * (1.0 / h ** 2 + coefficient)
        bands[2, :-1] = off
        try:
            return solve_banded((1, 1), bands, values, overwrite_ab=True, check_finite=False)
        except (LinAlgError, ValueError) as e:
            raise LinearSolveError(f"Tridiagonal solve failed: {str(e)}")

    def _matrix(self, coefficient: np.ndarray, dt: float) -> sparse.csc_matrix:
        laplacian = neg_laplacian_matrix(self.grid)
        size = laplacian.shape[0]
        operator = sparse.identity(size, format="csr") + dt * (
            0.5 * laplacian + sparse.diags(coefficient.ravel()))
        return operator.tocsc()

    def _solve_five_point(self, coefficient: np.ndarray, values: np.ndarray, dt: float) -> np.ndarray:
        rhs = values.ravel()
        if self.linear_solver == "cg":
            solution, info = cg(self._matrix(coefficient, dt), rhs, x0=rhs, rtol=settings.CG_RTOL,
                                maxiter=10 * rhs.size)
            if info != 0:
                raise LinearSolveError(f"Conjugate gradients stopped with info={info}")
            return solution.reshape(values.shape)
        try:
            if self._frozen_coefficient:
                if self._lu is None or self._lu_dt != dt:
                    self._lu = splu(self._matrix(coefficient, dt))
                    self._lu_dt = dt
                lu = self._lu
            else:
                lu = splu(self._matrix(coefficient, dt))
            return lu.solve(rhs).reshape(values.shape)
        except RuntimeError as e:
            raise LinearSolveError(f"Sparse LU solve failed: {str(e)}")


def initial_guess(grid: Grid, V: PotentialSpec) -> WaveFunction:
    """Normalized Gaussian of width 1/sqrt(gamma) for traps, first box mode otherwise."""
    coords = grid.mesh()
    if V.kind in (PotentialKind.HARMONIC, PotentialKind.LATTICE):
        values = GaussianProfile(V.gammas(grid.dim)).evaluate(*coords)
    else:
        values = np.ones(grid.shape)
        for x, lo, up in zip(coords, grid.lower, grid.upper):
            values = values * np.sin(np.pi * (x - lo) / (up - lo))
    return normalize(WaveFunction(grid, values))


def default_time_step(grid: Grid, V: PotentialSpec, p: Params, start: WaveFunction) -> float:
    """Time step used when FlowConfig.dt is unset.

    min(dt_cap, 1/(1+sigma)), further limited to 1/(4 (sigma-1) mu_hat) for sigma > 1
    where mu_hat bounds the chemical potential from the start state and the grid
    Thomas-Fermi density. The lagged coefficient is unstable beyond roughly
    dt (sigma-1) mu = 1.
    """
    dt = min(settings.DT_CAP, 1.0 / (1.0 + p.sigma))
    if p.sigma <= 1:
        return dt
    mu_hat = max(1.0, linear_chemical_potential(start, V.sample(grid)))
    if p.beta > 0:
        mu_hat = max(mu_hat, thomas_fermi_mu(grid, V, p))
    return min(dt, 1.0 / (4.0 * (p.sigma - 1.0) * mu_hat))


def stable_time_step(values: np.ndarray, p: Params, dt: float) -> float:
    """Limit ``dt`` by the lagged coefficient of the current iterate.

    For sigma > 1 and beta > 0 the step satisfies
    dt (sigma-1) max beta|phi|^(2 sigma) <= STABILITY_FACTOR, so it shrinks while the
    iterate overshoots 1 and grows back as the peak settles.
    """
    if p.sigma <= 1 or p.beta <= 0:
        return dt
    stiffness = (p.sigma - 1.0) * p.beta * float(np.max(abs_power(values, 2.0 * p.sigma)))
    if stiffness <= 0:
        return dt
    return min(dt, settings.STABILITY_FACTOR / stiffness)


def ensure_solvable(dim: int, p: Params) -> None:
    """Refuse parameter sets without a ground state.

    Raises:
        ExistenceViolation: If the existence classifier rejects (dim, sigma, beta)
    """
    if p.sigma == 0:
        return
    verdict = classify_existence(dim, p.sigma, p.beta)
    if not verdict.solvable:
        raise ExistenceViolation(
            f"No ground state for d={dim}, sigma={p.sigma}, beta={p.beta} "
            f"(verdict {verdict.verdict.value}, clause {verdict.clause})")


def befd_step(phi: WaveFunction, V: PotentialSpec, p: Params, dt: float) -> WaveFunction:
    """Advance the normalized gradient flow by one backward Euler step.

    Args:
        phi: Current (normalized) iterate
        V: External potential
        p: Interaction parameters
        dt: Time step

    Returns:
        The projected new iterate, normalized to one

    Raises:
        LinearSolveError: If the shifted operator is not positive
    """
    stepper = BackwardEulerStepper(phi.grid, V.sample(phi.grid), p, dt)
    return phi.with_values(stepper.step(phi.values))


def solve_ground_state(grid: Grid, V: PotentialSpec, p: Params,
                       cfg: Optional[FlowConfig] = None) -> GroundStateResult:
    """Minimize the energy on the unit sphere by the normalized gradient flow.

    Iterates until max|phi^(n+1) - phi^n|/dt < tol, or until the update is at rounding level,
    or ``cfg.max_iters`` steps. The step is
    recomputed from the current iterate by stable_time_step; for beta >= 0 a step that
    raises the energy is rejected and retried at half the size.

    Args:
        grid: Computational grid
        V: External potential
        p: Interaction parameters
        cfg: Flow settings; defaults to FlowConfig()

    Returns:
        Converged ground state with energy, chemical potential and residual

    Raises:
        ExistenceViolation: If no ground state exists for the parameters
        NotConverged: If the iteration budget runs out or the energy keeps rising after
            repeated step halvings; ``.result`` keeps the last accepted iterate
    """
    cfg = cfg or FlowConfig()
    ensure_solvable(grid.dim, p)
    potential = V.sample(grid)

    if cfg.warm_start is not None:
        if cfg.warm_start.grid != grid:
            raise InvalidInputError("Warm start lives on a different grid")
        phi = normalize(cfg.warm_start)
    else:
        phi = initial_guess(grid, V)

    base_dt = cfg.dt if cfg.dt is not None else default_time_step(grid, V, p, phi)
    stepper = BackwardEulerStepper(grid, potential, p, base_dt, cfg.linear_solver)
    guard_energy = p.beta >= 0
    track_energy = guard_energy or cfg.record_energy
    current = energy_from_samples(phi, potential, p) if track_energy else math.nan
    trace: List[float] = [current] if cfg.record_energy else []

    values = phi.values
    converged = False
    iterations = 0
    halvings = 0
    scale = 1.0
    dt = base_dt
    change = float("inf")
    while iterations < cfg.max_iters:
        dt = scale * stable_time_step(values, p, base_dt)
        updated = stepper.step(values, dt)
        if track_energy:
            candidate = energy_from_samples(phi.with_values(updated), potential, p)
            if guard_energy and not _energy_accepted(current, candidate):
                halvings += 1
                if halvings > settings.MAX_STEP_HALVINGS:
                    result = _assemble(phi, values, potential, p, iterations, dt, trace, cfg.sign_fix)
                    logger.warning(f"Energy rises for {p} at step {iterations} even with dt={dt:.3e}")
                    raise NotConverged(
                        f"Gradient flow stopped after {iterations} steps: the energy rose after "
                        f"{settings.MAX_STEP_HALVINGS} step halvings (dt {dt:.3e})", result)
                scale *= 0.5
                continue
            current = candidate
        halvings = 0
        scale = min(1.0, 2.0 * scale)
        iterations += 1
        step_change = float(np.max(np.abs(updated - values)))
        change = step_change / dt
        values = updated
        if cfg.record_energy:
            trace.append(current)
        if iterations % settings.LOG_EVERY == 0:
            logger.debug(f"Step {iterations}: dt {dt:.3e}, update rate {change:.3e}")
        if change < cfg.tol or _stagnated(step_change, values):
            converged = True
            break

    result = _assemble(phi, values, potential, p, iterations, dt, trace, cfg.sign_fix, converged)
    if not converged:
        logger.warning(f"No convergence after {iterations} steps for {p}: update rate {change:.3e}")
        raise NotConverged(
            f"Gradient flow stopped after {iterations} steps with update rate {change:.3e} "
            f"(tol {cfg.tol:.1e})", result)
    logger.info(f"Converged in {iterations} steps for {p}: E={result.energy:.10g}, "
                f"mu={result.mu:.10g}, residual={result.residual:.2e}")
    return result


def _stagnated(step_change: float, values: np.ndarray) -> bool:
    """The update is at the rounding level of the iterate, so smaller steps cannot reduce it."""
    return step_change <= settings.STAGNATION_ULPS * np.finfo(float).eps * float(np.max(np.abs(values)))


def _energy_accepted(current: float, candidate: float) -> bool:
    """A step is kept unless the energy becomes non-finite or rises beyond rounding."""
    if not math.isfinite(candidate):
        return False
    return candidate <= current + settings.ENERGY_RISE_RTOL * max(1.0, abs(current))


def _assemble(phi: WaveFunction, values: np.ndarray, potential: np.ndarray, p: Params, iterations: int,
              dt: float, trace: List[float], sign_fix: bool, converged: bool = False) -> GroundStateResult:
    if sign_fix and values.flat[np.argmax(np.abs(values))] < 0:
        values = -values
    phi = phi.with_values(values)
    mu = chemical_potential_from_samples(phi, potential, p)
    return GroundStateResult(
        phi=phi,
        energy=energy_from_samples(phi, potential, p),
        mu=mu,
        residual=residual_from_samples(phi, potential, p, mu),
        iterations=iterations,
        converged=converged,
        params=p,
        dt=dt,
        energy_trace=trace,
    )


def continuation_sweep(grid: Grid, V: PotentialSpec, p_list: Sequence[Params],
                       cfg: Optional[FlowConfig] = None) -> List[GroundStateResult]:
    """Solve a parameter sequence, warm-starting each solve from the previous ground state.

    Non-converged items are kept with ``converged=False`` and do not abort the sweep.

    Raises:
        InvalidParamsError: If ``p_list`` is empty
        ExistenceViolation: If any item has no ground state (checked before solving)
    """
    if not p_list:
        raise InvalidParamsError("Continuation sweep needs at least one parameter set")
    cfg = cfg or FlowConfig()
    for p in p_list:
        ensure_solvable(grid.dim, p)

    results: List[GroundStateResult] = []
    warm = cfg.warm_start
    for p in p_list:
        try:
            result = solve_ground_state(grid, V, p, dataclasses.replace(cfg, warm_start=warm))
        except NotConverged as e:
            logger.warning(f"Sweep item {p} flagged: {str(e)}")
            result = e.result
        results.append(result)
        if result.converged:
            warm = result.phi
    return results
