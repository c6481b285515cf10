"""
Data tables behind the regime figures: solver values next to their asymptotic
predictions, profiles and 2D grid dumps. No plotting.
"""
import logging
import math
from typing import Callable, Dict, List, Sequence

import numpy as np

from nlsground.core.asymptotics.box import (
    box_plateau_estimate,
    box_sigma_approach,
    box_sigma_limit,
    box_sigma_limit_profile,
    matched_asymptotic,
    matched_energy,
)
from nlsground.core.asymptotics.harmonic import weak_beta_estimate
from nlsground.core.asymptotics.layer import layer_limit_profile, layer_profile_eval, solve_layer_ode
from nlsground.core.asymptotics.sigma_limit import shoot_sigma_limit, sigma_limit_profile
from nlsground.core.errors import RegimeError, UsageError
from nlsground.core.gflow.domains import box_grid, capped_points
from nlsground.core.models.schemas import GroundStateResult, Params, PotentialSpec
from nlsground.core.regimes.bifurcation import bifurcation_scan, plateau_width
from nlsground.services.experiment_service.problems import (
    asymptotic_columns,
    flow_config,
    points,
    solve_items,
    trap_grid,
)
from nlsground.services.experiment_service.run_spec import RunSpec
from nlsground.services.experiment_service.writers import ResultWriter

logger = logging.getLogger(__name__)

LARGE_SIGMAS = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
SCAN_SIGMAS = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
PATTERN_SIGMAS = (0.0, 4.0, 16.0)
FIG_2D_POINTS = 129


def _solve(spec: RunSpec, grid, V, params: Sequence[Params]) -> List[GroundStateResult]:
    return solve_items(grid, V, params, flow_config(spec), spec.continuation, spec.threads)


def _profile_rows(result: GroundStateResult, **fixed) -> List[Dict[str, float]]:
    x = result.phi.grid.axes()[0]
    return [dict(fixed, sigma=result.params.sigma, x=float(a), phi=float(v))
            for a, v in zip(x, result.phi.values)]


def _converged(results: Sequence[GroundStateResult]) -> bool:
    return all(result.converged for result in results)


def fig1(spec: RunSpec, writer: ResultWriter) -> bool:
    """Harmonic trap, gamma=3, sigma=2: energy across the weak and strong regimes."""
    V = PotentialSpec.harmonic(3.0)
    params = [Params(float(beta), 2.0) for beta in np.logspace(-2, 3, 25)]
    results = _solve(spec, trap_grid(1, V, params, points(spec, 1)), V, params)
    rows = []
    for result in results:
        estimates = asymptotic_columns(V, 1, result.params)
        rows.append({"beta": result.params.beta, "E_solver": result.energy,
                     "E_weak": estimates["E_weak"], "E_TF": estimates["E_TF"],
                     "mu_solver": result.mu, "mu_weak": estimates["mu_weak"],
                     "mu_TF": estimates["mu_TF"], "converged": result.converged})
    writer.table("fig1", rows)
    return _converged(results)


def fig2(spec: RunSpec, writer: ResultWriter) -> bool:
    """Harmonic ground states for growing sigma below (gamma=3) and above (gamma=6) pi."""
    profiles, peaks, converged = [], [], True
    for gamma in (3.0, 6.0):
        V = PotentialSpec.harmonic(gamma)
        params = [Params(1.0, s) for s in SCAN_SIGMAS]
        grid = trap_grid(1, V, params, points(spec, 1))
        report = bifurcation_scan(grid, V, 1.0, SCAN_SIGMAS, flow_config(spec))
        for result in report.results:
            rows = _profile_rows(result, gamma=gamma)
            limit = sigma_limit_profile(gamma, np.array([row["x"] for row in rows]))
            for row, value in zip(rows, limit):
                row["phi_limit"] = float(value)
            profiles.extend(rows)
        for sigma, peak, width, distance in zip(report.sigma_list, report.peak_values,
                                                report.plateau_widths, report.linear_distances):
            peaks.append({"gamma": gamma, "sigma": sigma, "peak": peak, "plateau_width": width,
                          "linear_distance": distance, "linear_peak": report.linear_peak,
                          "classification": report.classification.value})
        converged = converged and all(report.converged)
    writer.table("fig2_profiles", profiles)
    writer.table("fig2_peaks", peaks)
    return converged


def fig3(spec: RunSpec, writer: ResultWriter) -> bool:
    """Free-boundary solutions of the large-sigma harmonic limit."""
    x = np.linspace(0.0, 2.0, 401)
    summary, profiles = [], []
    for gamma in (3.5, 4.0, 5.0, 6.0, 8.0, 12.0):
        solution = shoot_sigma_limit(gamma)
        summary.append({"gamma": gamma, "x_gamma": solution.x_gamma, "mu": solution.mu,
                        "norm_residual": solution.norm_residual})
        profiles.extend({"gamma": gamma, "x": float(a), "phi": float(v)}
                        for a, v in zip(x, sigma_limit_profile(gamma, x)))
    writer.table("fig3", summary)
    writer.table("fig3_profiles", profiles)
    return True


def fig4(spec: RunSpec, writer: ResultWriter) -> bool:
    """Harmonic trap, gamma=3, beta=1: energy for growing sigma against the linear limit."""
    gamma = 3.0
    V = PotentialSpec.harmonic(gamma)
    params = [Params(1.0, s) for s in LARGE_SIGMAS]
    results = _solve(spec, trap_grid(1, V, params, points(spec, 1)), V, params)
    rows = []
    for result in results:
        weak = weak_beta_estimate(1, gamma, 1.0, result.params.sigma)
        rows.append({"sigma": result.params.sigma, "E_solver": result.energy, "mu_solver": result.mu,
                     "peak": result.phi.peak, "E_weak": weak.energy, "mu_weak": weak.mu,
                     "E_limit": gamma / 2.0, "peak_limit": (gamma / math.pi) ** 0.25,
                     "converged": result.converged})
    writer.table("fig4", rows)
    return _converged(results)


def fig5(spec: RunSpec, writer: ResultWriter) -> bool:
    """2D ground states in two harmonic traps and a lattice, beta=5."""
    cases = {
        "harmonic_3": PotentialSpec.harmonic(3.0),
        "harmonic_6": PotentialSpec.harmonic(6.0),
        "lattice": PotentialSpec.lattice(6.0, 100.0, 4.0),
    }
    n = capped_points(2, spec.n or FIG_2D_POINTS)
    summary, slices, converged = [], [], True
    for name, V in cases.items():
        params = [Params(5.0, s) for s in PATTERN_SIGMAS]
        grid = trap_grid(2, V, params, n)
        results = _solve(spec, grid, V, params)
        middle = grid.n[1] // 2
        for result in results:
            writer.grid_dump(f"fig5_{name}_sigma{result.params.sigma:g}", result.phi)
            slices.extend({"case": name, "sigma": result.params.sigma, "x": float(a), "phi": float(v)}
                          for a, v in zip(grid.axes()[0], result.phi.values[:, middle]))
            summary.append({"case": name, "sigma": result.params.sigma, "E_solver": result.energy,
                            "mu_solver": result.mu, "peak": result.phi.peak,
                            "plateau_width": plateau_width(result.phi), "converged": result.converged})
        converged = converged and _converged(results)
    writer.table("fig5", summary)
    writer.table("fig5_slices", slices)
    return converged


def fig6(spec: RunSpec, writer: ResultWriter) -> bool:
    """Box L=1, sigma=2: relative energy errors of the weak, Thomas-Fermi and matched approximations."""
    sigma, grid, V = 2.0, box_grid(1.0, points(spec, 1)), PotentialSpec.box()
    weak_params = [Params(float(beta), sigma) for beta in np.logspace(-3, 0, 13)]
    strong_params = [Params(float(beta), sigma) for beta in np.logspace(1, 4, 13)]

    weak_rows = []
    weak_results = _solve(spec, grid, V, weak_params)
    for result in weak_results:
        estimate = asymptotic_columns(V, 1, result.params, (1.0,))["E_weak"]
        weak_rows.append({"beta": result.params.beta, "E_solver": result.energy, "E_weak": estimate,
                          "rel_err_weak": abs(result.energy - estimate) / result.energy,
                          "converged": result.converged})

    strong_rows = []
    strong_results = _solve(spec, grid, V, strong_params)
    for result in strong_results:
        tf = asymptotic_columns(V, 1, result.params, (1.0,))["E_TF"]
        matched = matched_energy(matched_asymptotic(1.0, result.params.beta, sigma), grid)
        strong_rows.append({"beta": result.params.beta, "E_solver": result.energy, "E_TF": tf,
                            "E_MA": matched, "rel_err_TF": abs(result.energy - tf) / result.energy,
                            "rel_err_MA": abs(result.energy - matched) / result.energy,
                            "converged": result.converged})
    writer.table("fig6_weak", weak_rows)
    writer.table("fig6_strong", strong_rows)
    return _converged(weak_results) and _converged(strong_results)


def _box_sigma_tables(spec: RunSpec, writer: ResultWriter, name: str, lengths: Sequence[float],
                      beta: float, sigmas: Sequence[float]) -> bool:
    V = PotentialSpec.box()
    summary, profiles, converged = [], [], True
    for length in lengths:
        limit = box_sigma_limit(length, beta)
        results = _solve(spec, box_grid(length, points(spec, 1)), V, [Params(beta, s) for s in sigmas])
        for result in results:
            sigma = result.params.sigma
            approach = box_sigma_approach(limit, sigma) if sigma > 0 else (None, None)
            summary.append({"L": length, "sigma": sigma, "E_solver": result.energy, "mu_solver": result.mu,
                            "peak": result.phi.peak, "case": limit.case.value,
                            "E_limit": limit.energy, "mu_limit": limit.mu,
                            "E_approach": approach[0], "mu_approach": approach[1],
                            "converged": result.converged})
            rows = _profile_rows(result, L=length)
            values = box_sigma_limit_profile(limit, np.array([row["x"] for row in rows]))
            for row, value in zip(rows, values):
                row["phi_limit"] = float(value)
            profiles.extend(rows)
        converged = converged and _converged(results)
    writer.table(name, summary)
    writer.table(f"{name}_profiles", profiles)
    return converged


def fig7(spec: RunSpec, writer: ResultWriter) -> bool:
    """Box ground states for growing sigma, beta=1, L in each limit case."""
    return _box_sigma_tables(spec, writer, "fig7", (0.9, 1.5, 2.0), 1.0, LARGE_SIGMAS)


def fig8_1d(spec: RunSpec, writer: ResultWriter) -> bool:
    """1D counterpart of the 2D box patterns: L in {1, 1.5, 2.2}, beta=5, sigma in {0, 4, 16}."""
    return _box_sigma_tables(spec, writer, "fig8_1d", (1.0, 1.5, 2.2), 5.0, PATTERN_SIGMAS)


def fig9(spec: RunSpec, writer: ResultWriter) -> bool:
    """Box L=1.2, beta=1: energy for growing sigma against the plateau limits."""
    length, beta = 1.2, 1.0
    limit = box_sigma_limit(length, beta)
    results = _solve(spec, box_grid(length, points(spec, 1)), PotentialSpec.box(),
                     [Params(beta, s) for s in LARGE_SIGMAS])
    rows = []
    for result in results:
        try:
            mu_plateau = box_plateau_estimate(length, beta, result.params.sigma).mu
        except RegimeError:
            mu_plateau = None
        rows.append({"sigma": result.params.sigma, "E_solver": result.energy, "mu_solver": result.mu,
                     "peak": result.phi.peak, "E_limit": limit.energy, "mu_limit": limit.mu,
                     "mu_plateau": mu_plateau, "converged": result.converged})
    writer.table("fig9", rows)
    return _converged(results)


def figA(spec: RunSpec, writer: ResultWriter) -> bool:
    """Boundary-layer profiles for sigma in {1, 3, 10} and the large-sigma limit."""
    x = np.linspace(0.0, 3.0, 301)
    columns = {"x": x}
    for sigma in (1.0, 3.0, 10.0):
        columns[f"sigma_{sigma:g}"] = layer_profile_eval(solve_layer_ode(sigma), x)
    columns["sigma_inf"] = layer_limit_profile(x)
    rows = [{key: float(values[i]) for key, values in columns.items()} for i in range(x.size)]
    writer.table("figA", rows)
    return True


FIGURES: Dict[str, Callable[[RunSpec, ResultWriter], bool]] = {
    "fig1": fig1,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8_1d": fig8_1d,
    "fig9": fig9,
    "figA": figA,
}


def reproduce(figure_id: str, spec: RunSpec, writer: ResultWriter) -> bool:
    """Write the tables of one figure; returns False if any solve did not converge.

    Raises:
        UsageError: If ``figure_id`` is unknown
    """
    if figure_id not in FIGURES:
        raise UsageError(f"Unknown figure id '{figure_id}', expected one of {', '.join(FIGURES)}")
    logger.info(f"Reproducing {figure_id}")
    return FIGURES[figure_id](spec, writer)
