"""
Large-sigma bifurcation scan.

As sigma grows the ground state either returns to the linear (beta = 0) ground state,
when the latter peaks below 1, or develops a flat top pinned at 1. Box lengths below 1
give a third outcome, a constant Thomas-Fermi state above 1.
"""
import dataclasses
import logging
import math
from typing import Optional, Sequence

import numpy as np

from nlsground.config import settings
from nlsground.core.domain.functionals import h1_distance
from nlsground.core.errors import InvalidParamsError
from nlsground.core.gflow.gradient_flow import continuation_sweep, solve_ground_state
from nlsground.core.models.schemas import (
    BifurcationReport,
    Classification,
    FlowConfig,
    Grid,
    Params,
    PotentialKind,
    PotentialSpec,
    WaveFunction,
)

logger = logging.getLogger(__name__)


def plateau_width(phi: WaveFunction, delta: float = settings.BIFURCATION_DELTA) -> float:
    """Measure of the set {|phi| > 1 - delta}."""
    return float(np.count_nonzero(np.abs(phi.values) > 1.0 - delta) * phi.grid.cell_volume)


def threshold_parameter(grid: Grid, V: PotentialSpec) -> float:
    """The quantity compared with the bifurcation threshold: gamma for traps, L for boxes."""
    if V.kind in (PotentialKind.HARMONIC, PotentialKind.LATTICE):
        return float(min(V.gamma))
    if V.kind == PotentialKind.BOX:
        return float(grid.upper[0] - grid.lower[0])
    return math.nan


def classify_scan(linear_peak: float, peaks: Sequence[float], widths: Sequence[float],
                  distances: Sequence[float], delta: float = settings.BIFURCATION_DELTA) -> Classification:
    """Classify a scan from its peak, plateau and linear-distance sequences."""
    final = peaks[-1]
    if linear_peak < 1.0 and final < 1.0 and distances[-1] <= distances[0]:
        return Classification.LINEAR_LIMIT
    if linear_peak >= 1.0 and abs(final - 1.0) <= delta and widths[-1] > widths[0]:
        return Classification.FLAT_TOP
    if final > 1.0 + delta:
        return Classification.THOMAS_FERMI
    return Classification.UNRESOLVED


def bifurcation_scan(grid: Grid, V: PotentialSpec, beta: float, sigma_list: Sequence[float],
                     cfg: Optional[FlowConfig] = None,
                     delta: float = settings.BIFURCATION_DELTA) -> BifurcationReport:
    """Continuation-solve along ascending sigma and classify the limiting pattern.

    Args:
        grid: Computational grid
        V: External potential
        beta: Interaction strength, held fixed
        sigma_list: Strictly ascending powers
        cfg: Flow settings shared by every solve
        delta: Peak and plateau tolerance

    Returns:
        Per-sigma peaks, plateau widths and H1 distances to the linear ground state,
        with the classification; non-converged solves are kept and flagged
    """
    sigmas = [float(s) for s in sigma_list]
    if not sigmas:
        raise InvalidParamsError("Bifurcation scan needs at least one sigma")
    if any(b <= a for a, b in zip(sigmas, sigmas[1:])):
        raise InvalidParamsError(f"sigma_list must be strictly ascending, got {sigmas}")
    cfg = cfg or FlowConfig()

    linear = solve_ground_state(grid, V, Params(beta=0.0, sigma=1.0), dataclasses.replace(cfg, warm_start=None))
    results = continuation_sweep(grid, V, [Params(beta=beta, sigma=s) for s in sigmas], cfg)

    peaks = [result.phi.peak for result in results]
    widths = [plateau_width(result.phi, delta) for result in results]
    distances = [h1_distance(result.phi, linear.phi) for result in results]
    classification = classify_scan(linear.phi.peak, peaks, widths, distances, delta)
    logger.info(f"Bifurcation scan {V.describe()}, beta={beta}: linear peak {linear.phi.peak:.6f}, "
                f"final peak {peaks[-1]:.6f} -> {classification.value}")
    return BifurcationReport(
        potential=V.describe(),
        beta=beta,
        sigma_list=sigmas,
        peak_values=peaks,
        plateau_widths=widths,
        linear_distances=distances,
        linear_peak=linear.phi.peak,
        classification=classification,
        threshold_parameter=threshold_parameter(grid, V),
        converged=[result.converged for result in results],
        results=results,
    )
