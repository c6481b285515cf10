"""
Executes a validated RunSpec and persists its results.

Exit codes: 0 success, 1 usage or model error, 2 numerical non-convergence.
"""
import logging
from typing import Callable, Dict, List, Optional

from nlsground.core.asymptotics.layer import layer_limit_profile, solve_layer_ode
from nlsground.core.asymptotics.sigma_limit import shoot_sigma_limit
from nlsground.core.errors import NlsGroundError, NotConverged, UsageError
from nlsground.core.models.schemas import GroundStateResult, Params
from nlsground.core.regimes.existence import classify_existence
from nlsground.services.experiment_service import reproduce
from nlsground.services.experiment_service.problems import (
    asymptotic_columns,
    box_lengths,
    flow_config,
    grid_for,
    potential_from,
    solve_items,
)
from nlsground.services.experiment_service.records import (
    ResultRecord,
    finite_or_none,
    now,
    record_from_result,
)
from nlsground.services.experiment_service.run_spec import Command, OutputFormat, RunSpec
from nlsground.services.experiment_service.writers import ResultWriter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2


class ExperimentRunner:
    """Maps each command to the core operations and writes tables and records."""

    def __init__(self, spec: RunSpec, writer: Optional[ResultWriter] = None):
        self.spec = spec
        self.writer = writer or ResultWriter(
            spec.out,
            write_csv=spec.format in (OutputFormat.CSV, OutputFormat.BOTH),
            write_json=spec.format in (OutputFormat.JSON, OutputFormat.BOTH),
        )
        self._handlers: Dict[Command, Callable[[], bool]] = {
            Command.SOLVE: self.solve,
            Command.SWEEP_BETA: self.sweep_beta,
            Command.SWEEP_SIGMA: self.sweep_sigma,
            Command.LAYER: self.layer,
            Command.SHOOT: self.shoot,
            Command.CLASSIFY: self.classify,
            Command.REPRODUCE: self.reproduce,
        }

    def run(self) -> int:
        """Run the command; returns the process exit code."""
        logger.info(f"Running {self.spec.command.value}")
        try:
            converged = self._handlers[self.spec.command]()
        except UsageError as e:
            logger.error(f"Usage error: {str(e)}")
            return EXIT_USAGE
        except NotConverged as e:
            logger.error(f"Not converged: {str(e)}")
            return EXIT_NOT_CONVERGED
        except NlsGroundError as e:
            logger.error(f"{type(e).__name__}: {str(e)}")
            return EXIT_USAGE
        if not converged:
            logger.error("At least one solve did not converge")
            return EXIT_NOT_CONVERGED
        return EXIT_OK

    def _lengths(self):
        return box_lengths(self.spec) if self.spec.potential == "box" else ()

    def _row(self, result: GroundStateResult) -> Dict[str, Optional[float]]:
        V = potential_from(self.spec)
        row = {
            "beta": result.params.beta,
            "sigma": result.params.sigma,
            "E_solver": result.energy,
            "mu_solver": result.mu,
            "residual": result.residual,
            "peak": result.phi.peak,
            "iterations": result.iterations,
            "converged": result.converged,
        }
        row.update(asymptotic_columns(V, self.spec.dim, result.params, self._lengths()))
        return row

    def _sweep(self, label: str, params: List[Params]) -> bool:
        V = potential_from(self.spec)
        grid = grid_for(self.spec, V, params)
        results = solve_items(grid, V, params, flow_config(self.spec),
                              continuation=self.spec.continuation, threads=self.spec.threads)
        rows = [self._row(result) for result in results]
        self.writer.table(label, rows)
        for result, row in zip(results, rows):
            extra = {key: row[key] for key in ("E_weak", "mu_weak", "E_TF", "mu_TF")}
            self.writer.record(record_from_result(label, self.spec.echo(), result, extra, self.spec.profile))
        return all(result.converged for result in results)

    def solve(self) -> bool:
        return self._sweep("solve", [Params(self.spec.beta, self.spec.sigma)])

    def sweep_beta(self) -> bool:
        return self._sweep("sweep_beta", [Params(beta, self.spec.sigma) for beta in self.spec.betas])

    def sweep_sigma(self) -> bool:
        return self._sweep("sweep_sigma", [Params(self.spec.beta, sigma) for sigma in self.spec.sigmas])

    def layer(self) -> bool:
        profile = solve_layer_ode(self.spec.sigma, self.spec.xcut)
        limit = layer_limit_profile(profile.x)
        self.writer.table("layer", [
            {"x": x, "phi": v, "dphi": s, "phi_limit": lim}
            for x, v, s, lim in zip(profile.x, profile.values, profile.slopes, limit)
        ])
        self.writer.record(ResultRecord(
            label="layer", spec=self.spec.echo(), timestamp=now(),
            scalars={"sigma": profile.sigma, "slope0": profile.slope0, "x_cut": profile.x_cut,
                     "x_end": profile.x_end, "tail_rate": profile.tail_rate},
        ))
        return True

    def shoot(self) -> bool:
        gamma = self.spec.gamma[0]
        solution = shoot_sigma_limit(gamma)
        self.writer.table("shoot", [
            {"x": x, "phi": v, "dphi": s} for x, v, s in zip(solution.x, solution.values, solution.slopes)
        ])
        self.writer.record(ResultRecord(
            label="shoot", spec=self.spec.echo(), timestamp=now(),
            scalars={"gamma": gamma, "x_gamma": solution.x_gamma, "mu": solution.mu,
                     "norm_residual": solution.norm_residual},
        ))
        return True

    def classify(self) -> bool:
        verdict = classify_existence(self.spec.dim, self.spec.sigma, self.spec.beta, self.spec.cb)
        row = {"d": verdict.d, "sigma": verdict.sigma, "beta": verdict.beta,
               "verdict": verdict.verdict.value, "clause": verdict.clause,
               "threshold": verdict.threshold, "threshold_factor": verdict.threshold_factor}
        self.writer.table("classify", [row])
        self.writer.record(ResultRecord(
            label="classify", spec=self.spec.echo(), timestamp=now(),
            scalars={"threshold": finite_or_none(verdict.threshold),
                     "threshold_factor": finite_or_none(verdict.threshold_factor)},
            tags={"verdict": verdict.verdict.value, "clause": verdict.clause},
        ))
        return True

    def reproduce(self) -> bool:
        return reproduce.reproduce(self.spec.figure, self.spec, self.writer)


def run(spec: RunSpec, writer: Optional[ResultWriter] = None) -> int:
    """Execute ``spec``; returns 0, 1 or 2."""
    return ExperimentRunner(spec, writer).run()
