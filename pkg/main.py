"""
nlsground command-line entry point.
Runs ground-state solves, regime sweeps and figure reproductions.
"""
import argparse
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from nlsground.core.errors import UsageError
from nlsground.services.experiment_service.run_spec import FIGURES, Command, build_run_spec
from nlsground.services.experiment_service.runner import EXIT_USAGE, run
from nlsground.utils.logger import get_logger, setup_logging

logger = get_logger(__name__)


def _common_options() -> argparse.ArgumentParser:
    """Options shared by every command. Defaults are None so that only given flags override the config file."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="Flat key=value file with defaults for any option")
    parser.add_argument("--out", help="Output directory (default: results)")
    parser.add_argument("--format", choices=["csv", "json", "both"], help="Output format (default: both)")
    parser.add_argument("--threads", type=int, help="Worker threads for independent solves")
    parser.add_argument("--quiet", action="store_true", default=None, help="Only log warnings and errors")
    return parser


def _model_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--dim", type=int, help="Spatial dimension (1 or 2; 3 for classify)")
    parser.add_argument("--potential", choices=["harmonic", "box", "lattice"], help="External potential")
    parser.add_argument("--gamma", type=float, nargs="+", help="Trap frequencies per direction")
    parser.add_argument("--length", type=float, nargs="+", help="Box lengths per direction")
    parser.add_argument("--amplitude", type=float, help="Lattice amplitude")
    parser.add_argument("--wavenumber", type=float, help="Lattice wavenumber")
    parser.add_argument("--beta", type=float, help="Interaction strength")
    parser.add_argument("--sigma", type=float, help="Nonlinearity power")
    return parser


def _flow_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--n", type=int, help="Interior points per direction")
    parser.add_argument("--dt", type=float, help="Time step (default: sigma and mu based)")
    parser.add_argument("--tol", type=float, help="Stopping tolerance on the update rate")
    parser.add_argument("--max-iters", type=int, help="Iteration budget per solve")
    parser.add_argument("--linear-solver", choices=["direct", "cg"], help="2D linear solver")
    parser.add_argument("--profile", action="store_true", default=None, help="Store profile samples in JSON records")
    parser.add_argument("--no-continuation", action="store_true", default=None,
                        help="Solve sweep items independently in parallel instead of warm-starting")
    return parser


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per RunSpec command."""
    parser = argparse.ArgumentParser(description="Ground states of the nonlinear Schroedinger equation")
    commands = parser.add_subparsers(dest="command", required=True)
    common, model, flow = _common_options(), _model_options(), _flow_options()

    commands.add_parser(Command.SOLVE.value, parents=[common, model, flow], help="Compute one ground state")
    sweep_beta = commands.add_parser(Command.SWEEP_BETA.value, parents=[common, model, flow],
                                     help="Ground states over a list of beta")
    sweep_beta.add_argument("--betas", type=float, nargs="+", help="Interaction strengths")
    sweep_sigma = commands.add_parser(Command.SWEEP_SIGMA.value, parents=[common, model, flow],
                                      help="Ground states over a list of sigma")
    sweep_sigma.add_argument("--sigmas", type=float, nargs="+", help="Nonlinearity powers")

    layer = commands.add_parser(Command.LAYER.value, parents=[common], help="Boundary-layer profile table")
    layer.add_argument("--sigma", type=float, help="Nonlinearity power")
    layer.add_argument("--xcut", type=float, help="Table end point")

    shoot = commands.add_parser(Command.SHOOT.value, parents=[common], help="Large-sigma free-boundary solution")
    shoot.add_argument("--gamma", type=float, nargs=1, help="Trap frequency, above pi")

    classify = commands.add_parser(Command.CLASSIFY.value, parents=[common], help="Existence verdict")
    classify.add_argument("--dim", type=int, help="Spatial dimension (1, 2 or 3)")
    classify.add_argument("--sigma", type=float, help="Nonlinearity power")
    classify.add_argument("--beta", type=float, help="Interaction strength")
    classify.add_argument("--cb", type=float, help="Best constant, consulted at d*sigma = 2")

    reproduce = commands.add_parser(Command.REPRODUCE.value, parents=[common, flow], help="Figure data tables")
    reproduce.add_argument("figure", help=f"One of {', '.join(FIGURES)}")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, build the run spec and execute it."""
    args = build_parser().parse_args(argv)
    flags: Dict[str, Any] = {key: value for key, value in vars(args).items()
                             if key not in ("command", "config") and value is not None}
    try:
        spec = build_run_spec(args.command, flags, args.config)
    except (UsageError, ValidationError) as e:
        setup_logging()
        logger.error(f"Invalid run specification: {str(e)}")
        return EXIT_USAGE

    setup_logging("WARNING" if spec.quiet else None)
    try:
        return run(spec)
    except Exception as e:
        logger.error(f"Error in nlsground run: {str(e)}", exc_info=True)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
