"""Tests for the experiment runner and the command line."""
from pathlib import Path

import pandas as pd
import pytest

from main import build_parser, main
from nlsground.services.experiment_service.records import ResultRecord
from nlsground.services.experiment_service.run_spec import RunSpec, build_run_spec
from nlsground.services.experiment_service.runner import (
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_USAGE,
    ExperimentRunner,
    run,
)


def _records(directory: Path, label: str):
    return [ResultRecord.from_json(p.read_text()) for p in sorted(directory.glob(f"{label}_*.json"))]


class TestExperimentRunner:
    """Tests for ExperimentRunner commands."""

    def test_solve_writes_table_and_record(self, run_flags):
        """A harmonic solve writes solve.csv with asymptotic columns and one record."""
        spec = build_run_spec("solve", dict(run_flags, beta=1.0, sigma=1.0, n=127, tol=1e-8))
        assert run(spec) == EXIT_OK
        out = Path(spec.out)
        frame = pd.read_csv(out / "solve.csv")
        assert list(frame.columns[:3]) == ["beta", "sigma", "E_solver"]
        assert frame["E_weak"][0] == pytest.approx(0.69947, abs=1e-5)
        assert 0.5 < frame["E_solver"][0] < frame["E_weak"][0]
        records = _records(out, "solve")
        assert len(records) == 1
        assert records[0].converged

    def test_budget_exhaustion_exit_code(self, run_flags):
        """A solve stopped by max_iters exits with 2 and still writes its row."""
        spec = build_run_spec("solve", dict(run_flags, beta=1.0, max_iters=1))
        assert run(spec) == EXIT_NOT_CONVERGED
        frame = pd.read_csv(Path(spec.out) / "solve.csv")
        assert not frame["converged"][0]

    def test_unsolvable_parameters_exit_code(self, run_flags):
        """Parameters without a ground state are a model error."""
        spec = build_run_spec("solve", dict(run_flags, beta=-1.0, sigma=3.0))
        assert run(spec) == EXIT_USAGE

    def test_sweep_beta_rows_in_order(self, run_flags):
        """A beta sweep writes one row per beta in input order."""
        spec = build_run_spec("sweep-beta", dict(run_flags, betas=[0.0, 1.0, 10.0], n=127, tol=1e-8))
        assert run(spec) == EXIT_OK
        frame = pd.read_csv(Path(spec.out) / "sweep_beta.csv")
        assert list(frame["beta"]) == [0.0, 1.0, 10.0]
        assert frame["E_solver"].is_monotonic_increasing
        assert len(_records(Path(spec.out), "sweep_beta")) == 3

    def test_independent_sweep(self, run_flags):
        """Without continuation the sweep still keeps input order."""
        spec = build_run_spec("sweep-beta", dict(run_flags, betas=[10.0, 1.0], n=127, tol=1e-8,
                                                 no_continuation=True, threads=2))
        assert run(spec) == EXIT_OK
        frame = pd.read_csv(Path(spec.out) / "sweep_beta.csv")
        assert list(frame["beta"]) == [10.0, 1.0]

    def test_box_solve_uses_box_columns(self, run_flags):
        """Box solves report the box weak and TF predictions."""
        spec = build_run_spec("solve", dict(run_flags, potential="box", length=[1.0], beta=100.0,
                                            sigma=2.0, n=255, tol=1e-8))
        assert run(spec) == EXIT_OK
        frame = pd.read_csv(Path(spec.out) / "solve.csv")
        assert frame["E_TF"][0] == pytest.approx(100.0 / 3.0)
        assert frame["E_solver"][0] > frame["E_TF"][0]

    def test_classify(self, run_flags):
        """classify writes the verdict and clause."""
        spec = build_run_spec("classify", dict(run_flags, dim=3, sigma=1.0, beta=-1.0))
        assert run(spec) == EXIT_OK
        frame = pd.read_csv(Path(spec.out) / "classify.csv")
        assert frame["verdict"][0] == "NotExists"
        assert frame["clause"][0] == "ii'"
        assert _records(Path(spec.out), "classify")[0].tags["verdict"] == "NotExists"

    def test_layer(self, run_flags):
        """layer tabulates phi, phi' and the large-sigma limit."""
        spec = build_run_spec("layer", dict(run_flags, sigma=1.0, xcut=3.0))
        assert run(spec) == EXIT_OK
        frame = pd.read_csv(Path(spec.out) / "layer.csv")
        assert list(frame.columns) == ["x", "phi", "dphi", "phi_limit"]
        assert frame["x"].max() <= 3.0

    def test_shoot_below_threshold(self, run_flags):
        """Shooting at gamma <= pi is a regime error."""
        spec = build_run_spec("shoot", dict(run_flags, gamma=[3.0]))
        assert run(spec) == EXIT_USAGE

    def test_csv_only_format(self, run_flags):
        """format=csv writes no JSON."""
        spec = build_run_spec("classify", dict(run_flags, sigma=1.0, beta=1.0, format="csv"))
        runner = ExperimentRunner(spec)
        assert runner.run() == EXIT_OK
        assert all(path.suffix == ".csv" for path in runner.writer.written)

    def test_reproduce_figure_a(self, run_flags):
        """figA writes the layer profiles side by side."""
        spec = RunSpec(command="reproduce", figure="figA", **run_flags)
        assert run(spec) == EXIT_OK
        frame = pd.read_csv(Path(spec.out) / "figA.csv")
        assert list(frame.columns) == ["x", "sigma_1", "sigma_3", "sigma_10", "sigma_inf"]


class TestCommandLine:
    """Tests for the argparse entry point."""

    def test_parser_subcommands(self):
        """Each command has its own subparser."""
        args = build_parser().parse_args(["sweep-beta", "--betas", "1", "10", "--sigma", "2"])
        assert args.command == "sweep-beta"
        assert args.betas == [1.0, 10.0]
        assert args.sigma == 2.0
        assert args.n is None

    def test_main_classify(self, tmp_path):
        """main returns 0 and writes into --out."""
        out = tmp_path / "cli"
        code = main(["classify", "--dim", "2", "--sigma", "1", "--beta", "-1", "--cb", "5.85",
                     "--out", str(out), "--quiet"])
        assert code == EXIT_OK
        assert pd.read_csv(out / "classify.csv")["verdict"][0] == "Exists"

    def test_main_invalid_value(self, tmp_path):
        """Invalid values exit with 1."""
        code = main(["solve", "--sigma", "-1", "--out", str(tmp_path), "--quiet"])
        assert code == EXIT_USAGE

    def test_main_missing_config(self, tmp_path):
        """A missing config file exits with 1."""
        code = main(["solve", "--config", str(tmp_path / "absent.cfg"), "--out", str(tmp_path)])
        assert code == EXIT_USAGE

    def test_main_non_convergence(self, tmp_path):
        """An exhausted iteration budget exits with 2."""
        code = main(["solve", "--beta", "1", "--max-iters", "1", "--out", str(tmp_path), "--quiet"])
        assert code == EXIT_NOT_CONVERGED
