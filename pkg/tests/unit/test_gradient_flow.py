"""Tests for the normalized gradient flow."""
import math

import numpy as np
import pytest

from nlsground.config import settings
from nlsground.core.domain.functionals import energy, h1_distance, normalize, quad_norm_sq
from nlsground.core.errors import (
    ExistenceViolation,
    InvalidInputError,
    InvalidParamsError,
    LinearSolveError,
    NotConverged,
)
from nlsground.core.gflow.domains import box_grid, capped_points, harmonic_grid, harmonic_half_width
from nlsground.core.gflow.gradient_flow import (
    befd_step,
    continuation_sweep,
    default_time_step,
    ensure_solvable,
    initial_guess,
    solve_ground_state,
    stable_time_step,
)
from nlsground.core.models.schemas import FlowConfig, Grid, Params, PotentialSpec, WaveFunction


class TestBackwardEulerStep:
    """Tests for befd_step."""

    def test_discrete_ground_state_is_fixed(self, sine_phi, box_potential):
        """The discrete first box mode is a fixed point of the linear flow."""
        stepped = befd_step(sine_phi, box_potential, Params(0.0, 1.0), 0.1)
        assert np.max(np.abs(stepped.values - sine_phi.values)) < 1e-10

    def test_iterates_stay_normalized(self, gaussian_phi, harmonic_potential):
        """Every iterate has unit discrete mass."""
        phi = normalize(gaussian_phi)
        for _ in range(5):
            phi = befd_step(phi, harmonic_potential, Params(10.0, 1.0), 0.05)
            assert quad_norm_sq(phi) == pytest.approx(1.0, abs=1e-12)

    def test_linear_step_lowers_energy(self, harmonic_grid_1d, harmonic_potential):
        """For beta = 0 one step does not raise the energy."""
        x = harmonic_grid_1d.axes()[0]
        phi = normalize(WaveFunction(harmonic_grid_1d, np.exp(-x ** 2)))
        p = Params(0.0, 1.0)
        stepped = befd_step(phi, harmonic_potential, p, 0.1)
        assert energy(stepped, harmonic_potential, p) <= energy(phi, harmonic_potential, p) + 1e-12

    def test_nonlinear_steps_lower_energy(self):
        """Strong repulsion: the energy decreases strictly over the first steps."""
        V = PotentialSpec.harmonic(3.0)
        p = Params(100.0, 2.0)
        grid = harmonic_grid(1, 3.0, p, 511)
        phi = initial_guess(grid, V)
        energies = [energy(phi, V, p)]
        for _ in range(10):
            phi = befd_step(phi, V, p, 0.01)
            energies.append(energy(phi, V, p))
        assert all(later < earlier for earlier, later in zip(energies, energies[1:]))

    def test_symmetry_is_preserved(self, gaussian_phi, harmonic_potential):
        """An even start stays even in a symmetric trap."""
        phi = normalize(gaussian_phi)
        for _ in range(20):
            phi = befd_step(phi, harmonic_potential, Params(5.0, 1.0), 0.1)
        assert np.max(np.abs(phi.values - phi.values[::-1])) < 1e-10

    def test_loss_of_positivity(self, gaussian_phi, harmonic_potential):
        """Strong attraction with a large step makes the shifted operator indefinite."""
        with pytest.raises(LinearSolveError) as excinfo:
            befd_step(normalize(gaussian_phi), harmonic_potential, Params(-100.0, 1.0), 1.0)
        assert "positivity" in str(excinfo.value)

    def test_nonpositive_step(self, sine_phi, box_potential):
        """The time step must be positive."""
        with pytest.raises(InvalidParamsError):
            befd_step(sine_phi, box_potential, Params(0.0, 1.0), 0.0)


class TestTimeStepAndDomains:
    """Tests for the default time step and computational domains."""

    def test_mild_powers_use_the_cap(self, gaussian_phi, harmonic_potential):
        """For sigma <= 1 the step is min(0.1, 1/(1+sigma))."""
        grid = gaussian_phi.grid
        assert default_time_step(grid, harmonic_potential, Params(1.0, 1.0), gaussian_phi) == 0.1
        assert default_time_step(grid, harmonic_potential, Params(1.0, 0.0), gaussian_phi) == 0.1

    def test_large_powers_shrink_the_step(self, gaussian_phi, harmonic_potential):
        """For sigma > 1 the step is limited by 1/(4 (sigma-1) mu_hat) with mu_hat >= 1."""
        dt = default_time_step(gaussian_phi.grid, harmonic_potential, Params(1.0, 4.0), gaussian_phi)
        assert 0 < dt <= 1.0 / 12.0

    def test_iterate_limits_large_powers(self):
        """The step obeys dt (sigma-1) beta max|phi|^(2 sigma) <= STABILITY_FACTOR for the current iterate."""
        phi = initial_guess(box_grid(1.5, 127), PotentialSpec.box())
        dt = stable_time_step(phi.values, Params(1.0, 64.0), 0.1)
        assert dt == pytest.approx(settings.STABILITY_FACTOR / (63.0 * phi.peak ** 128), rel=1e-9)
        assert dt < 1e-9

    def test_mild_or_attractive_powers_keep_the_step(self, sine_phi):
        """sigma <= 1, beta = 0 and beta < 0 leave the base step unchanged."""
        for p in (Params(1.0, 1.0), Params(0.0, 64.0), Params(-1.0, 4.0)):
            assert stable_time_step(sine_phi.values, p, 0.1) == 0.1

    def test_harmonic_half_width(self):
        """R = 8/sqrt(gamma) without interaction, wider with strong repulsion."""
        assert harmonic_half_width(1, 4.0, Params(0.0, 1.0)) == 4.0
        assert harmonic_half_width(1, 1.0, Params(1e4, 1.0)) > 8.0

    def test_box_grid(self):
        """The box grid spans (0, L)."""
        grid = box_grid(1.5, 63)
        assert grid.lower == (0.0,)
        assert grid.upper == (1.5,)

    def test_two_dimensional_cap(self):
        """2D grids are capped at 257 points per direction."""
        assert capped_points(2, 1023) == 257
        assert capped_points(1, 1023) == 1023

    def test_initial_guess_is_normalized(self, unit_box_grid, box_potential):
        """The start state is a normalized sine for boxes."""
        phi = initial_guess(unit_box_grid, box_potential)
        assert quad_norm_sq(phi) == pytest.approx(1.0, abs=1e-12)
        assert phi.peak == pytest.approx(math.sqrt(2.0), rel=1e-6)


class TestSolveGroundState:
    """Tests for solve_ground_state."""

    def test_linear_harmonic_energy(self):
        """beta = 0 in the gamma = 1 trap gives E = mu = 1/2."""
        grid = Grid.uniform(-8.0, 8.0, 2047)
        result = solve_ground_state(grid, PotentialSpec.harmonic(1.0), Params(0.0, 1.0))
        assert result.converged
        assert result.energy == pytest.approx(0.5, abs=1e-5)
        assert result.mu == pytest.approx(0.5, abs=1e-5)
        assert result.residual < 1e-6

    def test_linear_box_energy(self, unit_box_grid, box_potential):
        """beta = 0 in the unit box gives the discrete pi^2/2."""
        result = solve_ground_state(unit_box_grid, box_potential, Params(0.0, 1.0))
        assert result.energy == pytest.approx(math.pi ** 2 / 2, rel=1e-4)

    def test_result_is_positive_and_normalized(self, fine_harmonic_grid, harmonic_potential, quick_flow):
        """The returned state is normalized with a positive peak."""
        result = solve_ground_state(fine_harmonic_grid, harmonic_potential, Params(10.0, 1.0), quick_flow)
        assert quad_norm_sq(result.phi) == pytest.approx(1.0, abs=1e-12)
        assert result.phi.values.max() == pytest.approx(result.phi.peak)
        assert result.mu > result.energy

    def test_energy_trace_is_monotone(self, fine_harmonic_grid, harmonic_potential):
        """With beta >= 0 and dt <= 0.1 the energy never increases."""
        cfg = FlowConfig(dt=0.05, tol=1e-8, record_energy=True)
        result = solve_ground_state(fine_harmonic_grid, harmonic_potential, Params(10.0, 1.0), cfg)
        trace = np.array(result.energy_trace)
        assert trace.size == result.iterations + 1
        assert np.all(np.diff(trace) <= 1e-12)

    def test_cold_large_power_box_converges(self):
        """sigma = 16 in a box shorter than 2 converges from the sine start with falling energy."""
        grid = box_grid(1.2, 127)
        cfg = FlowConfig(tol=1e-8, max_iters=200_000, record_energy=True)
        result = solve_ground_state(grid, PotentialSpec.box(), Params(1.0, 16.0), cfg)
        trace = np.array(result.energy_trace)
        assert result.converged
        assert math.isfinite(result.energy)
        assert np.all(np.diff(trace) <= 1e-10 * np.abs(trace[:-1]))
        assert result.phi.peak < initial_guess(grid, PotentialSpec.box()).peak

    def test_overshooting_start_stays_bounded(self):
        """sigma = 64 at L = 0.9 starts with E near 1e20 and only goes down."""
        cfg = FlowConfig(max_iters=50, record_energy=True)
        with pytest.raises(NotConverged) as excinfo:
            solve_ground_state(box_grid(0.9, 127), PotentialSpec.box(), Params(1.0, 64.0), cfg)
        result = excinfo.value.result
        trace = np.array(result.energy_trace)
        assert trace[0] > 1e15
        assert np.all(np.isfinite(trace))
        assert np.all(np.diff(trace) <= 1e-10 * np.abs(trace[:-1]))
        assert result.energy < trace[0]

    def test_rising_energy_is_refused(self, monkeypatch, harmonic_grid_1d, harmonic_potential):
        """A flow whose energy never drops enough stops after the allowed halvings."""
        monkeypatch.setattr(settings, "ENERGY_RISE_RTOL", -1.0)
        monkeypatch.setattr(settings, "MAX_STEP_HALVINGS", 2)
        with pytest.raises(NotConverged) as excinfo:
            solve_ground_state(harmonic_grid_1d, harmonic_potential, Params(1.0, 1.0))
        assert "energy rose" in str(excinfo.value)
        assert excinfo.value.result.iterations == 0

    def test_supercritical_attraction(self, harmonic_grid_1d, harmonic_potential):
        """d sigma > 2 with beta < 0 has no ground state."""
        with pytest.raises(ExistenceViolation) as excinfo:
            solve_ground_state(harmonic_grid_1d, harmonic_potential, Params(-1.0, 3.0))
        assert "No ground state" in str(excinfo.value)

    def test_critical_attraction_without_constant(self, small_square_grid, harmonic_potential):
        """d sigma = 2 with beta < 0 is refused when the best constant is unknown."""
        with pytest.raises(ExistenceViolation):
            solve_ground_state(small_square_grid, harmonic_potential, Params(-1.0, 1.0))

    def test_ensure_solvable_accepts_sigma_zero(self):
        """sigma = 0 is a linear problem and always solvable."""
        ensure_solvable(1, Params(-5.0, 0.0))

    def test_budget_exhaustion_keeps_state(self, harmonic_grid_1d, harmonic_potential):
        """NotConverged carries the last iterate flagged as not converged."""
        with pytest.raises(NotConverged) as excinfo:
            solve_ground_state(harmonic_grid_1d, harmonic_potential, Params(1.0, 1.0), FlowConfig(max_iters=1))
        result = excinfo.value.result
        assert result is not None
        assert not result.converged
        assert result.iterations == 1
        assert quad_norm_sq(result.phi) == pytest.approx(1.0, abs=1e-12)

    def test_warm_start_on_other_grid(self, harmonic_grid_1d, harmonic_potential, sine_phi):
        """A warm start must live on the solve grid."""
        with pytest.raises(InvalidInputError) as excinfo:
            solve_ground_state(harmonic_grid_1d, harmonic_potential, Params(1.0, 1.0),
                               FlowConfig(warm_start=sine_phi))
        assert "different grid" in str(excinfo.value)

    def test_small_beta_approaches_linear_state(self, fine_harmonic_grid, harmonic_potential):
        """The H1 distance to the linear ground state shrinks with beta."""
        linear = solve_ground_state(fine_harmonic_grid, harmonic_potential, Params(0.0, 1.0))
        distances = [h1_distance(solve_ground_state(fine_harmonic_grid, harmonic_potential, Params(beta, 1.0)).phi,
                                 linear.phi)
                     for beta in (1e-1, 1e-2, 1e-3)]
        assert distances[0] > distances[1] > distances[2]

    def test_conjugate_gradients_match_direct(self, small_square_grid, harmonic_potential):
        """Both 2D linear solvers reach the same ground state."""
        p = Params(1.0, 0.5)
        direct = solve_ground_state(small_square_grid, harmonic_potential, p, FlowConfig(tol=1e-8))
        iterative = solve_ground_state(small_square_grid, harmonic_potential, p,
                                       FlowConfig(tol=1e-8, linear_solver="cg"))
        assert iterative.energy == pytest.approx(direct.energy, abs=1e-7)


class TestContinuationSweep:
    """Tests for continuation_sweep."""

    def test_single_item_matches_direct_solve(self, fine_harmonic_grid, harmonic_potential, quick_flow):
        """A one-item sweep is a plain solve."""
        p = Params(5.0, 1.0)
        swept = continuation_sweep(fine_harmonic_grid, harmonic_potential, [p], quick_flow)
        direct = solve_ground_state(fine_harmonic_grid, harmonic_potential, p, quick_flow)
        assert len(swept) == 1
        assert swept[0].energy == direct.energy

    def test_warm_starts_save_iterations(self):
        """Items after the first converge faster than cold solves."""
        V = PotentialSpec.harmonic(3.0)
        params = [Params(beta, 2.0) for beta in (1.0, 10.0, 100.0)]
        grid = harmonic_grid(1, 3.0, params[-1], 511)
        cfg = FlowConfig(dt=0.01, tol=1e-8)
        swept = continuation_sweep(grid, V, params, cfg)
        for p, warm in zip(params[1:], swept[1:]):
            cold = solve_ground_state(grid, V, p, cfg)
            assert warm.iterations < cold.iterations

    def test_empty_sweep(self, harmonic_grid_1d, harmonic_potential):
        """A sweep needs at least one parameter set."""
        with pytest.raises(InvalidParamsError):
            continuation_sweep(harmonic_grid_1d, harmonic_potential, [])

    def test_unsolvable_item_checked_first(self, harmonic_grid_1d, harmonic_potential):
        """Existence is checked for every item before any solve."""
        with pytest.raises(ExistenceViolation):
            continuation_sweep(harmonic_grid_1d, harmonic_potential, [Params(1.0, 1.0), Params(-1.0, 3.0)])

    def test_non_converged_items_are_flagged(self, harmonic_grid_1d, harmonic_potential):
        """Items hitting the budget stay in the sweep."""
        results = continuation_sweep(harmonic_grid_1d, harmonic_potential,
                                     [Params(1.0, 1.0), Params(2.0, 1.0)], FlowConfig(max_iters=2))
        assert [r.converged for r in results] == [False, False]
