"""Tests for the large-sigma bifurcation scan."""
import math

import numpy as np
import pytest

from nlsground.core.errors import InvalidParamsError
from nlsground.core.gflow.domains import box_grid
from nlsground.core.models.schemas import Classification, Grid, PotentialSpec, WaveFunction
from nlsground.core.regimes.bifurcation import (
    bifurcation_scan,
    classify_scan,
    plateau_width,
    threshold_parameter,
)


class TestClassifyScan:
    """Tests for classify_scan."""

    def test_linear_limit(self):
        """Linear peak and final peak below 1 with shrinking distance."""
        result = classify_scan(0.95, [0.9, 0.94], [0.0, 0.0], [0.2, 0.05])
        assert result == Classification.LINEAR_LIMIT

    def test_flat_top(self):
        """Linear peak above 1, final peak pinned at 1 and a widening plateau."""
        result = classify_scan(1.1, [1.05, 1.01], [0.1, 0.6], [0.3, 0.4])
        assert result == Classification.FLAT_TOP

    def test_thomas_fermi(self):
        """A final peak clearly above 1."""
        assert classify_scan(1.49, [1.3, 1.1], [0.0, 0.0], [0.1, 0.2]) == Classification.THOMAS_FERMI

    def test_unresolved_without_growing_plateau(self):
        """A peak near 1 without a widening plateau is unresolved."""
        result = classify_scan(1.1, [1.05, 1.01], [0.5, 0.5], [0.3, 0.4])
        assert result == Classification.UNRESOLVED

    def test_unresolved_when_moving_away_from_linear(self):
        """Peaks below 1 that drift away from the linear state are unresolved."""
        result = classify_scan(0.95, [0.9, 0.8], [0.0, 0.0], [0.05, 0.2])
        assert result == Classification.UNRESOLVED

    def test_custom_tolerance(self):
        """A looser delta widens the flat-top band."""
        peaks, widths = [1.1, 1.03], [0.1, 0.6]
        assert classify_scan(1.2, peaks, widths, [0.3, 0.3]) == Classification.THOMAS_FERMI
        assert classify_scan(1.2, peaks, widths, [0.3, 0.3], delta=0.05) == Classification.FLAT_TOP


class TestScanHelpers:
    """Tests for plateau_width and threshold_parameter."""

    def test_plateau_width_of_constant(self, unit_box_grid):
        """The constant 1 is a plateau over every node."""
        phi = WaveFunction(unit_box_grid, np.ones(255))
        assert plateau_width(phi) == pytest.approx(255.0 / 256.0)

    def test_plateau_width_of_gaussian(self, gaussian_phi):
        """A Gaussian peaking below 1 - delta has no plateau."""
        assert plateau_width(gaussian_phi) == 0.0

    def test_threshold_parameter(self, harmonic_grid_1d):
        """gamma for traps, the length for boxes, nan for sampled potentials."""
        assert threshold_parameter(harmonic_grid_1d, PotentialSpec.harmonic(3.0)) == 3.0
        assert threshold_parameter(box_grid(1.5, 63), PotentialSpec.box()) == 1.5
        custom = PotentialSpec.custom(np.zeros(255))
        assert math.isnan(threshold_parameter(harmonic_grid_1d, custom))


class TestBifurcationScan:
    """Tests for bifurcation_scan."""

    def test_requires_ascending_sigma(self, unit_box_grid, box_potential):
        """sigma_list must be strictly ascending."""
        with pytest.raises(InvalidParamsError) as excinfo:
            bifurcation_scan(unit_box_grid, box_potential, 1.0, [2.0, 1.0])
        assert "strictly ascending" in str(excinfo.value)

    def test_requires_sigmas(self, unit_box_grid, box_potential):
        """An empty scan is refused."""
        with pytest.raises(InvalidParamsError):
            bifurcation_scan(unit_box_grid, box_potential, 1.0, [])

    def test_short_box_is_thomas_fermi(self, box_potential):
        """On (0, 0.9) every normalized state peaks above 1/sqrt(0.9)."""
        grid = Grid.uniform(0.0, 0.9, 255)
        report = bifurcation_scan(grid, box_potential, 1.0, [1.0, 2.0, 4.0, 8.0])
        assert report.classification == Classification.THOMAS_FERMI
        assert report.threshold_parameter == pytest.approx(0.9)
        assert report.linear_peak == pytest.approx(math.sqrt(2.0 / 0.9), rel=1e-4)
        assert all(report.converged)
        assert len(report.peak_values) == 4
        assert min(report.peak_values) > 1.0 / math.sqrt(0.9)
