"""Pytest configuration and shared fixtures."""
import numpy as np
import pytest

from nlsground.core.asymptotics.layer import solve_layer_ode
from nlsground.core.models.schemas import (
    FlowConfig,
    GaussianProfile,
    Grid,
    PotentialSpec,
    WaveFunction,
)


@pytest.fixture
def unit_box_grid():
    """Fixture providing the interval (0, 1) with 255 interior points."""
    return Grid.uniform(0.0, 1.0, 255)


@pytest.fixture
def harmonic_grid_1d():
    """Fixture providing the interval (-8, 8) with 255 interior points."""
    return Grid.uniform(-8.0, 8.0, 255)


@pytest.fixture
def fine_harmonic_grid():
    """Fixture providing the interval (-8, 8) with 511 interior points."""
    return Grid.uniform(-8.0, 8.0, 511)


@pytest.fixture
def small_square_grid():
    """Fixture providing a coarse 2D grid on (-6, 6)^2."""
    return Grid.uniform(-6.0, 6.0, 31, dim=2)


@pytest.fixture
def harmonic_potential():
    """Fixture providing the harmonic trap with gamma = 1."""
    return PotentialSpec.harmonic(1.0)


@pytest.fixture
def box_potential():
    """Fixture providing the zero potential of a box."""
    return PotentialSpec.box()


@pytest.fixture
def gaussian_phi(harmonic_grid_1d):
    """Fixture providing the gamma = 1 Gaussian sampled on (-8, 8)."""
    values = GaussianProfile((1.0,)).evaluate(harmonic_grid_1d.axes()[0])
    return WaveFunction(harmonic_grid_1d, values)


@pytest.fixture
def sine_phi(unit_box_grid):
    """Fixture providing sqrt(2) sin(pi x), exactly normalized on the unit box grid."""
    x = unit_box_grid.axes()[0]
    return WaveFunction(unit_box_grid, np.sqrt(2.0) * np.sin(np.pi * x))


@pytest.fixture
def quick_flow():
    """Fixture providing flow settings with a loose tolerance for fast solves."""
    return FlowConfig(tol=1e-8)


@pytest.fixture
def layer_sigma_one():
    """Fixture providing the boundary-layer profile for sigma = 1."""
    return solve_layer_ode(1.0)


@pytest.fixture
def run_flags(tmp_path):
    """Fixture providing command-line flags that write into a temporary directory."""
    return {"out": str(tmp_path / "results"), "threads": 1, "quiet": True}
