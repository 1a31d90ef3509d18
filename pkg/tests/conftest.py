import numpy as np
import pytest

from matched_adi.geometry import CircleInterface, Grid2D, find_crossings


@pytest.fixture(scope="session")
def unit_circle_grid21():
    """Coarse grid whose unit-circle cuts include four corner pairs."""
    grid = Grid2D(1.99, 21)
    iface = CircleInterface(1.0)
    return grid, iface, find_crossings(grid, iface)


@pytest.fixture(scope="session")
def half_circle_grid21():
    grid = Grid2D(0.99, 21)
    iface = CircleInterface(0.5)
    return grid, iface, find_crossings(grid, iface)


@pytest.fixture
def rng():
    return np.random.RandomState(1234)
