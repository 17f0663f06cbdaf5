import pytest

from besovsampling.grid import Grid1D, Grid2D, default_grid_1d
from besovsampling.wavelets import build_basis


@pytest.fixture(scope="session")
def db4():
    return build_basis("daubechies", 4, depth=12)


@pytest.fixture(scope="session")
def haar():
    return build_basis("haar")


@pytest.fixture(scope="session")
def grid():
    return default_grid_1d()


@pytest.fixture(scope="session")
def small_grid():
    # cheap grid for unit tests: h = 2^-6 on [-8, 8)
    return Grid1D(-8.0, 2.0**-6, 1024)


@pytest.fixture(scope="session")
def small_grid2d():
    g = Grid1D(-8.0, 2.0**-5, 512)
    return Grid2D(g, Grid1D(-8.0, 2.0**-5, 512))
