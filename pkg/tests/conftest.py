import numpy as np
import pytest

from lpvv.flow import random_rough_vorticity
from lpvv.grid import Grid2D, SpectralField
from lpvv.lp import build_partition


@pytest.fixture(scope="session")
def grid64():
    return Grid2D(64)


@pytest.fixture(scope="session")
def grid128():
    return Grid2D(128)


@pytest.fixture(scope="session")
def part64(grid64):
    return build_partition(grid64)


@pytest.fixture(scope="session")
def part128(grid128):
    return build_partition(grid128)


@pytest.fixture()
def rough64(grid64):
    return random_rough_vorticity(11, 0.9, 20, grid64)


def single_mode(grid, k1, k2, amp=1.0, phase=0.0):
    """Real field amp*cos(k.x + phase) as a SpectralField."""
    c = np.zeros((grid.N, grid.N), dtype=np.complex128)
    val = 0.5 * amp * np.exp(1j * phase)
    c[k1 % grid.N, k2 % grid.N] = val
    c[-k1 % grid.N, -k2 % grid.N] = np.conj(val)
    return SpectralField(grid, c)
