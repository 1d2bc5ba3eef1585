"""Paraproduct, remainder and the exactness of the Bony identity."""

import numpy as np
import pytest

from lpvv.errors import GridMismatchError
from lpvv.flow import random_rough_vorticity
from lpvv.grid import Grid2D, SpectralField, dealiased_product
from lpvv.lp import (
    bony_decomposition_phys,
    bony_residual,
    build_partition,
    paraproduct,
    remainder,
)
from tests.conftest import single_mode


def shell_only_field(grid, k1, k2):
    """Single real mode placed where exactly one shell is active."""
    return single_mode(grid, k1, k2, amp=0.8, phase=0.3)


def test_paraproduct_empty_when_g_in_lowest_shell(grid64, part64, rough64):
    g = shell_only_field(grid64, 1, 1)  # |k| = sqrt(2): only shell 0 sees it
    out = paraproduct(rough64, g, part64)
    assert np.all(out.coeffs == 0.0)


def test_paraproduct_low_high_pair_is_plain_product(grid128, part128):
    f = shell_only_field(grid128, 1, 1)  # shell 0 only
    g = shell_only_field(grid128, 44, 10)  # |k| ~ 45.1: shell 5 only
    tfg = paraproduct(f, g, part128)
    fg = dealiased_product(f, g)
    assert np.max(np.abs(tfg.coeffs - fg.coeffs)) < 1e-15
    assert np.all(paraproduct(g, f, part128).coeffs == 0.0)
    assert np.all(remainder(f, g, part128).coeffs == 0.0)


def test_paraproduct_of_zero(grid64, part64, rough64):
    zero = SpectralField.zero(grid64)
    assert np.all(paraproduct(zero, rough64, part64).coeffs == 0.0)


def test_remainder_symmetric_exactly(grid64, part64):
    f = random_rough_vorticity(21, 0.5, 20, grid64)
    g = random_rough_vorticity(22, 1.0, 20, grid64)
    r1 = remainder(f, g, part64)
    r2 = remainder(g, f, part64)
    assert np.array_equal(r1.coeffs, r2.coeffs)


def test_remainder_single_shell_square(grid64, part64):
    f = shell_only_field(grid64, 11, 0)  # |k| = 11: shell 3 only
    rr = remainder(f, f, part64)
    ff = dealiased_product(f, f)
    assert np.max(np.abs(rr.coeffs - ff.coeffs)) < 1e-15
    assert np.all(paraproduct(f, f, part64).coeffs == 0.0)


def test_remainder_of_zero(grid64, part64, rough64):
    zero = SpectralField.zero(grid64)
    assert np.all(remainder(rough64, zero, part64).coeffs == 0.0)


def test_grid_mismatch_rejected(grid64, grid128, part64):
    f = random_rough_vorticity(1, 0.5, 10, grid64)
    g = random_rough_vorticity(1, 0.5, 10, grid128)
    with pytest.raises(GridMismatchError):
        paraproduct(f, g, part64)
    with pytest.raises(GridMismatchError):
        remainder(f, g, part64)


def test_bony_residual_random_pairs(grid64, part64):
    worst = 0.0
    for i in range(5):
        f = random_rough_vorticity(500 + i, 0.8, 20, grid64)
        g = random_rough_vorticity(600 + i, 0.5, 20, grid64)
        res = bony_residual(f, g, part64)
        assert res.relative
        worst = max(worst, float(res))
    assert worst <= 1e-10


def test_bony_residual_constant_factor(grid64, part64, rough64):
    c = np.zeros((64, 64), dtype=np.complex128)
    c[0, 0] = 2.5
    res = bony_residual(SpectralField(grid64, c), rough64, part64)
    assert float(res) <= 1e-12


def test_bony_residual_single_mode(grid64, part64):
    f = single_mode(grid64, 3, 1)
    res = bony_residual(f, f, part64)
    assert float(res) <= 1e-12


def test_bony_residual_zero_product_flagged(grid64, part64):
    zero = SpectralField.zero(grid64)
    res = bony_residual(zero, zero, part64)
    assert not res.relative
    assert float(res) == 0.0


def test_fast_assembly_matches_composed_operators(grid64, part64):
    f = random_rough_vorticity(31, 0.7, 20, grid64)
    g = random_rough_vorticity(32, 0.9, 20, grid64)
    t_fg, t_gf, rem = bony_decomposition_phys(f, g, part64)
    scale = np.max(np.abs(paraproduct(f, g, part64).coeffs))
    assert np.max(np.abs(grid_back(grid64, t_fg) - paraproduct(f, g, part64).coeffs)) < 1e-14 * scale
    assert np.max(np.abs(grid_back(grid64, t_gf) - paraproduct(g, f, part64).coeffs)) < 1e-14 * scale
    assert np.max(np.abs(grid_back(grid64, rem) - remainder(f, g, part64).coeffs)) < 1e-14


def grid_back(grid, phys_pad):
    return grid.from_phys_pad(phys_pad)
