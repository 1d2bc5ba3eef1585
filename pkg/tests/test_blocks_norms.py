"""Frequency blocks, lowpasses and the shell norms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpvv.flow import random_rough_vorticity
from lpvv.grid import SpectralField, lp_norm
from lpvv.lp import (
    BesovSpec,
    besov_norm,
    build_partition,
    dyadic_block,
    lowpass,
    phi_profile,
    zygmund_norm,
)
from tests.conftest import single_mode

INF = math.inf


def brute_block(f, j, part):
    """Multiplier application recomputed without dyadic_block."""
    mult = phi_profile(f.grid.kmag / 2.0**j)
    return SpectralField(f.grid, f.coeffs * mult)


def test_block_of_low_mode_vanishes_high_shell(grid64, part64):
    f = single_mode(grid64, 2, 0)
    out = dyadic_block(f, 3, part64)
    assert np.all(out.coeffs == 0.0)  # 2^-3 * 2 is below the shell support


def test_block_amplitude_matches_profile(grid64, part64):
    f = single_mode(grid64, 2, 0, amp=1.0)
    out = dyadic_block(f, 0, part64)
    expected = phi_profile(2.0)  # read off the constructed cutoff
    assert 0.0 < expected <= 1.0
    assert lp_norm(out.phys(), INF, grid64) == pytest.approx(expected, rel=1e-13)
    brute = brute_block(f, 0, part64)
    assert np.max(np.abs(out.coeffs - brute.coeffs)) == 0.0


def test_block_reconstruction(grid64, part64):
    f = random_rough_vorticity(3, 0.8, 20, grid64)
    total = lowpass(f, part64.j_min, part64)
    for j in part64.shells():
        total = total + dyadic_block(f, j, part64)
    rel = lp_norm((total - f).phys(), INF, grid64) / lp_norm(f.phys(), INF, grid64)
    assert rel < 1e-12


def test_block_output_is_real(grid64, part64, rough64):
    out = dyadic_block(rough64, 2, part64)
    assert out.conj_symmetry_defect() < 1e-14


def test_inhomogeneous_conventions(grid64, part64, rough64):
    below = dyadic_block(rough64, -3, part64, homogeneous=False)
    assert np.all(below.coeffs == 0.0)
    lowest = dyadic_block(rough64, -1, part64, homogeneous=False)
    s0 = lowpass(rough64, 0, part64)
    assert np.max(np.abs(lowest.coeffs - s0.coeffs)) == 0.0
    for j in (0, 2, 4):
        hom = dyadic_block(rough64, j, part64)
        inhom = dyadic_block(rough64, j, part64, homogeneous=False)
        assert np.max(np.abs(hom.coeffs - inhom.coeffs)) == 0.0


def test_lowpass_identity_below_cutoff(grid64, part64):
    f = random_rough_vorticity(5, 1.0, 5, grid64)  # max |k| = 5 < 0.75 * 2^3
    out = lowpass(f, 3, part64)
    assert np.max(np.abs(out.coeffs - f.coeffs)) == 0.0


def test_lowpass_kills_mean_zero_field_below_range(grid64, part64, rough64):
    out = lowpass(rough64, part64.j_min - 1, part64)
    assert lp_norm(out.phys(), INF, grid64) < 1e-12


def test_lowpass_plus_tail_reconstructs(grid64, part64, rough64):
    n = 2
    total = lowpass(rough64, n, part64)
    for j in range(n, part64.j_max + 1):
        total = total + dyadic_block(rough64, j, part64)
    rel = lp_norm((total - rough64).phys(), INF, grid64)
    rel /= lp_norm(rough64.phys(), INF, grid64)
    assert rel < 1e-12


def test_lowpass_idempotent_up_to_overlap(grid64, part64, rough64):
    once = lowpass(rough64, 2, part64)
    twice = lowpass(once, 4, part64)
    assert np.max(np.abs(twice.coeffs - once.coeffs)) == 0.0


def test_besov_zero_field(grid64, part64):
    spec = BesovSpec(0.5, INF, INF)
    assert besov_norm(SpectralField.zero(grid64), spec, part64) == 0.0


def test_besov_single_mode_value(grid64, part64):
    # a sin(2x): the |k| = 2 mode meets shells 0 and 1 only
    a = 1.7
    f = single_mode(grid64, 2, 0, amp=a, phase=-np.pi / 2)
    spec = BesovSpec(0.0, INF, INF)
    expected = a * max(phi_profile(2.0), phi_profile(1.0))
    assert besov_norm(f, spec, part64) == pytest.approx(expected, rel=1e-12)


@given(st.floats(min_value=-50.0, max_value=50.0).filter(lambda x: abs(x) > 1e-8))
@settings(max_examples=25, deadline=None)
def test_besov_absolute_homogeneity(lam):
    from lpvv.grid import Grid2D

    grid = Grid2D(32)
    part = build_partition(grid)
    f = random_rough_vorticity(9, 0.6, 10, grid)
    spec = BesovSpec(0.3, INF, INF)
    base = besov_norm(f, spec, part)
    scaled = besov_norm(lam * f, spec, part)
    assert scaled == pytest.approx(abs(lam) * base, rel=1e-13)


def test_besov_triangle_inequality(grid64, part64):
    spec = BesovSpec(0.0, 4.0, 3.0)
    for i in range(5):
        a = random_rough_vorticity(100 + i, 0.7, 20, grid64)
        b = random_rough_vorticity(200 + i, 1.1, 20, grid64)
        lhs = besov_norm(a + b, spec, part64)
        rhs = besov_norm(a, spec, part64) + besov_norm(b, spec, part64)
        assert lhs <= rhs + 1e-12


def test_besov_finite_q_aggregation(grid64, part64):
    f = single_mode(grid64, 2, 0) + single_mode(grid64, 11, 0)
    s, p, q = 0.5, INF, 2.0
    terms = []
    for j in part64.shells():
        blk = dyadic_block(f, j, part64)
        v = lp_norm(blk.phys(), p, grid64)
        if v:
            terms.append(2.0 ** (j * s) * v)
    expected = float(np.sqrt(np.sum(np.asarray(terms) ** 2)))
    assert besov_norm(f, BesovSpec(s, p, q), part64) == pytest.approx(expected, rel=1e-13)


def test_besov_l2_norms_by_quadrature(grid64, part64, rough64):
    # p = 2 route agrees with Parseval on a single block
    blk = dyadic_block(rough64, 3, part64)
    quad = lp_norm(blk.phys(), 2.0, grid64)
    parseval = np.sqrt(grid64.L**2 * np.sum(np.abs(blk.coeffs) ** 2))
    assert quad == pytest.approx(parseval, rel=1e-12)


def test_zygmund_constant_field(grid64, part64):
    c = np.zeros((64, 64), dtype=np.complex128)
    c[0, 0] = -3.0
    f = SpectralField(grid64, c)
    # only the j = -1 block survives; weight 2^(-1) gives |c| / 2
    assert zygmund_norm(f, 1.0, part64) == pytest.approx(1.5, rel=1e-13)
    assert zygmund_norm(SpectralField.zero(grid64), 1.0, part64) == 0.0


def test_zygmund_dominated_by_lowpass_plus_tail(grid64, part64):
    for i in range(5):
        f = random_rough_vorticity(300 + i, 0.9, 20, grid64)
        lhs = zygmund_norm(f, 1.0, part64)
        s0 = lp_norm(lowpass(f, 0, part64).phys(), INF, grid64)
        tail = max(
            2.0**j * lp_norm(dyadic_block(f, j, part64).phys(), INF, grid64)
            for j in range(0, part64.j_max + 1)
        )
        assert lhs <= s0 + tail + 1e-12


def test_invalid_besov_indices():
    from lpvv.errors import ConfigurationError

    with pytest.raises(ConfigurationError):
        BesovSpec(0.0, 0.5, INF)
    with pytest.raises(ConfigurationError):
        BesovSpec(0.0, INF, 0.0)
