"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line.  The production-scale sweep (N = 256,
n = 3..7, T = 1, seed 42, slope 1.2, cutoff 64, alpha 0.9) is executed once
in-process and reused; the determinism criterion reruns it twice through
the command line with different worker counts and compares bytes.
"""

import json
import math
import time

import numpy as np
import pytest

from lpvv.cli import main, write_report
from lpvv.flow import (
    FlowState,
    biot_savart,
    eigenfunction_vorticity,
    random_rough_vorticity,
    step,
)
from lpvv.grid import Grid2D, SpectralField, lp_norm
from lpvv.harness import SweepConfig, mid_band_log_check, osgood_envelope, run_sweep
from lpvv.lp import bony_residual, build_partition, phi_profile, shell_cz_audit

INF = math.inf

SWEEP_FIELDS = dict(seed=42, slope=1.2, cutoff=64, grid_N=256, T=1.0, alpha=0.9)
SWEEP_CFG_TEXT = (
    "n_list=3,4,5,6,7\nT=1\ngrid_N=256\nseed=42\nslope=1.2\ncutoff=64\nalpha=0.9\n"
)


def _report_line(num, ok, detail):
    print(f"\nACCEPTANCE {num:>2} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


@pytest.fixture(scope="session")
def sweep(tmp_path_factory):
    """Criterion-8 sweep, run once; returns (report, output dir)."""
    out = tmp_path_factory.mktemp("sweep_reference")
    config = SweepConfig(n_list=(3, 4, 5, 6, 7), **SWEEP_FIELDS)
    t0 = time.perf_counter()
    report = run_sweep(config, jobs=1)
    elapsed = time.perf_counter() - t0
    write_report(report, str(out))
    return report, out, elapsed


def test_criterion_01_bony_identity():
    grid = Grid2D(128)
    part = build_partition(grid)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(100):
        f = random_rough_vorticity(1000 + i, 0.6, grid.N // 3, grid)
        g = random_rough_vorticity(2000 + i, 0.9, grid.N // 3, grid)
        res = bony_residual(f, g, part)
        assert res.relative
        worst = max(worst, float(res))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 10.0
    _report_line(1, ok, f"Bony identity: worst residual {worst:.2e} "
                        f"(<= 1e-10), {elapsed:.1f}s (< 10s)")


def test_criterion_02_partition_of_unity():
    part = build_partition(Grid2D(256))
    radii = np.linspace(0.75 * 2.0**part.j_min, 4.0 / 3.0 * 2.0**part.j_max, 1000)
    total = sum(phi_profile(radii / 2.0**j) for j in part.shells())
    total = total + part.psi_profile(part.j_min, radii)
    dev = float(np.max(np.abs(total - 1.0)))
    _report_line(2, dev <= 1e-12, f"partition of unity: max deviation {dev:.2e} (<= 1e-12)")


def test_criterion_03_eigenfunction_viscous_decay():
    grid = Grid2D(64)
    nu, dt = 1e-2, 1e-3
    w0 = eigenfunction_vorticity(grid)
    state = FlowState(w0, 0.0, nu)
    worst = 0.0
    for k in range(1, 1001):
        state = step(state, dt, grid)
        if k % 100 == 0:
            exact = math.exp(-2.0 * nu * state.t)
            defect = np.max(np.abs(state.omega.coeffs - exact * w0.coeffs))
            worst = max(worst, defect / (0.25 * exact))
    _report_line(3, worst <= 1e-8,
                 f"viscous decay vs exp(-2 nu t): relative error {worst:.2e} (<= 1e-8)")


def test_criterion_04_euler_energy_conservation():
    grid = Grid2D(256)
    w0 = random_rough_vorticity(42, 1.2, 64, grid)
    state = FlowState(w0, 0.0, 0.0)
    area = grid.L**2

    def energy(s):
        v = biot_savart(s.omega, grid)
        return 0.5 * area * float(np.sum(np.abs(v.coeffs) ** 2))

    e0 = energy(state)
    dt = 1.0 / 64.0
    for _ in range(64):
        state = step(state, dt, grid)
    drift = abs(energy(state) - e0) / e0
    _report_line(4, drift <= 1e-8,
                 f"Euler energy conservation: |E(1)-E(0)|/E(0) = {drift:.2e} (<= 1e-8)")


def test_criterion_05_vorticity_maximum_principle():
    grid = Grid2D(256)
    w0 = random_rough_vorticity(42, 1.2, 64, grid)
    state = FlowState(w0, 0.0, 1e-3)
    m0 = float(np.max(np.abs(w0.phys())))
    worst = m0
    dt = 1.0 / 64.0
    for _ in range(64):
        state = step(state, dt, grid)
        worst = max(worst, float(np.max(np.abs(state.omega.phys()))))
    growth = worst / m0
    _report_line(5, growth <= 1.0 + 1e-6,
                 f"maximum principle (nu=1e-3): max ratio {growth:.9f} (<= 1 + 1e-6)")


def test_criterion_06_gradient_vorticity_shell_uniformity():
    grid = Grid2D(256)
    part = build_partition(grid)
    worst = 1.0
    for i in range(100):
        w = random_rough_vorticity(4200 + i, 0.6, grid.N // 3, grid)
        vals = list(shell_cz_audit(w, part).values())
        worst = max(worst, max(vals) / min(vals))
    _report_line(6, worst <= 2.0,
                 f"shell ratio spread over 100 fields: worst {worst:.3f} (<= 2)")


def test_criterion_07_mid_band_estimate():
    grid = Grid2D(256)
    part = build_partition(grid)
    worst = 0.0
    for i in range(50):
        g = random_rough_vorticity(7100 + i, 0.4, grid.N // 3, grid)
        for n in range(1, 8):
            worst = max(worst, mid_band_log_check(g, n, part).ratio)
    _report_line(7, worst <= 1.5,
                 f"mid-band ratio over n=1..7, 50 fields: worst {worst:.3f} (<= 1.5)")


def test_criterion_08_convergence_rate_skeleton(sweep):
    report, _, elapsed = sweep
    fit = report.fit
    errs = [m.err_total for m in report.members]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    threshold = report.config.alpha * math.exp(-fit.c1_hat * report.config.T)
    slope_ok = fit.theta >= threshold
    env_ok = fit.envelope_ok and fit.smallness_ok
    margin = INF
    for m, d in zip(report.members, report.deltas):
        env = np.array([
            osgood_envelope(fit.c_env, fit.c1_hat, report.config.T, m.n,
                            report.config.alpha, t)
            for t in m.times
        ])
        margin = min(margin, float(np.min(env - d)))
    budget_ok = elapsed < 900.0
    ok = decreasing and slope_ok and env_ok and margin >= -1e-12 and budget_ok
    _report_line(
        8, ok,
        "rate skeleton: errors "
        f"{['%.3e' % e for e in errs]} strictly decreasing={decreasing}; "
        f"theta {fit.theta:.3f} >= {threshold:.3f}={slope_ok}; envelope "
        f"dominates (min margin {margin:.2e})={env_ok}; "
        f"runtime {elapsed:.0f}s (< 900s)={budget_ok}",
    )


def test_criterion_09_eigenfunction_rate():
    config = SweepConfig(n_list=(3, 4, 5, 6, 7), T=1.0, grid_N=32,
                         sample_count=33, init="eigen", seed=0, alpha=0.9)
    report = run_sweep(config, jobs=1)
    fit = report.fit
    theta_ok = abs(fit.theta - 2.0) <= 0.05
    threshold = config.alpha * math.exp(-fit.c1_hat * config.T)
    margin_ok = fit.theta > threshold
    _report_line(9, theta_ok and margin_ok,
                 f"eigenfunction rate: theta {fit.theta:.4f} (= 2 +- 0.05), "
                 f"above rate bound {threshold:.3f} with margin")


def test_criterion_10_commutator_bound(sweep):
    report, _, _ = sweep
    ratios = np.concatenate([m.comm_ratio for m in report.members])
    spread = float(np.max(ratios) / np.median(ratios))
    _report_line(10, spread <= 10.0,
                 f"commutator bound spread across (n, t): max/median "
                 f"{spread:.2f} (<= 10)")


def test_criterion_11_determinism_across_jobs(sweep, tmp_path):
    _, ref_dir, _ = sweep
    cfg_file = tmp_path / "sweep.cfg"
    cfg_file.write_text(SWEEP_CFG_TEXT)
    out1 = tmp_path / "jobs1"
    out8 = tmp_path / "jobs8"
    assert main(["vv-sweep", "--config", str(cfg_file), "--out", str(out1),
                 "--jobs", "1"]) == 0
    assert main(["vv-sweep", "--config", str(cfg_file), "--out", str(out8),
                 "--jobs", "8"]) == 0
    csv1 = (out1 / "report.csv").read_bytes()
    csv8 = (out8 / "report.csv").read_bytes()
    csv_ref = (ref_dir / "report.csv").read_bytes()
    json_same = (out1 / "summary.json").read_bytes() == (out8 / "summary.json").read_bytes()
    rows = len(csv1.splitlines())
    ok = csv1 == csv8 and csv1 == csv_ref and json_same and rows == 1 + 5 * 65
    _report_line(11, ok,
                 f"determinism: jobs=1 vs jobs=8 CSV identical={csv1 == csv8}, "
                 f"matches reference run={csv1 == csv_ref}, JSON identical={json_same}, "
                 f"{rows} rows (= 326)")
