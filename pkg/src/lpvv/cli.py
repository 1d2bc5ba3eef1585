"""Command-line surface: configuration, orchestration and report I/O.

Subcommands map one-to-one onto the operation suites:

    partition-check  dyadic partition invariants on a grid
    besov            norm computation plus norm-axiom audit
    solve            one trajectory with conservation/maximum audits
    vv-sweep         full viscosity sweep, rate fit, CSV/JSON report
    proof-audit      per-term inequality audits at desk scale

Exit codes: 0 all audits pass, 1 audit failure, 2 usage or configuration
error, 3 I/O error.  Config files are flat ``key=value`` text with ``#``
comments; unknown keys are rejected.  The default output directory is
``--out``, else $LPVV_OUT, else the working directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from lpvv.errors import (
    AuditFailure,
    CFLError,
    ConfigurationError,
    InconsistencyError,
    PreconditionError,
    SamplingError,
    SmallnessError,
)
from lpvv.flow import (
    FlowState,
    biot_savart,
    diagnostics,
    random_rough_vorticity,
    step,
)
from lpvv.grid import Grid2D, SpectralField, lp_norm
from lpvv.harness import (
    RateReport,
    SweepConfig,
    envelope_series,
    initial_vorticity,
    mid_band_log_check,
    run_sweep,
    _resolve_dt,
)
from lpvv.lp import (
    BesovSpec,
    bernstein_audit,
    besov_norm,
    bony_residual,
    build_partition,
    dyadic_block,
    lowpass,
    phi_profile,
    shell_cz_audit,
)
from lpvv.snapshots import write_snapshot

CONFIG_KEYS = (
    "n_list",
    "T",
    "dt",
    "alpha",
    "grid_N",
    "seed",
    "slope",
    "cutoff",
    "sample_times",
    "sample_count",
    "init",
)
REQUIRED_KEYS = ("n_list", "T")


@dataclass
class RunConfig:
    """Parsed command line: subcommand, paths, overrides, parallelism."""

    subcommand: str
    config_path: str | None = None
    out_dir: str = "."
    overrides: dict = field(default_factory=dict)
    seed: int | None = None
    jobs: int = 0  # 0 means the available core count


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="lpvv",
        description="Frequency-decomposition toolkit and vanishing-viscosity harness",
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    descriptions = {
        "partition-check": "verify the dyadic partition invariants",
        "besov": "compute a shell norm and audit the norm axioms",
        "solve": "run one trajectory and audit its conservation laws",
        "vv-sweep": "run the viscosity sweep and fit the convergence rate",
        "proof-audit": "audit every per-term inequality at desk scale",
    }
    for name, desc in descriptions.items():
        p = sub.add_parser(name, help=desc, description=desc)
        p.add_argument("--config", metavar="PATH", help="key=value config file")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument(
            "--set",
            metavar="KEY=VALUE",
            action="append",
            default=[],
            dest="overrides",
            help="override one config key (repeatable)",
        )
        p.add_argument("--seed", type=int, help="override the experiment seed")
        p.add_argument(
            "--jobs",
            type=int,
            default=0,
            help="parallel sweep workers (default: available cores)",
        )
    return parser


def parse_cli(argv) -> RunConfig:
    """Strict argv parse; unknown flags or subcommands exit with code 2."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_help(sys.stderr)
        raise SystemExit(2)
    overrides = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    out = args.out or os.environ.get("LPVV_OUT") or "."
    return RunConfig(
        subcommand=args.subcommand,
        config_path=args.config,
        out_dir=out,
        overrides=overrides,
        seed=args.seed,
        jobs=args.jobs if args.jobs > 0 else (os.cpu_count() or 1),
    )


# -- config file ------------------------------------------------------------


def _coerce(key, raw):
    try:
        if key == "n_list":
            return tuple(int(tok) for tok in str(raw).split(",") if tok.strip())
        if key == "sample_times":
            return tuple(float(tok) for tok in str(raw).split(",") if tok.strip())
        if key in ("T", "dt", "alpha", "slope"):
            return float(raw)
        if key in ("grid_N", "seed", "cutoff", "sample_count"):
            return int(raw)
        if key == "init":
            return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"config key {key!r}: cannot parse {raw!r}") from exc
    raise ConfigurationError(f"unknown config key {key!r}")


def load_config(path, overrides=None, seed=None, defaults=None) -> SweepConfig:
    """Parse a flat key=value config file into a SweepConfig.

    Keys absent from the file fall back to the defaults; unknown or
    ill-typed keys raise ConfigurationError naming the key.  When no file
    is given the required keys must come from the defaults or overrides.
    """
    values = dict(defaults or {})
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                if "=" not in text:
                    raise ConfigurationError(
                        f"{path}:{lineno}: expected key=value, got {text!r}"
                    )
                key, _, raw = text.partition("=")
                key = key.strip()
                if key not in CONFIG_KEYS:
                    raise ConfigurationError(f"{path}:{lineno}: unknown config key {key!r}")
                values[key] = _coerce(key, raw.strip())
    for key, raw in (overrides or {}).items():
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"unknown config key {key!r}")
        values[key] = _coerce(key, raw) if isinstance(raw, str) else raw
    if seed is not None:
        values["seed"] = int(seed)
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigurationError(
            "missing required config keys: " + ", ".join(sorted(missing))
        )
    return SweepConfig(**values)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def echo_config(config: SweepConfig, out_dir) -> str:
    """Write the resolved configuration next to the results."""
    path = os.path.join(out_dir, "config.echo.cfg")
    lines = []
    for f in ("n_list", "T", "dt", "alpha", "grid_N", "seed", "slope",
              "cutoff", "sample_count", "init"):
        val = getattr(config, f)
        if val is None:
            continue
        if isinstance(val, tuple):
            val = ",".join(str(v) for v in val)
        lines.append(f"{f}={_fmt(val)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


# -- report writer -----------------------------------------------------------

CSV_COLUMNS = ("n", "nu", "t", "err_sup", "low", "mid", "high",
               "besov_b0", "delta_n", "envelope")


def write_report(report: RateReport, out_dir) -> dict:
    """Write CSV rows per (n, t), a JSON summary and field snapshots.

    Output bytes depend only on (config, seed), not on the worker count.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {"config": echo_config(report.config, out_dir)}

    csv_path = os.path.join(out_dir, "report.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for m, delta in zip(report.members, report.deltas):
            env = envelope_series(report, m)
            for i, t in enumerate(m.times):
                row = (
                    str(m.n),
                    _fmt(m.nu),
                    _fmt(float(t)),
                    _fmt(float(m.err_sup[i])),
                    _fmt(float(m.low[i])),
                    _fmt(float(m.mid[i])),
                    _fmt(float(m.high[i])),
                    _fmt(float(m.besov[i])),
                    _fmt(float(delta[i])),
                    _fmt(float(env[i])),
                )
                fh.write(",".join(row) + "\n")
    paths["csv"] = csv_path

    fit = report.fit
    summary = {
        "theta": fit.theta if fit else None,
        "C": fit.c_env if fit else None,
        "C1": fit.c1_hat if fit else None,
        "C_rate": fit.c_rate if fit else None,
        "C_init": fit.c_init if fit else None,
        "C_force": fit.c_force if fit else None,
        "C_regularity": report.c33_hat,
        "A": report.A,
        "envelope_ok": fit.envelope_ok if fit else None,
        "monotone": fit.monotone if fit else None,
        "flags": list(fit.flags) if fit else [],
        "config": {
            "n_list": list(report.config.n_list),
            "T": report.config.T,
            "dt": report.config.dt,
            "alpha": report.config.alpha,
            "grid_N": report.config.grid_N,
            "seed": report.config.seed,
            "slope": report.config.slope,
            "cutoff": report.config.resolved_cutoff(),
            "sample_count": len(report.members[0].times),
            "init": report.config.init,
        },
    }
    json_path = os.path.join(out_dir, "summary.json")
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths["json"] = json_path

    first = report.members[0]
    if first.omega0_phys is not None:
        p = os.path.join(out_dir, "omega0.lpvv")
        write_snapshot(p, first.omega0_phys, 0.0, 0.0, report.config.seed)
        paths["omega0"] = p
    if first.euler_final_phys is not None:
        p = os.path.join(out_dir, "euler_final.lpvv")
        write_snapshot(p, first.euler_final_phys, report.config.T, 0.0,
                       report.config.seed)
        paths["euler_final"] = p
    for m in report.members:
        if m.ns_final_phys is None:
            continue
        p = os.path.join(out_dir, f"ns_final_n{m.n}.lpvv")
        write_snapshot(p, m.ns_final_phys, report.config.T, m.nu, report.config.seed)
        paths[f"ns_final_n{m.n}"] = p
    return paths


# -- audit plumbing ----------------------------------------------------------


class _Audit:
    """Collects named pass/fail checks and prints one line each."""

    def __init__(self):
        self.failures = 0

    def check(self, name, ok, detail=""):
        tag = "PASS" if ok else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        print(f"{tag}: {name}{suffix}")
        if not ok:
            self.failures += 1
        return ok

    @property
    def exit_code(self):
        return 0 if self.failures == 0 else 1


def _spread(values, floor=1e-12):
    vals = [v for v in values if v > floor]
    if len(vals) < 2:
        return 1.0
    return max(vals) / min(vals)


def _progress(msg):
    print(msg, file=sys.stderr)


# -- subcommands -------------------------------------------------------------


def _grid_from(run: RunConfig, default_n=256):
    raw = run.overrides.get("grid_N", default_n)
    return Grid2D(int(raw))


def cmd_partition_check(run: RunConfig) -> int:
    grid = _grid_from(run)
    part = build_partition(grid)
    seed = run.seed if run.seed is not None else 0
    audit = _Audit()

    radii = np.linspace(0.75 * 2.0**part.j_min, 4.0 / 3.0 * 2.0**part.j_max, 1000)
    total = sum(phi_profile(radii / 2.0**j) for j in part.shells())
    total = total + part.psi_profile(part.j_min, radii)
    audit.check(
        "partition of unity on 1000 radii",
        float(np.max(np.abs(total - 1.0))) <= 1e-12,
        f"max dev {np.max(np.abs(total - 1.0)):.2e}",
    )

    probe = np.linspace(0.0, 4.0 / 3.0 * 2.0**part.j_max, 4001)
    disjoint = True
    for j in part.shells():
        for jp in part.shells():
            if abs(j - jp) >= 2:
                prod = phi_profile(probe / 2.0**j) * phi_profile(probe / 2.0**jp)
                disjoint &= bool(np.all(prod == 0.0))
    audit.check("shell supports disjoint beyond neighbors", disjoint)

    supp = np.concatenate([np.linspace(0, 0.75, 200), np.linspace(8 / 3, 6, 200)])
    audit.check(
        "phi vanishes outside [3/4, 8/3]",
        bool(np.all(phi_profile(supp) == 0.0)),
    )

    worst = 0.0
    ortho_ok = True
    for i in range(20):
        f = random_rough_vorticity(seed + i, 0.8, grid.N // 3, grid)
        total_f = lowpass(f, part.j_min, part)
        for j in part.shells():
            total_f = total_f + dyadic_block(f, j, part)
        defect = lp_norm((total_f - f).phys(), math.inf, grid)
        worst = max(worst, defect / lp_norm(f.phys(), math.inf, grid))
        b3 = dyadic_block(dyadic_block(f, 3, part), 5, part)
        ortho_ok &= bool(np.all(b3.coeffs == 0.0))
    audit.check("reconstruction on 20 random fields", worst <= 1e-12,
                f"worst {worst:.2e}")
    audit.check("blocks two shells apart annihilate", ortho_ok)
    return audit.exit_code


_BESOV_KEYS = ("s", "p", "q", "homogeneous")


def _parse_extended(raw):
    if isinstance(raw, str) and raw.strip().lower() in ("inf", "infinity"):
        return math.inf
    return float(raw)


def cmd_besov(run: RunConfig) -> int:
    extras = {k: v for k, v in run.overrides.items() if k in _BESOV_KEYS}
    cfg_over = {k: v for k, v in run.overrides.items() if k not in _BESOV_KEYS}
    config = load_config(
        run.config_path, cfg_over, run.seed,
        defaults={"n_list": (3,), "T": 1.0, "grid_N": 128},
    )
    spec = BesovSpec(
        s=_parse_extended(extras.get("s", 0.0)),
        p=_parse_extended(extras.get("p", math.inf)),
        q=_parse_extended(extras.get("q", math.inf)),
        homogeneous=str(extras.get("homogeneous", "true")).lower() != "false",
    )
    grid = Grid2D(config.grid_N)
    part = build_partition(grid)
    if run.out_dir != ".":
        os.makedirs(run.out_dir, exist_ok=True)
        echo_config(config, run.out_dir)
    f = initial_vorticity(config, grid)
    value = besov_norm(f, spec, part)
    print(f"besov_norm(s={spec.s}, p={spec.p}, q={spec.q}, "
          f"homogeneous={spec.homogeneous}) = {value:.12g}")

    audit = _Audit()
    scaled = besov_norm(3.0 * f, spec, part)
    audit.check(
        "absolute homogeneity",
        abs(scaled - 3.0 * value) <= 1e-13 * max(scaled, 1e-300),
        f"defect {abs(scaled - 3.0 * value):.2e}",
    )
    worst = 0.0
    for i in range(10):
        a = random_rough_vorticity(config.seed + 10 + i, 0.7, grid.N // 3, grid)
        b = random_rough_vorticity(config.seed + 50 + i, 1.1, grid.N // 3, grid)
        lhs = besov_norm(a + b, spec, part)
        rhs = besov_norm(a, spec, part) + besov_norm(b, spec, part)
        worst = max(worst, lhs - rhs)
    audit.check("triangle inequality on 10 random pairs", worst <= 1e-12,
                f"worst excess {worst:.2e}")
    zero = SpectralField.zero(grid)
    audit.check("zero field has zero norm",
                besov_norm(zero, spec, part) == 0.0)
    return audit.exit_code


def cmd_solve(run: RunConfig) -> int:
    extras = {k: v for k, v in run.overrides.items() if k in ("nu", "n")}
    cfg_over = {k: v for k, v in run.overrides.items() if k not in ("nu", "n")}
    config = load_config(
        run.config_path, cfg_over, run.seed,
        defaults={"n_list": (3,), "T": 1.0},
    )
    if "nu" in extras:
        nu = float(extras["nu"])
    elif "n" in extras:
        nu = 2.0 ** (-2 * int(extras["n"]))
    else:
        nu = 0.0

    grid = Grid2D(config.grid_N)
    part = build_partition(grid)
    omega0 = initial_vorticity(config, grid)
    times = config.resolved_sample_times()
    dt = _resolve_dt(config, omega0, grid, times)
    _progress(f"solve: nu={nu:.3e} N={grid.N} dt={dt:.3e} T={config.T}")

    state = FlowState(omega0.copy(), 0.0, nu)
    area = grid.L**2
    energies = [0.5 * area * float(np.sum(np.abs(biot_savart(state.omega, grid).coeffs) ** 2))]
    enstrophies = [0.5 * area * float(np.sum(np.abs(state.omega.coeffs) ** 2))]
    maxvorts = [float(np.max(np.abs(state.omega.phys())))]
    rows = []
    sample_set = {int(round(t / dt)) for t in times}
    total_steps = int(round(config.T / dt))

    def record_row(s):
        d = diagnostics(s, grid)
        rows.append((s.t, d.energy, d.enstrophy, d.max_vorticity, d.c1star_norm))

    record_row(state)
    for k in range(1, total_steps + 1):
        state = step(state, dt, grid)
        v = biot_savart(state.omega, grid)
        energies.append(0.5 * area * float(np.sum(np.abs(v.coeffs) ** 2)))
        enstrophies.append(0.5 * area * float(np.sum(np.abs(state.omega.coeffs) ** 2)))
        maxvorts.append(float(np.max(np.abs(state.omega.phys()))))
        if k in sample_set:
            record_row(state)

    os.makedirs(run.out_dir, exist_ok=True)
    echo_config(config, run.out_dir)
    diag_path = os.path.join(run.out_dir, "diagnostics.csv")
    with open(diag_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,energy,enstrophy,max_vorticity,c1star\n")
        for row in rows:
            fh.write(",".join(_fmt(float(x)) for x in row) + "\n")
    write_snapshot(os.path.join(run.out_dir, "omega0.lpvv"),
                   omega0.phys(), 0.0, nu, config.seed)
    write_snapshot(os.path.join(run.out_dir, "omega_final.lpvv"),
                   state.omega.phys(), state.t, nu, config.seed)

    audit = _Audit()
    e = np.asarray(energies)
    z = np.asarray(enstrophies)
    if nu == 0.0:
        drift = abs(e[-1] - e[0]) / e[0] if e[0] > 0 else 0.0
        audit.check("energy conserved", drift <= 1e-8, f"relative drift {drift:.2e}")
    else:
        worst = 0.0
        for i in range(2, len(e) - 2):
            deriv = (-e[i + 2] + 8 * e[i + 1] - 8 * e[i - 1] + e[i - 2]) / (12 * dt)
            target = -2.0 * nu * z[i]
            worst = max(worst, abs(deriv - target) / abs(target))
        audit.check("energy dissipation law dE/dt = -2 nu enstrophy",
                    worst <= 1e-6, f"worst relative defect {worst:.2e}")
    growth = max(maxvorts) / maxvorts[0]
    tol = 1e-6 if nu > 0 else 1e-3
    audit.check("vorticity maximum principle", growth <= 1.0 + tol,
                f"max growth {growth - 1.0:.2e}")
    c1_vals = [r[4] for r in rows]
    base = lp_norm(biot_savart(omega0, grid).phys(), 2.0, grid) + maxvorts[0]
    audit.check("velocity regularity bounded along the run",
                max(c1_vals) <= 100.0 * base,
                f"fitted constant {max(c1_vals) / base:.2f}")
    print(f"wrote {diag_path}")
    return audit.exit_code


def cmd_vv_sweep(run: RunConfig) -> int:
    config = load_config(run.config_path, run.overrides, run.seed,
                         defaults={"n_list": (3, 4, 5, 6, 7), "T": 1.0})
    _progress(f"vv-sweep: {len(config.n_list)} members on N={config.grid_N}, "
              f"jobs={run.jobs}")
    report = run_sweep(config, jobs=run.jobs)
    for m in report.members:
        _progress(f"  member n={m.n}: sup error {m.err_total:.4e}")
    paths = write_report(report, run.out_dir)
    print(f"wrote {paths['csv']} and {paths['json']}")

    audit = _Audit()
    tri = min(m.triangle_margin_min for m in report.members)
    audit.check("band split dominates the total error", tri >= -1e-12,
                f"min margin {tri:.2e}")
    audit.check("normalized differences bounded by one",
                all(float(np.max(d)) <= 1.0 for d in report.deltas))
    fit = report.fit
    if fit is None:
        audit.check("rate fit available (needs >= 3 members)", False)
        return audit.exit_code
    audit.check("envelope smallness condition", fit.smallness_ok,
                f"C={fit.c_env:.3g}")
    audit.check("delta dominated by the Osgood envelope", fit.envelope_ok)
    audit.check("fitted slope positive", fit.theta > 0,
                f"theta {fit.theta:.3f}")
    if not fit.monotone:
        _progress("note: sup error not strictly decreasing in n (soft flag)")
    print(f"theta={fit.theta:.4f} C={fit.c_env:.4g} C1={fit.c1_hat:.4g} "
          f"envelope_ok={fit.envelope_ok}")
    return audit.exit_code


def _fejer_field(grid, lam):
    """Positive-kernel field with triangular radial profile, band |k| <= lam."""
    amp = np.maximum(0.0, 1.0 - grid.kmag / lam)
    amp[0, 0] = 0.0  # mean-zero so shell audits apply
    amp[grid._nyq] = 0.0
    return SpectralField(grid, amp.astype(np.complex128))


def cmd_proof_audit(run: RunConfig) -> int:
    config = load_config(
        run.config_path, run.overrides, run.seed,
        defaults={"n_list": (3, 4, 5), "T": 0.5, "grid_N": 128,
                  "sample_count": 33, "cutoff": 32},
    )
    grid = Grid2D(config.grid_N)
    part = build_partition(grid)
    if run.out_dir != ".":
        os.makedirs(run.out_dir, exist_ok=True)
        echo_config(config, run.out_dir)
    audit = _Audit()

    _progress("proof-audit: operator inequalities")
    lams = [4.0 * 2**i for i in range(5) if 4 * 2**i <= grid.N // 4]
    ratios = []
    for lam in lams:
        f = _fejer_field(grid, lam)
        ratios.append(bernstein_audit(f, 0, 1.0, math.inf, lam).ratio)
    audit.check("Bernstein constant uniform across octaves",
                _spread(ratios) <= 3.0,
                f"spread {_spread(ratios):.2f} over lambda {lams}")

    mode = SpectralField.zero(grid)
    mode.coeffs[5, 0] = -0.5j
    mode.coeffs[-5, 0] = 0.5j
    ann = bernstein_audit(mode, 1, math.inf, math.inf, 5.0, annular=True)
    audit.check("two-sided derivative bounds on an annulus",
                0.2 <= ann.lower_ratio <= 5.0 and 0.2 <= ann.ratio <= 5.0,
                f"upper {ann.ratio:.3f}, lower {ann.lower_ratio:.3f}")

    spreads = []
    for i in range(20):
        w = random_rough_vorticity(config.seed + i, 0.6, grid.N // 3, grid)
        vals = list(shell_cz_audit(w, part).values())
        spreads.append(max(vals) / min(vals))
    audit.check("gradient/vorticity shell ratios uniform",
                max(spreads) <= 2.0, f"worst spread {max(spreads):.3f}")

    worst_mid = 0.0
    for n in range(1, 8):
        for i in range(20):
            gfield = random_rough_vorticity(config.seed + 100 + i, 0.4,
                                            grid.N // 3, grid)
            worst_mid = max(worst_mid, mid_band_log_check(gfield, n, part).ratio)
    audit.check("mid-band logarithmic estimate", worst_mid <= 1.5,
                f"worst ratio {worst_mid:.3f}")

    worst_bony = 0.0
    for i in range(20):
        a = random_rough_vorticity(config.seed + 300 + i, 0.8, grid.N // 3, grid)
        b = random_rough_vorticity(config.seed + 400 + i, 0.5, grid.N // 3, grid)
        worst_bony = max(worst_bony, float(bony_residual(a, b, part)))
    audit.check("Bony identity on 20 random pairs", worst_bony <= 1e-10,
                f"worst residual {worst_bony:.2e}")

    _progress("proof-audit: differential inequality sweep")
    report = run_sweep(config, jobs=run.jobs)
    ode_cs = [m.ode_fitted_c for m in report.members]
    audit.check("inequality constants stable across n",
                _spread(ode_cs) <= 10.0,
                f"fitted C per n {['%.3g' % c for c in ode_cs]}")
    nu_ratios = [float(np.max(m.nu_term_ratio)) for m in report.members]
    audit.check("diffusion term obeys its 2^-n bound uniformly",
                _spread(nu_ratios) <= 10.0,
                f"per-n max ratios {['%.3g' % r for r in nu_ratios]}")
    tau_ratios = [float(np.max(m.tau_ratio)) for m in report.members]
    audit.check("flux remainder obeys its 2^-n*alpha bound uniformly",
                _spread(tau_ratios) <= 10.0,
                f"per-n max ratios {['%.3g' % r for r in tau_ratios]}")
    comm_all = np.concatenate([m.comm_ratio for m in report.members])
    comm_spread = float(np.max(comm_all) / max(np.median(comm_all), 1e-300))
    audit.check("commutator bound uniform across (n, t)",
                comm_spread <= 10.0, f"max/median {comm_spread:.2f}")
    # high-band uniformity over bands holding at least one full data shell
    cutoff = config.resolved_cutoff()
    hi_ratios = [
        float(np.max(m.high)) / (2.0**-m.n * m.omega0_linf)
        for m in report.members
        if 8.0 / 3.0 * 2.0**m.n <= cutoff
    ]
    audit.check("high band obeys its 2^-n bound uniformly",
                _spread(hi_ratios) <= 10.0,
                f"populated-band ratios {['%.3g' % r for r in hi_ratios]}")
    interp_all = np.concatenate([m.interp_ratio for m in report.members])
    audit.check("mid-band interpolation bound finite",
                bool(np.all(np.isfinite(interp_all))),
                f"max ratio {float(np.max(interp_all)):.3f}")
    delta0 = [d[0] for d in report.deltas]
    init_ratio = [d0 / 2.0**-m.n for d0, m in zip(delta0, report.members)]
    # upper-bound audit: a ratio far below the bound (empty tail) is fine
    med = float(np.median(init_ratio))
    audit.check("initial shell norm obeys its 2^-n bound",
                max(init_ratio) <= 10.0 * max(med, 1e-3),
                f"per-n ratios {['%.3g' % r for r in init_ratio]}")
    return audit.exit_code


_HANDLERS = {
    "partition-check": cmd_partition_check,
    "besov": cmd_besov,
    "solve": cmd_solve,
    "vv-sweep": cmd_vv_sweep,
    "proof-audit": cmd_proof_audit,
}


def main(argv=None) -> int:
    try:
        run = parse_cli(argv if argv is not None else sys.argv[1:])
    except SystemExit as exc:  # argparse usage error or --help
        code = exc.code
        return int(code) if code is not None else 0
    except ConfigurationError as exc:
        print(f"lpvv: {exc}", file=sys.stderr)
        return 2
    try:
        return _HANDLERS[run.subcommand](run)
    except (ConfigurationError, PreconditionError) as exc:
        print(f"lpvv: {exc}", file=sys.stderr)
        return 2
    except (AuditFailure, InconsistencyError, SamplingError,
            SmallnessError, CFLError) as exc:
        print(f"lpvv: audit failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"lpvv: i/o error: {exc}", file=sys.stderr)
        return 3


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
