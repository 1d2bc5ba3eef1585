"""Matched viscous/inviscid runs and the vanishing-viscosity audit suite.

A sweep member couples one Euler trajectory with one Navier-Stokes
trajectory at nu = 2^-2n from the same initial vorticity, grid and step.
Per member the harness measures the sup-norm error, the low/mid/high band
split of the velocity difference, the shell-norm series of
vbar_n = v_nu - S_n v, and every term of the differential inequality that
drives the rate estimate; the assembler fits the log-log rate and the
double-exponential Osgood envelope and checks domination pointwise.

On the torus the sub-unit frequency band S_-n is empty for mean-zero
fields (there are no lattice frequencies below 1), so the low band is
reported as exactly zero and flagged as degenerate.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from lpvv.errors import (
    ConfigurationError,
    InconsistencyError,
    PreconditionError,
    SamplingError,
    SmallnessError,
)
from lpvv.flow import (
    FlowState,
    biot_savart,
    cfl_limit,
    eigenfunction_vorticity,
    random_rough_vorticity,
    step,
)
from lpvv.grid import (
    Grid2D,
    SpectralField,
    apply_multiplier,
    dealiased_product,
    lp_norm,
)
from lpvv.lp import (
    DyadicPartition,
    besov0_linf,
    build_partition,
    commutator_sup,
    gradient,
    lowpass,
    tau_n,
    zygmund_norm,
)

E_SQUARED = math.e**2
CFL_SAFETY = 0.6  # fraction of the instantaneous CFL bound used for auto dt
MIN_AUDIT_SAMPLES = 20


@dataclass(frozen=True)
class SweepConfig:
    """Experiment description for a viscosity sweep.

    ``n_list`` fixes the frequency-split parameters (nu = 2^-2n each).
    ``dt = None`` derives the step from the initial CFL bound; the step is
    always adjusted to divide the sampling interval exactly and is shared
    by every run of the sweep.  ``init`` selects the initial vorticity:
    seeded rough data or the sin x sin y eigenfunction benchmark.
    """

    n_list: tuple = (3, 4, 5, 6, 7)
    T: float = 1.0
    dt: float | None = None
    alpha: float = 0.9
    grid_N: int = 256
    seed: int = 42
    slope: float = 1.2
    cutoff: int | None = None
    sample_times: tuple | None = None
    sample_count: int = 65
    init: str = "rough"

    def __post_init__(self):
        if not self.n_list:
            raise ConfigurationError("n_list must not be empty")
        if any(int(n) < 1 or int(n) != n for n in self.n_list):
            raise ConfigurationError("every n must be an integer >= 1")
        if not (0.0 < self.alpha < 1.0):
            raise ConfigurationError(f"alpha must lie strictly in (0, 1), got {self.alpha}")
        if self.T <= 0:
            raise ConfigurationError(f"horizon T must be positive, got {self.T}")
        if self.dt is not None and self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.init not in ("rough", "eigen"):
            raise ConfigurationError(f"init must be 'rough' or 'eigen', got {self.init!r}")
        if self.sample_times is not None:
            ts = np.asarray(self.sample_times, dtype=float)
            if ts.ndim != 1 or ts.size < 2:
                raise ConfigurationError("sample_times needs at least two instants")
            if np.any(ts < -1e-12) or np.any(ts > self.T + 1e-12):
                raise ConfigurationError("sample_times must lie inside [0, T]")
            gaps = np.diff(ts)
            if np.any(gaps <= 0):
                raise ConfigurationError("sample_times must be strictly increasing")
            if not np.allclose(gaps, gaps[0], rtol=1e-9, atol=1e-12):
                raise ConfigurationError("sample_times must be uniformly spaced")
        elif self.sample_count < 2:
            raise ConfigurationError("sample_count must be at least 2")

    def resolved_cutoff(self):
        return self.grid_N // 4 if self.cutoff is None else int(self.cutoff)

    def resolved_sample_times(self):
        if self.sample_times is not None:
            return np.asarray(self.sample_times, dtype=float)
        return np.linspace(0.0, self.T, self.sample_count)

    def nu_of(self, n):
        return 2.0 ** (-2 * int(n))


def initial_vorticity(config: SweepConfig, grid: Grid2D) -> SpectralField:
    if config.init == "eigen":
        return eigenfunction_vorticity(grid)
    return random_rough_vorticity(config.seed, config.slope, config.resolved_cutoff(), grid)


def _resolve_dt(config: SweepConfig, omega0: SpectralField, grid: Grid2D, times) -> float:
    gap = float(times[1] - times[0])
    if config.dt is not None:
        target = config.dt
    else:
        target = CFL_SAFETY * cfl_limit(FlowState(omega0, 0.0, 0.0), grid)
    return gap / math.ceil(gap / target - 1e-12)


def _run_trajectory(omega0: SpectralField, nu: float, times, dt: float, grid: Grid2D):
    """March with constant dt, recording coefficients at sample instants."""
    state = FlowState(omega0.copy(), float(times[0]), nu)
    out = [state.omega.coeffs.copy()]
    for a, b in zip(times[:-1], times[1:]):
        nsteps = int(round((b - a) / dt))
        for _ in range(nsteps):
            state = step(state, dt, grid)
        out.append(state.omega.coeffs.copy())
    return out


@dataclass
class PairRun:
    """Sampled Euler/Navier-Stokes trajectory pair with shared data."""

    n: int
    nu: float
    dt: float
    grid_N: int
    times: np.ndarray
    omega0: np.ndarray
    euler: list
    ns: list
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def grid(self):
        return Grid2D(self.grid_N)

    @property
    def part(self):
        return build_partition(self.grid)

    def omega_euler(self, i) -> SpectralField:
        return SpectralField(self.grid, self.euler[i])

    def omega_ns(self, i) -> SpectralField:
        return SpectralField(self.grid, self.ns[i])

    def v_euler(self, i) -> SpectralField:
        return biot_savart(self.omega_euler(i), self.grid)

    def v_ns(self, i) -> SpectralField:
        return biot_savart(self.omega_ns(i), self.grid)

    def vbar(self, i, part) -> SpectralField:
        """v_nu - S_n v at sample i."""
        return self.v_ns(i) - lowpass(self.v_euler(i), self.n, part)

    def besov_series(self, part) -> np.ndarray:
        """||vbar_n(t)|| in the (0, inf, inf) shell norm, per sample."""
        key = ("besov", part.grid.N)
        if key not in self._cache:
            self._cache[key] = np.array(
                [besov0_linf(self.vbar(i, part), part) for i in range(len(self.times))]
            )
        return self._cache[key]

    def comm_series(self, part, idx) -> np.ndarray:
        """Commutator supremum sup_j 2^-j ||[D_j, v_n.grad] wbar_n|| at idx."""
        key = ("comm", part.grid.N, tuple(idx))
        if key not in self._cache:
            vals = []
            for i in idx:
                vn = lowpass(self.v_euler(i), self.n, part)
                wbar = self.omega_ns(i) - lowpass(self.omega_euler(i), self.n, part)
                vals.append(commutator_sup(vn, wbar, part))
            self._cache[key] = np.array(vals)
        return self._cache[key]


def run_pair(config: SweepConfig, n: int, nu: float | None = None) -> PairRun:
    """Run the Euler/NS pair for one sweep member.

    Both solves share the initial vorticity, the grid and the step; nu
    defaults to 2^-2n and may be overridden (nu = 0 pairs the Euler run
    with itself).
    """
    grid = Grid2D(config.grid_N)
    omega0 = initial_vorticity(config, grid)
    times = config.resolved_sample_times()
    dt = _resolve_dt(config, omega0, grid, times)
    nu_val = config.nu_of(n) if nu is None else float(nu)
    euler = _run_trajectory(omega0, 0.0, times, dt, grid)
    ns = _run_trajectory(omega0, nu_val, times, dt, grid)
    return PairRun(
        n=int(n),
        nu=nu_val,
        dt=dt,
        grid_N=config.grid_N,
        times=times,
        omega0=omega0.coeffs,
        euler=euler,
        ns=ns,
    )


# -- band split and per-band bounds ----------------------------------------


@dataclass(frozen=True)
class BandSplit:
    """Triangle split of ||v_nu - v||_inf into frequency bands.

    ``high`` collects both tail pieces (Id - S_-n)(v_n - v) and
    (Id - S_n)(v_nu - v_n), whose sum with ``low`` and ``mid`` dominates
    the total by construction.  ``low_degenerate`` records that the
    sub-unit band carries no lattice frequencies.
    """

    low: float
    mid: float
    high: float
    high_tail_euler: float
    high_tail_viscous: float
    total: float
    low_degenerate: bool

    @property
    def triangle_margin(self):
        return self.low + self.mid + self.high - self.total


def three_term_split(
    v_nu: SpectralField, v: SpectralField, n: int, part: DyadicPartition
) -> BandSplit:
    """Split the velocity error into the bands below 2^-n, between, and above."""
    grid = v.grid
    diff = v_nu - v
    v_n = lowpass(v, n, part)
    mid_mult = part.psi_mult(n) - part.psi_mult(-n)
    d1 = v_nu - v_n

    low = lp_norm(apply_multiplier(diff, part.psi_mult(-n)).phys(), math.inf, grid)
    mid = lp_norm(apply_multiplier(d1, mid_mult).phys(), math.inf, grid)
    tail_euler = lp_norm(
        apply_multiplier(v_n - v, 1.0 - part.psi_mult(-n)).phys(), math.inf, grid
    )
    tail_visc = lp_norm(
        apply_multiplier(d1, 1.0 - part.psi_mult(n)).phys(), math.inf, grid
    )
    total = lp_norm(diff.phys(), math.inf, grid)
    return BandSplit(
        low=low,
        mid=mid,
        high=tail_euler + tail_visc,
        high_tail_euler=tail_euler,
        high_tail_viscous=tail_visc,
        total=total,
        low_degenerate=n >= -part.j_min,
    )


@dataclass(frozen=True)
class BandBoundAudit:
    low_ratio: float
    high_ratio: float


def band_bound_audit(
    split: BandSplit, n: int, v0_l2: float, omega0_linf: float
) -> BandBoundAudit:
    """Ratios of the low/high bands against their 2^-n theoretical bounds."""
    w = 2.0 ** (-n)
    return BandBoundAudit(
        low_ratio=split.low / (w * v0_l2) if v0_l2 > 0 else 0.0,
        high_ratio=split.high / (w * omega0_linf) if omega0_linf > 0 else 0.0,
    )


@dataclass(frozen=True)
class MidBandCheck:
    ratio: float
    flagged: bool  # zero denominator


def mid_band_log_check(g: SpectralField, n: int, part: DyadicPartition) -> MidBandCheck:
    """||(S_n - S_-n) g||_inf against 2n shells' worth of the (0,inf,inf) norm."""
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    grid = g.grid
    mid_mult = part.psi_mult(n) - part.psi_mult(-n)
    num = lp_norm(apply_multiplier(g, mid_mult).phys(), math.inf, grid)
    den = 2.0 * n * besov0_linf(g, part)
    if den == 0.0:
        return MidBandCheck(math.inf if num > 0 else 0.0, flagged=True)
    return MidBandCheck(num / den, flagged=False)


# -- normalized difference series ------------------------------------------


@dataclass(frozen=True)
class DeltaSeries:
    times: np.ndarray
    besov: np.ndarray
    c_hat: float  # measured velocity-regularity constant
    A: float
    delta: np.ndarray


def _c1star_constant(pair: PairRun, part) -> tuple[float, float, float]:
    """Measured constant of ||v(t)||_C1* <= C (||v0||_L2 + ||w0||_inf).

    Returns (C_hat, v0_l2, omega0_linf), maximizing over both trajectories
    and all samples.
    """
    grid = pair.grid
    v0 = biot_savart(SpectralField(grid, pair.omega0), grid)
    v0_l2 = lp_norm(v0.phys(), 2.0, grid)
    w0_inf = lp_norm(SpectralField(grid, pair.omega0).phys(), math.inf, grid)
    base = v0_l2 + w0_inf
    if base == 0.0:  # zero data: every norm below is zero as well
        return 0.0, v0_l2, w0_inf
    worst = 0.0
    for i in range(len(pair.times)):
        worst = max(worst, zygmund_norm(pair.v_euler(i), 1.0, part))
        worst = max(worst, zygmund_norm(pair.v_ns(i), 1.0, part))
    return worst / base, v0_l2, w0_inf


def delta_series(pair: PairRun, n: int, part: DyadicPartition) -> DeltaSeries:
    """Normalized shell-norm series delta_n(t) <= 1.

    The normalizer is A = 1 + C_hat (||v0||_L2 + ||w0||_inf) with C_hat the
    measured velocity-regularity constant of this pair; a value above 1
    signals that the constant was underfit and raises.
    """
    if len(pair.times) < 3:
        raise PreconditionError("delta_series needs at least 3 sampled instants")
    besov = pair.besov_series(part)
    c_hat, v0_l2, w0_inf = _c1star_constant(pair, part)
    A = 1.0 + c_hat * (v0_l2 + w0_inf)
    delta = besov / A
    if np.any(delta > 1.0):
        raise InconsistencyError(
            "delta exceeded 1 after normalization; measured constant underfit"
        )
    return DeltaSeries(pair.times, besov, c_hat, A, delta)


# -- differential inequality and commutator audits -------------------------


def _audit_indices(ntimes: int) -> np.ndarray:
    """Subsample for the expensive per-term audits, keeping >= 20 instants."""
    if ntimes <= MIN_AUDIT_SAMPLES:
        return np.arange(ntimes)
    stride = max(1, (ntimes - 1) // (MIN_AUDIT_SAMPLES + 1))
    idx = list(range(0, ntimes, stride))
    if idx[-1] != ntimes - 1:
        idx.append(ntimes - 1)
    return np.asarray(idx)


@dataclass(frozen=True)
class OdeAudit:
    """Pointwise measurement of the shell-norm differential inequality.

    ``fitted_c`` is the smallest constant making
    d/dt ||vbar|| <= C (||vbar w_nu|| + nu ||grad w_n|| + ||tau_n|| + comm)
    hold at the audited instants.  ``nu_term_ratio`` and ``tau_ratio``
    compare two forcing terms against their 2^-n and 2^-n*alpha bounds;
    ``interp_ratio`` checks the mid-band interpolation with the
    delta-dependent exponent p(t) = 2 - log delta.
    """

    times: np.ndarray
    dbdt: np.ndarray
    term_vbar_omega: np.ndarray
    term_nu_grad: np.ndarray
    term_tau: np.ndarray
    term_comm: np.ndarray
    fitted_c: float
    nu_term_ratio: np.ndarray
    tau_ratio: np.ndarray
    interp_ratio: np.ndarray
    richardson_flag: bool


def _centered_dbdt(times, series, idx):
    """Centered differences of the dense series at the audited indices."""
    t = np.asarray(times)
    b = np.asarray(series)
    out = np.empty(len(idx))
    for row, i in enumerate(idx):
        lo = max(0, i - 1)
        hi = min(len(t) - 1, i + 1)
        out[row] = (b[hi] - b[lo]) / (t[hi] - t[lo])
    if not np.all(np.isfinite(out)):
        raise SamplingError("non-finite time derivative; sample more densely")
    return out


def ode_audit(
    pair: PairRun, n: int, alpha: float, part: DyadicPartition
) -> OdeAudit:
    """Evaluate every term of the normalized difference inequality."""
    times = pair.times
    if len(times) < MIN_AUDIT_SAMPLES:
        raise SamplingError(
            f"ode_audit needs >= {MIN_AUDIT_SAMPLES} samples, got {len(times)}"
        )
    grid = pair.grid
    idx = _audit_indices(len(times))
    besov = pair.besov_series(part)
    dbdt = _centered_dbdt(times, besov, idx)

    # Richardson-style consistency: halved stencil should roughly agree
    wide = np.empty(len(idx))
    for row, i in enumerate(idx):
        lo = max(0, i - 2)
        hi = min(len(times) - 1, i + 2)
        wide[row] = (besov[hi] - besov[lo]) / (times[hi] - times[lo])
    scale = max(np.max(np.abs(dbdt)), 1e-30)
    richardson_flag = bool(np.max(np.abs(dbdt - wide)) > 0.5 * scale)

    w0_inf = lp_norm(SpectralField(grid, pair.omega0).phys(), math.inf, grid)
    term_vw = np.empty(len(idx))
    term_nu = np.empty(len(idx))
    term_tau = np.empty(len(idx))
    for row, i in enumerate(idx):
        v_e = pair.v_euler(i)
        w_e = pair.omega_euler(i)
        vbar = pair.vbar(i, part)
        term_vw[row] = besov0_linf(
            dealiased_product(vbar, pair.omega_ns(i)), part
        )
        term_nu[row] = pair.nu * besov0_linf(
            gradient(lowpass(w_e, n, part)), part
        )
        term_tau[row] = besov0_linf(tau_n(v_e, w_e, n, part), part)
    term_comm = pair.comm_series(part, idx)

    rhs_sum = term_vw + term_nu + term_tau + term_comm
    with np.errstate(divide="ignore", invalid="ignore"):
        need = np.where(rhs_sum > 0, np.maximum(dbdt, 0.0) / rhs_sum, 0.0)
    fitted_c = float(np.max(need))

    nu_ratio = term_nu / (2.0**-n * w0_inf)
    tau_ratio = term_tau / (2.0 ** (-n * alpha))

    dser = delta_series(pair, n, part)
    interp = np.empty(len(idx))
    mid_mult = part.psi_mult(n) - part.psi_mult(-n)
    for row, i in enumerate(idx):
        d = dser.delta[i]
        if d <= 0 or besov[i] <= 0:
            interp[row] = 0.0
            continue
        p = 2.0 - math.log(d)
        q = p / (p - 1.0)
        mid = lp_norm(
            apply_multiplier(pair.vbar(i, part), mid_mult).phys(), math.inf, grid
        )
        interp[row] = mid / (p * besov[i] ** (1.0 / q))
    return OdeAudit(
        times=times[idx],
        dbdt=dbdt,
        term_vbar_omega=term_vw,
        term_nu_grad=term_nu,
        term_tau=term_tau,
        term_comm=term_comm,
        fitted_c=fitted_c,
        nu_term_ratio=nu_ratio,
        tau_ratio=tau_ratio,
        interp_ratio=interp,
        richardson_flag=richardson_flag,
    )


@dataclass(frozen=True)
class CommutatorAudit:
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    ratio: np.ndarray


def commutator_bound_audit(
    pair: PairRun, n: int, p: float, part: DyadicPartition
) -> CommutatorAudit:
    """Commutator supremum against C (2^-n + p ||vbar||^(1/q)), 1/p + 1/q = 1."""
    if not (1.0 < p < math.inf):
        raise PreconditionError(f"p must lie in (1, inf), got {p}")
    q = p / (p - 1.0)
    idx = _audit_indices(len(pair.times))
    lhs = pair.comm_series(part, idx)
    besov = pair.besov_series(part)[idx]
    rhs = 2.0**-n + p * besov ** (1.0 / q)
    return CommutatorAudit(pair.times[idx], lhs, rhs, lhs / rhs)


# -- Osgood envelope and rate fit ------------------------------------------


def osgood_envelope(
    C: float, C1: float, T: float, n: int, alpha: float, t: float
) -> float:
    """Closed-form double-exponential envelope for the normalized difference.

    With beta = C (T+1) 2^(-n alpha) the value is
    exp(2 - 2 e^(-C1 t)) * beta^(e^(-C1 t)); beta must not exceed e^2.
    """
    beta = C * (T + 1.0) * 2.0 ** (-n * alpha)
    if beta > E_SQUARED * (1.0 + 1e-12):
        raise SmallnessError(
            f"C (T+1) 2^(-n alpha) = {beta:.3g} exceeds e^2; increase n"
        )
    if beta == 0.0:
        return 0.0
    u = math.exp(-C1 * t)
    return math.exp(2.0 - 2.0 * u) * beta**u


@dataclass
class MemberSeries:
    """Per-member scalar series; everything the assembler and report need."""

    n: int
    nu: float
    dt: float
    times: np.ndarray
    err_sup: np.ndarray
    low: np.ndarray
    mid: np.ndarray
    high: np.ndarray
    besov: np.ndarray
    midfreq: np.ndarray
    c1star_euler: np.ndarray
    c1star_ns: np.ndarray
    energy_euler: np.ndarray
    energy_ns: np.ndarray
    enstrophy_ns: np.ndarray
    maxvort_euler: np.ndarray
    maxvort_ns: np.ndarray
    v0_l2: float
    omega0_linf: float
    triangle_margin_min: float
    low_degenerate: bool
    audit_times: np.ndarray
    term_vbar_omega: np.ndarray
    term_nu_grad: np.ndarray
    term_tau: np.ndarray
    term_comm: np.ndarray
    ode_fitted_c: float
    nu_term_ratio: np.ndarray
    tau_ratio: np.ndarray
    interp_ratio: np.ndarray
    comm_ratio: np.ndarray
    richardson_flag: bool
    omega0_phys: np.ndarray | None = None
    euler_final_phys: np.ndarray | None = None
    ns_final_phys: np.ndarray | None = None

    @property
    def err_total(self):
        return float(np.max(self.err_sup))


COMMUTATOR_AUDIT_P = 4.0


def evaluate_pair(config: SweepConfig, n: int) -> MemberSeries:
    """Run one sweep member and reduce it to scalar audit series."""
    pair = run_pair(config, n)
    grid = pair.grid
    part = build_partition(grid)
    area = grid.L**2
    nt = len(pair.times)

    err = np.empty(nt)
    low = np.empty(nt)
    mid = np.empty(nt)
    high = np.empty(nt)
    midf = np.empty(nt)
    c1e = np.empty(nt)
    c1n = np.empty(nt)
    en_e = np.empty(nt)
    en_n = np.empty(nt)
    zn = np.empty(nt)
    mv_e = np.empty(nt)
    mv_n = np.empty(nt)
    tri = math.inf
    low_degenerate = True
    mid_mult = part.psi_mult(n) - part.psi_mult(-n)

    for i in range(nt):
        v_e = pair.v_euler(i)
        v_n = pair.v_ns(i)
        split = three_term_split(v_n, v_e, n, part)
        err[i] = split.total
        low[i] = split.low
        mid[i] = split.mid
        high[i] = split.high
        tri = min(tri, split.triangle_margin)
        low_degenerate = split.low_degenerate
        vbar = pair.vbar(i, part)
        midf[i] = lp_norm(apply_multiplier(vbar, mid_mult).phys(), math.inf, grid)
        c1e[i] = zygmund_norm(v_e, 1.0, part)
        c1n[i] = zygmund_norm(v_n, 1.0, part)
        en_e[i] = 0.5 * area * float(np.sum(np.abs(v_e.coeffs) ** 2))
        en_n[i] = 0.5 * area * float(np.sum(np.abs(v_n.coeffs) ** 2))
        zn[i] = 0.5 * area * float(np.sum(np.abs(pair.ns[i]) ** 2))
        mv_e[i] = float(np.max(np.abs(pair.omega_euler(i).phys())))
        mv_n[i] = float(np.max(np.abs(pair.omega_ns(i).phys())))

    besov = pair.besov_series(part)
    v0 = biot_savart(SpectralField(grid, pair.omega0), grid)
    v0_l2 = lp_norm(v0.phys(), 2.0, grid)
    w0_inf = lp_norm(SpectralField(grid, pair.omega0).phys(), math.inf, grid)

    ode = ode_audit(pair, n, config.alpha, part)
    comm = commutator_bound_audit(pair, n, COMMUTATOR_AUDIT_P, part)

    return MemberSeries(
        n=int(n),
        nu=pair.nu,
        dt=pair.dt,
        times=pair.times,
        err_sup=err,
        low=low,
        mid=mid,
        high=high,
        besov=besov,
        midfreq=midf,
        c1star_euler=c1e,
        c1star_ns=c1n,
        energy_euler=en_e,
        energy_ns=en_n,
        enstrophy_ns=zn,
        maxvort_euler=mv_e,
        maxvort_ns=mv_n,
        v0_l2=v0_l2,
        omega0_linf=w0_inf,
        triangle_margin_min=tri,
        low_degenerate=low_degenerate,
        audit_times=ode.times,
        term_vbar_omega=ode.term_vbar_omega,
        term_nu_grad=ode.term_nu_grad,
        term_tau=ode.term_tau,
        term_comm=ode.term_comm,
        ode_fitted_c=ode.fitted_c,
        nu_term_ratio=ode.nu_term_ratio,
        tau_ratio=ode.tau_ratio,
        interp_ratio=ode.interp_ratio,
        comm_ratio=comm.ratio,
        richardson_flag=ode.richardson_flag,
        omega0_phys=SpectralField(grid, pair.omega0).phys(),
        euler_final_phys=pair.omega_euler(nt - 1).phys(),
        ns_final_phys=pair.omega_ns(nt - 1).phys(),
    )


@dataclass
class RateFitResult:
    theta: float
    c_rate: float
    c_init: float
    c_force: float
    c_env: float
    c1_hat: float
    c33_hat: float
    envelope_ok: bool
    smallness_ok: bool
    monotone: bool
    flags: tuple


@dataclass
class RateReport:
    """Assembled sweep output: per-member series plus fitted constants."""

    config: SweepConfig
    members: list
    c33_hat: float = 0.0
    A: float = 1.0
    deltas: list = field(default_factory=list)
    fit: RateFitResult | None = None

    def member_ns(self):
        return [m.n for m in self.members]


def assemble_report(config: SweepConfig, members: list) -> RateReport:
    """Serial assembly stage: global normalizer and delta series."""
    members = sorted(members, key=lambda m: m.n)
    base = members[0].v0_l2 + members[0].omega0_linf
    c33 = max(
        float(max(np.max(m.c1star_euler), np.max(m.c1star_ns))) for m in members
    ) / base
    A = 1.0 + c33 * base
    deltas = [m.besov / A for m in members]
    for d in deltas:
        if np.any(d > 1.0):
            raise InconsistencyError(
                "delta exceeded 1 under the sweep-wide normalizer"
            )
    return RateReport(config=config, members=members, c33_hat=c33, A=A, deltas=deltas)


def rate_fit(report: RateReport, config: SweepConfig) -> RateFitResult:
    """Fit the log-log rate and the Osgood envelope constants.

    theta is the least-squares slope of log sup-error against log sqrt(nu).
    C1 is the measured regularity constant times the vorticity bound; the
    envelope prefactor is the smallest constant dominating the rate bound,
    the initial shell norms and the measured forcing terms, mirroring how
    the closed-form envelope is assembled from the differential inequality.
    """
    members = report.members
    if len(members) < 3:
        raise PreconditionError("rate_fit needs at least 3 sweep points")
    T = config.T
    alpha = config.alpha
    flags = []

    errs = np.array([m.err_total for m in members])
    nus = np.array([m.nu for m in members])
    monotone = bool(np.all(np.diff(errs) < 0))
    if not monotone:
        flags.append("error series not strictly decreasing in n")
    if np.any(errs <= 0):
        flags.append("zero error in sweep; slope fit degenerate")
        theta = math.inf
    else:
        theta = float(np.polyfit(np.log(np.sqrt(nus)), np.log(errs), 1)[0])

    vort_bound = max(float(np.max(m.maxvort_ns)) for m in members)
    vort_bound = max(vort_bound, max(float(np.max(m.maxvort_euler)) for m in members))
    c1_hat = report.c33_hat * vort_bound

    decay = math.exp(-c1_hat * T)
    c_rate = max(
        e / ((T + 1.0) * math.sqrt(nu) ** (alpha * decay))
        for e, nu in zip(errs, nus)
    )
    c_init = max(
        d[0] / ((T + 1.0) * 2.0 ** (-m.n * alpha))
        for d, m in zip(report.deltas, members)
    )
    c_force = max(
        float(np.max(m.term_nu_grad + m.term_tau)) / report.A / 2.0 ** (-m.n * alpha)
        for m in members
    )
    c_env = max(c_rate, c_init, c_force)

    smallness_ok = all(
        c_env * (T + 1.0) * 2.0 ** (-m.n * alpha) <= E_SQUARED for m in members
    )
    envelope_ok = smallness_ok
    if smallness_ok:
        for m, d in zip(members, report.deltas):
            env = np.array(
                [osgood_envelope(c_env, c1_hat, T, m.n, alpha, t) for t in m.times]
            )
            if np.any(d > env * (1.0 + 1e-9) + 1e-12):
                envelope_ok = False
                flags.append(f"delta escaped the envelope at n={m.n}")
    else:
        flags.append("envelope smallness condition violated; increase n")

    return RateFitResult(
        theta=theta,
        c_rate=c_rate,
        c_init=c_init,
        c_force=c_force,
        c_env=c_env,
        c1_hat=c1_hat,
        c33_hat=report.c33_hat,
        envelope_ok=envelope_ok,
        smallness_ok=smallness_ok,
        monotone=monotone,
        flags=tuple(flags),
    )


def envelope_series(report: RateReport, member: MemberSeries) -> np.ndarray:
    """Envelope values along one member's sample times, nan when undefined."""
    fit = report.fit
    if fit is None or not fit.smallness_ok:
        return np.full(len(member.times), np.nan)
    return np.array(
        [
            osgood_envelope(fit.c_env, fit.c1_hat, report.config.T, member.n,
                            report.config.alpha, t)
            for t in member.times
        ]
    )


def run_sweep(config: SweepConfig, jobs: int = 1) -> RateReport:
    """Execute every sweep member (optionally in parallel) and fit the rate.

    Members are independent; results do not depend on the worker count.
    """
    ns = sorted(int(n) for n in config.n_list)
    if jobs > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(ns))) as pool:
            members = list(pool.map(evaluate_pair, [config] * len(ns), ns))
    else:
        members = [evaluate_pair(config, n) for n in ns]
    report = assemble_report(config, members)
    if len(members) >= 3:
        report.fit = rate_fit(report, config)
    return report
