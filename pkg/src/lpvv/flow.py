"""Periodic vorticity solver for the 2D Euler and Navier-Stokes systems.

The state is the scalar vorticity in coefficient space; velocity is
reconstructed through the Biot-Savart law and the advection term is
evaluated pseudospectrally on a 3/2-padded grid.  Time stepping is the
classical four-stage Runge-Kutta scheme composed with the exact
integrating factor exp(-nu |k|^2 dt) for the diffusive part, so the purely
viscous dynamics is integrated exactly and the nonlinear term sees no
stiffness from the Laplacian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from lpvv import kernels
from lpvv.errors import CFLError, ConfigurationError, PreconditionError
from lpvv.grid import Grid2D, SpectralField
from lpvv.lp import build_partition, zygmund_norm

CFL_CONSTANT = 0.5


@dataclass
class FlowState:
    """One snapshot of a trajectory: vorticity, time, viscosity.

    nu = 0 selects the Euler system, nu > 0 Navier-Stokes.
    """

    omega: SpectralField
    t: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        if self.nu < 0:
            raise PreconditionError(f"viscosity must be >= 0, got {self.nu}")
        if self.omega.components != 1:
            raise PreconditionError("vorticity must be a scalar field")
        scale = np.max(np.abs(self.omega.coeffs))
        if scale > 0 and abs(self.omega.mean) > 1e-12 * scale:
            raise PreconditionError("vorticity must be mean-zero")


def biot_savart(omega: SpectralField, grid: Grid2D) -> SpectralField:
    """Velocity v with curl v = omega and div v = 0, from the stream function.

    In coefficients: v_hat = i (k2, -k1) omega_hat / |k|^2.
    """
    if omega.components != 1:
        raise PreconditionError("biot_savart expects a scalar vorticity")
    scale = np.max(np.abs(omega.coeffs))
    if scale > 0 and abs(omega.mean) > 1e-12 * scale:
        raise PreconditionError("inverse Laplacian undefined on a nonzero mean")
    c = np.ascontiguousarray(omega.coeffs)
    u1 = np.empty_like(c)
    u2 = np.empty_like(c)
    kernels.mul_pair(u1, u2, c, grid.mult_bs1, grid.mult_bs2)
    return SpectralField(grid, np.stack([u1, u2]))


def _nonlinear(coeffs: np.ndarray, grid: Grid2D):
    """-(v . grad omega) in coefficient space, plus the velocity sup norm.

    All products are formed on the padded grid; the returned sup norm is the
    max of |v| over the padded nodes (used for the CFL check).
    """
    c = np.ascontiguousarray(coeffs)
    u1h = np.empty_like(c)
    u2h = np.empty_like(c)
    g1h = np.empty_like(c)
    g2h = np.empty_like(c)
    kernels.mul_pair(u1h, u2h, c, grid.mult_bs1, grid.mult_bs2)
    kernels.mul_pair(g1h, g2h, c, grid.mult_gx, grid.mult_gy)
    u1 = grid.to_phys_pad(u1h)
    u2 = grid.to_phys_pad(u2h)
    g1 = grid.to_phys_pad(g1h)
    g2 = grid.to_phys_pad(g2h)
    adv = np.empty_like(u1)
    kernels.neg_dot(adv, u1, u2, g1, g2)
    vmax = math.sqrt(kernels.max_mag2(u1, u2))
    return grid.from_phys_pad(adv), vmax


def rhs(state: FlowState, grid: Grid2D) -> SpectralField:
    """Full right-hand side -dealias(v . grad omega) + nu Laplacian omega."""
    nl, _ = _nonlinear(state.omega.coeffs, grid)
    if state.nu != 0.0:
        nl = nl + state.nu * (-grid.k2) * state.omega.coeffs
    return SpectralField(grid, nl)


_factor_cache: dict[tuple, tuple] = {}


def _if_factors(grid: Grid2D, nu: float, dt: float):
    key = (grid.N, nu, dt)
    val = _factor_cache.get(key)
    if val is None:
        e = np.exp(-nu * grid.k2 * (dt / 2.0))
        e2 = np.exp(-nu * grid.k2 * dt)
        val = (np.ascontiguousarray(e), np.ascontiguousarray(e2))
        if len(_factor_cache) > 64:
            _factor_cache.clear()
        _factor_cache[key] = val
    return val


def cfl_limit(state: FlowState, grid: Grid2D) -> float:
    """Largest admissible step 0.5 dx / ||v||_inf for the current state."""
    _, vmax = _nonlinear(state.omega.coeffs, grid)
    return CFL_CONSTANT * grid.dx / vmax if vmax > 0 else math.inf


def step(state: FlowState, dt: float, grid: Grid2D) -> FlowState:
    """Advance one step of RK4 with the exact viscous integrating factor.

    Preserves the zero mean exactly and conjugate symmetry to rounding (the
    nonlinear term passes through real physical space at every stage).
    Raises CFLError carrying the admissible step when dt is too large.
    """
    if dt <= 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    c = np.ascontiguousarray(state.omega.coeffs)
    k1, vmax = _nonlinear(c, grid)
    admissible = CFL_CONSTANT * grid.dx / vmax if vmax > 0 else math.inf
    if dt > admissible * (1.0 + 1e-12):
        raise CFLError(dt, admissible)
    e, e2 = _if_factors(grid, state.nu, dt)

    ua = np.empty_like(c)
    kernels.stage_pre(ua, e, c, k1, dt / 2.0)
    k2, _ = _nonlinear(ua, grid)

    ub = np.empty_like(c)
    kernels.stage_mid(ub, e, c, k2, dt / 2.0)
    k3, _ = _nonlinear(ub, grid)

    uc = np.empty_like(c)
    ek3 = np.empty_like(c)
    kernels.mul_real(ek3, k3, e)
    kernels.stage_mid(uc, e2, c, ek3, dt)
    k4, _ = _nonlinear(uc, grid)

    out = np.empty_like(c)
    kernels.stage_final(out, e, e2, c, k1, k2, k3, k4, dt)
    out[0, 0] = 0.0
    return FlowState(SpectralField(grid, out), state.t + dt, state.nu)


@dataclass(frozen=True)
class Diagnostics:
    energy: float
    enstrophy: float
    max_vorticity: float
    c1star_norm: float


def diagnostics(state: FlowState, grid: Grid2D) -> Diagnostics:
    """Conserved/monotone quantities of one snapshot.

    energy = 0.5 ||v||_L2^2 by Parseval, enstrophy = 0.5 ||omega||_L2^2,
    max_vorticity over the grid, and the C^1_* norm of the velocity.
    """
    v = biot_savart(state.omega, grid)
    area = grid.L**2
    energy = 0.5 * area * float(np.sum(np.abs(v.coeffs) ** 2))
    enstrophy = 0.5 * area * float(np.sum(np.abs(state.omega.coeffs) ** 2))
    max_vort = float(np.max(np.abs(state.omega.phys())))
    c1 = zygmund_norm(v, 1.0, build_partition(grid))
    return Diagnostics(energy, enstrophy, max_vort, c1)


def random_rough_vorticity(
    seed: int, slope: float, cutoff: int, grid: Grid2D
) -> SpectralField:
    """Seeded mean-zero field with |omega_hat(k)| ~ |k|^-slope up to cutoff.

    Phases are iid uniform; the result is normalized to ||omega||_inf = 1 and
    is bitwise reproducible for fixed (seed, slope, cutoff, N).
    """
    N = grid.N
    if not (1 <= cutoff <= N // 3):
        raise ConfigurationError(
            f"cutoff must lie in [1, N/3] = [1, {N // 3}], got {cutoff}"
        )
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(N, N))
    safe = np.where(grid.kmag > 0, grid.kmag, 1.0)
    amp = np.where(
        (grid.kmag >= 1.0) & (grid.kmag <= cutoff + 1e-9), safe ** (-slope), 0.0
    )
    c = amp * np.exp(1j * theta)
    idx = (-np.arange(N)) % N
    mirrored = c[np.ix_(idx, idx)]
    upper = (grid.ky > 0) | ((grid.ky == 0) & (grid.kx > 0))
    c = np.where(upper, c, np.conj(mirrored))
    c[0, 0] = 0.0
    c[grid._nyq] = 0.0
    f = SpectralField(grid, c)
    peak = np.max(np.abs(f.phys()))
    return SpectralField(grid, c / peak)


def eigenfunction_vorticity(grid: Grid2D) -> SpectralField:
    """omega = sin x sin y, a steady Euler state and pure viscous decay mode."""
    c = np.zeros((grid.N, grid.N), dtype=np.complex128)
    c[1, 1] = -0.25
    c[1, -1] = 0.25
    c[-1, 1] = 0.25
    c[-1, -1] = -0.25
    return SpectralField(grid, c)
