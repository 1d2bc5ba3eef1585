"""Dyadic frequency decomposition and the operators built on it.

The radial cutoff chi equals 1 on [0, 3/4], vanishes on [4/3, inf) and is
glued smoothly in between with the classical exp(-1/x) bump, so
phi(r) = chi(r/2) - chi(r) is supported in [3/4, 8/3] and the shell family
phi_j(r) = phi(2^-j r) telescopes exactly: sum_{j>=n} phi_j = 1 - chi(2^-n r).

Shells are realized as Fourier multipliers on the grid lattice.  The lowest
useful shell index on the torus is -1 (the one containing |k| = 1); the
homogeneous blocks never see the mean, the inhomogeneous j = -1 block is the
full lowpass psi_0 and does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from lpvv.errors import (
    ConfigurationError,
    GridMismatchError,
    PreconditionError,
)
from lpvv.grid import (
    Grid2D,
    SpectralField,
    apply_multiplier,
    dealiased_product,
    lp_norm,
)

SUPPORT_LO = 0.75
SUPPORT_HI = 4.0 / 3.0
NEGLIGIBLE_SHELL = 1e-14  # relative floor below which ratio audits skip a shell


def _smoothstep(x):
    """C-infinity ramp from 0 at x<=0 to 1 at x>=1, via exp(-1/x)."""
    x = np.asarray(x, dtype=float)
    lo = x <= 0.0
    hi = x >= 1.0
    mid = ~(lo | hi)
    out = np.empty_like(x)
    out[lo] = 0.0
    out[hi] = 1.0
    xm = x[mid]
    a = np.exp(-1.0 / xm)
    b = np.exp(-1.0 / (1.0 - xm))
    out[mid] = a / (a + b)
    return out


def chi_profile(r):
    """Radial cutoff: 1 on [0, 3/4], 0 on [4/3, inf), smooth, nonincreasing."""
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = 1.0 - _smoothstep((r - SUPPORT_LO) / (SUPPORT_HI - SUPPORT_LO))
    return float(out[0]) if scalar else out


def phi_profile(r):
    """Shell profile phi(r) = chi(r/2) - chi(r), supported in [3/4, 8/3]."""
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = chi_profile(r / 2.0) - chi_profile(r)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class BesovSpec:
    """Indices (s, p, q) of a Besov norm; q = inf gives the sup over shells."""

    s: float
    p: float
    q: float
    homogeneous: bool = True

    def __post_init__(self):
        if not (1.0 <= self.p):
            raise ConfigurationError(f"p must lie in [1, inf], got {self.p}")
        if not (1.0 <= self.q):
            raise ConfigurationError(f"q must lie in [1, inf], got {self.q}")


class DyadicPartition:
    """Shell multipliers phi_j and lowpasses psi_n on one grid's lattice.

    Immutable after construction; safe to share across threads (the
    multiplier tables are fully precomputed for the lattice range and any
    out-of-range request is answered analytically).
    """

    def __init__(self, grid: Grid2D):
        self.grid = grid
        self.j_min = -1
        # smallest j with 4/3 * 2^j >= largest lattice radius, so shells
        # above j_max are empty and the telescoped sum is 1 on the lattice
        self.j_max = int(math.ceil(math.log2(grid.kmax / SUPPORT_HI)))
        if self.n_shells < 3:
            raise ConfigurationError(
                f"grid N={grid.N} hosts only {self.n_shells} shells; need >= 3"
            )
        self._phi = {
            j: np.ascontiguousarray(phi_profile(grid.kmag / 2.0**j))
            for j in range(self.j_min, self.j_max + 1)
        }
        self._psi = {
            n: np.ascontiguousarray(chi_profile(grid.kmag / 2.0**n))
            for n in range(self.j_min, self.j_max + 2)
        }
        self._zero = np.zeros((grid.N, grid.N))
        self._mean_only = self._zero.copy()
        self._mean_only[0, 0] = 1.0
        self._one = np.ones((grid.N, grid.N))

    @property
    def n_shells(self):
        return self.j_max - self.j_min + 1

    def chi_profile(self, r):
        return chi_profile(r)

    def phi_profile(self, r):
        return phi_profile(r)

    def psi_profile(self, n, r):
        """Lowpass symbol psi_n(r) = 1 - sum_{j>=n} phi_j(r) = chi(2^-n r)."""
        return chi_profile(np.asarray(r, dtype=float) / 2.0**n)

    def shells(self):
        return range(self.j_min, self.j_max + 1)

    def phi_mult(self, j):
        if j in self._phi:
            return self._phi[j]
        return self._zero  # empty on the lattice outside [j_min, j_max]

    def psi_mult(self, n):
        if n in self._psi:
            return self._psi[n]
        if n < self.j_min:
            return self._mean_only  # every |k| >= 1 sits above the cutoff
        return self._one  # n > j_max + 1: the whole lattice is below 3/4*2^n

    def __repr__(self):
        return f"DyadicPartition(N={self.grid.N}, j={self.j_min}..{self.j_max})"


_partition_cache: dict[int, DyadicPartition] = {}


def build_partition(grid: Grid2D) -> DyadicPartition:
    """Partition of unity covering the grid's lattice; cached per N."""
    part = _partition_cache.get(grid.N)
    if part is None:
        part = DyadicPartition(grid)
        _partition_cache[grid.N] = part
    return part


def _same_grid(f: SpectralField, part: DyadicPartition):
    if f.grid != part.grid:
        raise GridMismatchError("field and partition live on different grids")


def dyadic_block(
    f: SpectralField, j: int, part: DyadicPartition, homogeneous: bool = True
) -> SpectralField:
    """Frequency block Delta_j f (homogeneous) or the inhomogeneous variant.

    Inhomogeneous convention: zero for j < -1, the lowpass psi_0 at j = -1,
    and the plain shell for j >= 0.
    """
    _same_grid(f, part)
    if homogeneous:
        mult = part.phi_mult(j)
    elif j < -1:
        return SpectralField.zero(f.grid, f.components)
    elif j == -1:
        mult = part.psi_mult(0)
    else:
        mult = part.phi_mult(j)
    return apply_multiplier(f, mult)


def lowpass(f: SpectralField, n: int, part: DyadicPartition) -> SpectralField:
    """S_n f: smooth restriction to frequencies below ~ 2^n."""
    _same_grid(f, part)
    return apply_multiplier(f, part.psi_mult(n))


def _block_lp_norms(f, part, p, homogeneous):
    """(j, ||Delta_j f||_Lp) pairs over the partition's shell range."""
    out = []
    if homogeneous:
        js = list(part.shells())
    else:
        js = [-1] + [j for j in part.shells() if j >= 0]
    for j in js:
        blk = dyadic_block(f, j, part, homogeneous)
        out.append((j, lp_norm(blk.phys(), p, f.grid)))
    return out


def besov_norm(f: SpectralField, spec: BesovSpec, part: DyadicPartition) -> float:
    """Shell-weighted norm sum_j (2^{js} ||Delta_j f||_Lp) aggregated in l^q."""
    _same_grid(f, part)
    terms = [
        2.0 ** (j * spec.s) * v
        for j, v in _block_lp_norms(f, part, spec.p, spec.homogeneous)
    ]
    if not terms:
        return 0.0
    if np.isinf(spec.q):
        return float(max(terms))
    return float(np.sum(np.asarray(terms) ** spec.q) ** (1.0 / spec.q))


def zygmund_norm(f: SpectralField, s: float, part: DyadicPartition) -> float:
    """Inhomogeneous sup_{j>=-1} 2^{js} ||Delta_j f||_Linf."""
    return besov_norm(f, BesovSpec(s, math.inf, math.inf, homogeneous=False), part)


def besov0_linf(f: SpectralField, part: DyadicPartition) -> float:
    """Homogeneous (0, inf, inf) norm, the workhorse of the viscosity audits."""
    return besov_norm(f, BesovSpec(0.0, math.inf, math.inf), part)


# -- Bony decomposition ---------------------------------------------------


def _padded_block_phys(f, part, j, homogeneous):
    grid = f.grid
    if homogeneous:
        mult = part.phi_mult(j)
    elif j == -1:
        mult = part.psi_mult(0)
    else:
        mult = part.phi_mult(j)
    return grid.to_phys_pad(f.coeffs * mult)


def paraproduct(
    f: SpectralField, g: SpectralField, part: DyadicPartition
) -> SpectralField:
    """T_f g = sum_{j>=1} S_{j-1} f * Delta_j g, dealiased.

    Scalar fields only; the sum is truncated at the partition's top shell,
    beyond which blocks are empty on the lattice anyway.
    """
    _same_grid(f, part)
    _same_grid(g, part)
    if f.components != 1 or g.components != 1:
        raise GridMismatchError("paraproduct is defined for scalar fields")
    grid = f.grid
    acc = np.zeros((grid.M, grid.M))
    for j in range(1, part.j_max + 1):
        pg = _padded_block_phys(g, part, j, homogeneous=False)
        pf = grid.to_phys_pad(f.coeffs * part.psi_mult(j - 1))
        acc += pf * pg
    return SpectralField(grid, grid.from_phys_pad(acc))


def remainder(
    f: SpectralField, g: SpectralField, part: DyadicPartition
) -> SpectralField:
    """R(f, g) = sum_{|i-j|<=1} Delta_i f Delta_j g, dealiased.

    Terms are grouped per diagonal so the result is exactly symmetric in
    (f, g), including in floating point.
    """
    _same_grid(f, part)
    _same_grid(g, part)
    if f.components != 1 or g.components != 1:
        raise GridMismatchError("remainder is defined for scalar fields")
    grid = f.grid
    js = [-1] + [j for j in part.shells() if j >= 0]
    pf = {j: _padded_block_phys(f, part, j, homogeneous=False) for j in js}
    pg = {j: _padded_block_phys(g, part, j, homogeneous=False) for j in js}
    acc = np.zeros((grid.M, grid.M))
    for idx, j in enumerate(js):
        acc += pf[j] * pg[j]
        if idx + 1 < len(js):
            jn = js[idx + 1]
            acc += pf[j] * pg[jn] + pf[jn] * pg[j]
    return SpectralField(grid, grid.from_phys_pad(acc))


@dataclass(frozen=True)
class BonyResidual:
    """Residual of fg - T_f g - T_g f - R(f, g); absolute when flagged."""

    value: float
    relative: bool

    def __float__(self):
        return self.value


def bony_decomposition_phys(f: SpectralField, g: SpectralField, part: DyadicPartition):
    """Padded physical samples of (T_f g, T_g f, R(f, g)), sharing block FFTs.

    One inverse transform per block of each field; the paraproduct lowpasses
    are accumulated from the blocks (psi_n = psi_0 + sum of shells below n).
    """
    _same_grid(f, part)
    _same_grid(g, part)
    js = [-1] + [j for j in part.shells() if j >= 0]
    pf = [_padded_block_phys(f, part, j, homogeneous=False) for j in js]
    pg = [_padded_block_phys(g, part, j, homogeneous=False) for j in js]
    shape = pf[0].shape

    t_fg = np.zeros(shape)
    t_gf = np.zeros(shape)
    low_f = pf[0].copy()  # S_0 f
    low_g = pg[0].copy()
    for idx in range(2, len(js)):  # term j = js[idx] = idx - 1 uses S_{j-1}
        if idx > 2:
            low_f += pf[idx - 2]  # add shell j - 2, turning S_{j-2} into S_{j-1}
            low_g += pg[idx - 2]
        t_fg += low_f * pg[idx]
        t_gf += low_g * pf[idx]

    rem = np.zeros(shape)
    for idx in range(len(js)):
        rem += pf[idx] * pg[idx]
        if idx + 1 < len(js):
            rem += pf[idx] * pg[idx + 1] + pf[idx + 1] * pg[idx]
    return t_fg, t_gf, rem


def bony_residual(
    f: SpectralField, g: SpectralField, part: DyadicPartition
) -> BonyResidual:
    """Linf defect of the Bony identity, relative to ||fg||_inf when possible.

    Assembled pointwise on the padded grid where the identity is exact for
    band-limited inputs, so no truncation enters the comparison.
    """
    if f.components != 1 or g.components != 1:
        raise GridMismatchError("bony_residual is defined for scalar fields")
    grid = f.grid
    t_fg, t_gf, rem = bony_decomposition_phys(f, g, part)
    fg = grid.to_phys_pad(f.coeffs) * grid.to_phys_pad(g.coeffs)
    defect = float(np.max(np.abs(fg - t_fg - t_gf - rem)))
    scale = float(np.max(np.abs(fg)))
    if scale == 0.0:
        return BonyResidual(defect, relative=False)
    return BonyResidual(defect / scale, relative=True)


# -- Bernstein and Calderon-Zygmund audits --------------------------------


@dataclass(frozen=True)
class BernsteinAudit:
    lhs: float
    rhs: float
    ratio: float
    lower_lhs: float | None = None
    lower_rhs: float | None = None
    lower_ratio: float | None = None


def _derivative_sup(f, k, p):
    """sup over |alpha| = k of ||d^alpha f||_Lp."""
    grid = f.grid
    best = 0.0
    for a in range(k + 1):
        b = k - a
        mult = (1j * grid.kx) ** a * (1j * grid.ky) ** b
        best = max(best, lp_norm(apply_multiplier(f, mult).phys(), p, grid))
    return best


def bernstein_audit(
    f: SpectralField,
    k: int,
    p: float,
    q: float,
    lam: float,
    annular: bool = False,
) -> BernsteinAudit:
    """Measure both sides of the Bernstein inequalities for a localized field.

    Ball case: spectrum must lie in |xi| <= lam; reports
    sup_{|a|=k} ||d^a f||_q against lam^(k + 2(1/p - 1/q)) ||f||_p.
    Annular case: spectrum must lie in lam/2 <= |xi| <= 2 lam; additionally
    reports the reverse inequality sup ||d^a f||_p >= c lam^k ||f||_p.
    """
    grid = f.grid
    mags = np.abs(f.coeffs)
    if f.components == 2:
        mags = mags.max(axis=0)
    live = mags > 1e-13 * mags.max() if mags.max() > 0 else mags > 0
    radii = grid.kmag[live]
    if annular:
        if radii.size and (radii.min() < lam / 2 - 1e-9 or radii.max() > 2 * lam + 1e-9):
            raise PreconditionError(
                f"spectrum not inside the annulus [{lam / 2}, {2 * lam}]"
            )
    elif radii.size and radii.max() > lam + 1e-9:
        raise PreconditionError(f"spectrum not inside the ball of radius {lam}")
    lhs = _derivative_sup(f, k, q)
    rhs = lam ** (k + 2.0 * (1.0 / p - 1.0 / q)) * f.lp(p)
    ratio = lhs / rhs if rhs > 0 else math.inf
    if not annular:
        return BernsteinAudit(lhs, rhs, ratio)
    low_lhs = _derivative_sup(f, k, p)
    low_rhs = lam**k * f.lp(p)
    low_ratio = low_lhs / low_rhs if low_rhs > 0 else math.inf
    return BernsteinAudit(lhs, rhs, ratio, low_lhs, low_rhs, low_ratio)


def shell_cz_audit(omega: SpectralField, part: DyadicPartition) -> dict[int, float]:
    """Per-shell ratio ||Delta_j grad v||_inf / ||Delta_j omega||_inf.

    v is the Biot-Savart velocity of omega; the gradient is measured in the
    pointwise Frobenius norm.  Shells whose omega-block is negligible are
    skipped.
    """
    from lpvv.flow import biot_savart  # local import to avoid a cycle

    _same_grid(omega, part)
    grid = omega.grid
    v = biot_savart(omega, grid)
    tensor = [
        v.coeffs[l] * m for l in (0, 1) for m in (grid.mult_gx, grid.mult_gy)
    ]
    omega_scale = omega.lp(math.inf)
    ratios = {}
    for j in part.shells():
        mult = part.phi_mult(j)
        denom = lp_norm(grid.to_phys(omega.coeffs * mult), math.inf, grid)
        if denom < NEGLIGIBLE_SHELL * omega_scale or denom == 0.0:
            continue
        frob2 = np.zeros((grid.N, grid.N))
        for plane in tensor:
            g = grid.to_phys(plane * mult)
            frob2 += g * g
        ratios[j] = float(np.sqrt(frob2.max())) / denom
    return ratios


# -- commutator and flux machinery ----------------------------------------


def divergence_defect(v: SpectralField) -> float:
    """max_k |k . v_hat(k)| relative to max_k |k| |v_hat(k)|."""
    grid = v.grid
    div = grid.kx * v.coeffs[0] + grid.ky * v.coeffs[1]
    scale = np.max(grid.kmag * np.maximum(np.abs(v.coeffs[0]), np.abs(v.coeffs[1])))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(div)) / scale)


def gradient(f: SpectralField) -> SpectralField:
    """Spectral gradient of a scalar field as a 2-vector field."""
    grid = f.grid
    return SpectralField(
        grid, np.stack([f.coeffs * grid.mult_gx, f.coeffs * grid.mult_gy])
    )


def advect(v: SpectralField, w: SpectralField) -> SpectralField:
    """Dealiased v . grad w for a vector v and scalar w."""
    return dealiased_product(v, gradient(w))


def commutator_apply(
    j: int, vn: SpectralField, wbar: SpectralField, part: DyadicPartition
) -> SpectralField:
    """[Delta_j, vn . grad] wbar with dealiased products.

    vn must be divergence free (checked spectrally); wbar mean zero.
    """
    _same_grid(vn, part)
    _same_grid(wbar, part)
    if divergence_defect(vn) > 1e-10:
        raise PreconditionError("advecting field is not divergence free")
    first = dyadic_block(advect(vn, wbar), j, part)
    second = advect(vn, dyadic_block(wbar, j, part))
    return first - second


def commutator_sup(
    vn: SpectralField, wbar: SpectralField, part: DyadicPartition
) -> float:
    """sup_j 2^-j ||[Delta_j, vn . grad] wbar||_inf over the lattice shells.

    Shares the dealiased advection field across shells.
    """
    _same_grid(vn, part)
    if divergence_defect(vn) > 1e-10:
        raise PreconditionError("advecting field is not divergence free")
    adv = advect(vn, wbar)
    best = 0.0
    for j in part.shells():
        first = dyadic_block(adv, j, part)
        second = advect(vn, dyadic_block(wbar, j, part))
        val = lp_norm((first - second).phys(), math.inf, vn.grid)
        best = max(best, 2.0**-j * val)
    return best


def r_n(
    v: SpectralField, omega: SpectralField, n: int, part: DyadicPartition
) -> SpectralField:
    """Smoothed increment correlation r_n(v, omega), componentwise in v.

    Expanding the defining kernel integral against the lowpass kernel gives
    the operator identity

        r_n = S_n(v w) - (S_n v) w - v (S_n w) + v w,

    which is the production evaluation; the direct kernel quadrature serves
    as an independent oracle in the test suite.
    """
    _same_grid(v, part)
    _same_grid(omega, part)
    vw = dealiased_product(v, omega)
    vn = lowpass(v, n, part)
    wn = lowpass(omega, n, part)
    return lowpass(vw, n, part) - dealiased_product(vn, omega) - dealiased_product(v, wn) + vw


def tau_n(
    v: SpectralField, omega: SpectralField, n: int, part: DyadicPartition
) -> SpectralField:
    """Flux remainder tau_n = r_n(v, omega) - (v - S_n v)(omega - S_n omega)."""
    vn = lowpass(v, n, part)
    wn = lowpass(omega, n, part)
    return r_n(v, omega, n, part) - dealiased_product(v - vn, omega - wn)
