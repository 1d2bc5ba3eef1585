"""Spectral grid and field carriers on the 2pi-periodic torus.

Fields are stored as complex Fourier coefficients c_k normalized so that
f(x) = sum_k c_k exp(i k.x).  The Nyquist row and column of the lattice are
kept identically zero; with that convention every real field has an exact
conjugate-symmetric coefficient array and 3/2-padded products are alias
free for all retained modes.
"""

from __future__ import annotations

import numpy as np

from lpvv import kernels
from lpvv.errors import ConfigurationError, GridMismatchError, PreconditionError


class Grid2D:
    """Square periodic grid, N points per side, period 2pi.

    N must be a power of two with N >= 8.  Instances compare and hash by N;
    wavenumber arrays and padding indices are precomputed once.
    """

    def __init__(self, N: int):
        N = int(N)
        if N < 8 or (N & (N - 1)) != 0:
            raise ConfigurationError(f"grid size must be a power of two >= 8, got {N}")
        self.N = N
        self.L = 2.0 * np.pi
        self.dx = self.L / N
        self.M = 3 * N // 2  # padded size for dealiased products

        k = np.fft.fftfreq(N, d=1.0 / N)  # integers as floats, fft layout
        self.kx, self.ky = np.meshgrid(k, k, indexing="ij")
        self.kx = np.ascontiguousarray(self.kx)
        self.ky = np.ascontiguousarray(self.ky)
        self.k2 = self.kx**2 + self.ky**2
        self.kmag = np.sqrt(self.k2)
        self.inv_k2 = np.zeros_like(self.k2)
        nz = self.k2 > 0
        self.inv_k2[nz] = 1.0 / self.k2[nz]
        # largest radius actually present on the usable lattice
        self.kmax = np.sqrt(2.0) * (N // 2 - 1)

        half = N // 2
        self._nyq = np.zeros((N, N), dtype=bool)
        self._nyq[half, :] = True
        self._nyq[:, half] = True

        # multipliers for velocity reconstruction and gradients
        self.mult_bs1 = np.ascontiguousarray(1j * self.ky * self.inv_k2)
        self.mult_bs2 = np.ascontiguousarray(-1j * self.kx * self.inv_k2)
        self.mult_gx = np.ascontiguousarray(1j * self.kx)
        self.mult_gy = np.ascontiguousarray(1j * self.ky)

    def __eq__(self, other):
        return isinstance(other, Grid2D) and other.N == self.N

    def __hash__(self):
        return hash(("Grid2D", self.N))

    def __repr__(self):
        return f"Grid2D(N={self.N})"

    def nodes(self):
        """1D coordinate array; the physical grid is its tensor square."""
        return np.arange(self.N) * self.dx

    def meshgrid(self):
        x = self.nodes()
        return np.meshgrid(x, x, indexing="ij")

    # -- transforms -------------------------------------------------------

    def to_coeffs(self, phys):
        """Real physical samples -> coefficient array (Nyquist zeroed)."""
        c = np.fft.fft2(phys) / self.N**2
        c[self._nyq] = 0.0
        return c

    def to_phys(self, coeffs):
        """Coefficient array -> real physical samples on the native grid."""
        return np.real(np.fft.ifft2(coeffs)) * self.N**2

    def embed(self, coeffs):
        """Place N-lattice coefficients into the 3N/2 padded lattice."""
        h = self.N // 2
        M = self.M
        out = np.zeros((M, M), dtype=np.complex128)
        out[:h, :h] = coeffs[:h, :h]
        out[:h, M - h + 1 :] = coeffs[:h, h + 1 :]
        out[M - h + 1 :, :h] = coeffs[h + 1 :, :h]
        out[M - h + 1 :, M - h + 1 :] = coeffs[h + 1 :, h + 1 :]
        return out

    def extract(self, coeffs_pad):
        """Inverse of :meth:`embed`; drops modes outside the N lattice."""
        h = self.N // 2
        M = self.M
        out = np.zeros((self.N, self.N), dtype=np.complex128)
        out[:h, :h] = coeffs_pad[:h, :h]
        out[:h, h + 1 :] = coeffs_pad[:h, M - h + 1 :]
        out[h + 1 :, :h] = coeffs_pad[M - h + 1 :, :h]
        out[h + 1 :, h + 1 :] = coeffs_pad[M - h + 1 :, M - h + 1 :]
        return out

    def to_phys_pad(self, coeffs):
        """Coefficients -> real samples on the padded grid."""
        return np.real(np.fft.ifft2(self.embed(coeffs))) * self.M**2

    def from_phys_pad(self, phys_pad):
        """Real padded samples -> N-lattice coefficients (truncated)."""
        return self.extract(np.fft.fft2(phys_pad) / self.M**2)

    def product(self, cf, cg):
        """Dealiased coefficient-space product of two scalar fields."""
        pf = self.to_phys_pad(cf)
        pg = self.to_phys_pad(cg)
        return self.from_phys_pad(pf * pg)


def lp_norm(phys, p, grid):
    """L^p norm of real samples by the rectangle rule; p may be inf.

    Vector fields (leading component axis) are reduced to the pointwise
    Euclidean magnitude first.
    """
    a = np.asarray(phys)
    if a.ndim == 3:
        a = np.sqrt(np.sum(a * a, axis=0))
    else:
        a = np.abs(a)
    if np.isinf(p):
        return float(np.max(a)) if a.size else 0.0
    if p < 1:
        raise PreconditionError(f"L^p norm requires p >= 1, got {p}")
    w = grid.dx**2
    return float((np.sum(a**p) * w) ** (1.0 / p))


class SpectralField:
    """A real scalar or 2-vector field stored as Fourier coefficients.

    ``coeffs`` has shape (N, N) for scalars and (2, N, N) for vectors.
    """

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: Grid2D, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape not in {(grid.N, grid.N), (2, grid.N, grid.N)}:
            raise GridMismatchError(
                f"coefficient shape {coeffs.shape} does not match grid N={grid.N}"
            )
        self.grid = grid
        self.coeffs = coeffs

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_phys(cls, grid, phys):
        phys = np.asarray(phys, dtype=np.float64)
        if phys.ndim == 2:
            return cls(grid, grid.to_coeffs(phys))
        return cls(grid, np.stack([grid.to_coeffs(p) for p in phys]))

    @classmethod
    def zero(cls, grid, components=1):
        shape = (grid.N, grid.N) if components == 1 else (2, grid.N, grid.N)
        return cls(grid, np.zeros(shape, dtype=np.complex128))

    # -- structure --------------------------------------------------------

    @property
    def components(self):
        return 1 if self.coeffs.ndim == 2 else 2

    @property
    def mean(self):
        if self.components == 1:
            return self.coeffs[0, 0]
        return self.coeffs[:, 0, 0]

    def phys(self):
        if self.components == 1:
            return self.grid.to_phys(self.coeffs)
        return np.stack([self.grid.to_phys(c) for c in self.coeffs])

    def copy(self):
        return SpectralField(self.grid, self.coeffs.copy())

    def conj_symmetry_defect(self):
        """max |c(-k) - conj(c(k))| relative to the largest coefficient."""
        idx = (-np.arange(self.grid.N)) % self.grid.N
        c = self.coeffs
        if self.components == 1:
            c = c[None]
        worst = 0.0
        for plane in c:
            flipped = plane[np.ix_(idx, idx)]
            d = np.max(np.abs(flipped - np.conj(plane)))
            s = np.max(np.abs(plane))
            worst = max(worst, d / s if s > 0 else 0.0)
        return worst

    def lp(self, p):
        return lp_norm(self.phys(), p, self.grid)

    # -- arithmetic sugar --------------------------------------------------

    def _check(self, other):
        if self.grid != other.grid:
            raise GridMismatchError("fields live on different grids")
        if self.coeffs.shape != other.coeffs.shape:
            raise GridMismatchError("scalar/vector mismatch")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__


def apply_multiplier(field: SpectralField, mult: np.ndarray) -> SpectralField:
    """Apply a radial/real or complex Fourier multiplier componentwise."""
    if field.components == 1:
        out = np.empty_like(field.coeffs)
        if mult.dtype == np.complex128:
            np.multiply(field.coeffs, mult, out=out)
        else:
            kernels.mul_real(out, field.coeffs, mult)
        return SpectralField(field.grid, out)
    return SpectralField(field.grid, field.coeffs * mult)


def dealiased_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """Pointwise product of two fields, alias free on the retained modes.

    scalar*scalar -> scalar, scalar*vector -> vector.  vector*vector is the
    dot product (scalar).
    """
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")
    grid = f.grid
    if f.components == 1 and g.components == 1:
        return SpectralField(grid, grid.product(f.coeffs, g.coeffs))
    if f.components == 1:
        f, g = g, f
    if g.components == 1:
        pg = grid.to_phys_pad(g.coeffs)
        planes = [
            grid.from_phys_pad(grid.to_phys_pad(c) * pg) for c in f.coeffs
        ]
        return SpectralField(grid, np.stack(planes))
    pf0 = grid.to_phys_pad(f.coeffs[0])
    pf1 = grid.to_phys_pad(f.coeffs[1])
    pg0 = grid.to_phys_pad(g.coeffs[0])
    pg1 = grid.to_phys_pad(g.coeffs[1])
    return SpectralField(grid, grid.from_phys_pad(pf0 * pg0 + pf1 * pg1))
