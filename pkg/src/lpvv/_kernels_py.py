"""Numpy fallback for the elementwise hot loops.

Every function mirrors its compiled counterpart in ``_kernels_cy`` with the
same per-element operation order, so the two backends produce bitwise
identical results.
"""

import numpy as np


def mul_real(out, f, m):
    """out = f * m for a real multiplier m."""
    np.multiply(f, m, out=out)


def mul_pair(out1, out2, f, m1, m2):
    """Apply two multipliers to the same field.

    m1, m2 must be real or purely imaginary arrays; under that constraint
    the complex product has one rounding per component and agrees bitwise
    with the compiled backend.
    """
    np.multiply(f, m1, out=out1)
    np.multiply(f, m2, out=out2)


def neg_dot(out, ux, uy, gx, gy):
    """out = -(ux*gx + uy*gy) on real arrays."""
    np.multiply(ux, gx, out=out)
    out += uy * gy
    np.negative(out, out=out)


def stage_pre(out, e, u, k, c):
    """out = e * (u + c*k); e real, u and k complex."""
    np.multiply(k, c, out=out)
    out += u
    out *= e


def stage_mid(out, e, u, k, c):
    """out = e*u + c*k."""
    np.multiply(u, e, out=out)
    out += c * k


def stage_final(out, e, e2, u, k1, k2, k3, k4, dt):
    """Final Runge-Kutta combination with integrating factors.

    out = e2*u + (dt/6) * (e2*k1 + 2*e*(k2 + k3) + k4)
    """
    acc = e2 * k1
    acc += (2.0 * e) * (k2 + k3)
    acc += k4
    np.multiply(u, e2, out=out)
    out += (dt / 6.0) * acc


def max_mag2(a, b):
    """max over the grid of a**2 + b**2 (real arrays)."""
    return float(np.max(a * a + b * b))
