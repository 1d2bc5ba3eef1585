# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled elementwise kernels for the spectral hot loops.

Complex arrays are processed as interleaved doubles so the loops stay
fully real and auto-vectorize.  Each output component carries exactly one
rounding per arithmetic step, in the same order as the numpy fallback, so
the two backends agree bitwise (the extension is built with FP
contraction off; multiplier pairs are real or purely imaginary by
contract).
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def mul_real(cnp.complex128_t[:, ::1] out, cnp.complex128_t[:, ::1] f,
             double[:, ::1] m):
    cdef Py_ssize_t i, j
    cdef Py_ssize_t n0 = out.shape[0], n1 = out.shape[1]
    cdef double* po = <double*> &out[0, 0]
    cdef double* pf = <double*> &f[0, 0]
    cdef double mv
    for i in range(n0):
        for j in range(n1):
            mv = m[i, j]
            po[2 * (i * n1 + j)] = pf[2 * (i * n1 + j)] * mv
            po[2 * (i * n1 + j) + 1] = pf[2 * (i * n1 + j) + 1] * mv


def mul_pair(cnp.complex128_t[:, ::1] out1, cnp.complex128_t[:, ::1] out2,
             cnp.complex128_t[:, ::1] f,
             cnp.complex128_t[:, ::1] m1, cnp.complex128_t[:, ::1] m2):
    """Apply two multipliers to the same field.

    m1, m2 must be real or purely imaginary arrays; the product is then
    componentwise with one rounding per component.
    """
    cdef Py_ssize_t k
    cdef Py_ssize_t n = out1.shape[0] * out1.shape[1]
    cdef double* po1 = <double*> &out1[0, 0]
    cdef double* po2 = <double*> &out2[0, 0]
    cdef double* pf = <double*> &f[0, 0]
    cdef double* pm1 = <double*> &m1[0, 0]
    cdef double* pm2 = <double*> &m2[0, 0]
    cdef double a, b, mr, mi
    for k in range(n):
        a = pf[2 * k]
        b = pf[2 * k + 1]
        mr = pm1[2 * k]
        mi = pm1[2 * k + 1]
        po1[2 * k] = a * mr - b * mi
        po1[2 * k + 1] = a * mi + b * mr
        mr = pm2[2 * k]
        mi = pm2[2 * k + 1]
        po2[2 * k] = a * mr - b * mi
        po2[2 * k + 1] = a * mi + b * mr


def neg_dot(double[:, ::1] out, double[:, ::1] ux, double[:, ::1] uy,
            double[:, ::1] gx, double[:, ::1] gy):
    cdef Py_ssize_t i, j
    cdef Py_ssize_t n0 = out.shape[0], n1 = out.shape[1]
    cdef double t
    for i in range(n0):
        for j in range(n1):
            t = ux[i, j] * gx[i, j]
            t = t + uy[i, j] * gy[i, j]
            out[i, j] = -t


def stage_pre(cnp.complex128_t[:, ::1] out, double[:, ::1] e,
              cnp.complex128_t[:, ::1] u, cnp.complex128_t[:, ::1] k,
              double c):
    """out = e * (u + c*k), e real."""
    cdef Py_ssize_t i, j, idx
    cdef Py_ssize_t n0 = out.shape[0], n1 = out.shape[1]
    cdef double* po = <double*> &out[0, 0]
    cdef double* pu = <double*> &u[0, 0]
    cdef double* pk = <double*> &k[0, 0]
    cdef double ev
    for i in range(n0):
        for j in range(n1):
            idx = 2 * (i * n1 + j)
            ev = e[i, j]
            po[idx] = (pk[idx] * c + pu[idx]) * ev
            po[idx + 1] = (pk[idx + 1] * c + pu[idx + 1]) * ev


def stage_mid(cnp.complex128_t[:, ::1] out, double[:, ::1] e,
              cnp.complex128_t[:, ::1] u, cnp.complex128_t[:, ::1] k,
              double c):
    """out = e*u + c*k, e real."""
    cdef Py_ssize_t i, j, idx
    cdef Py_ssize_t n0 = out.shape[0], n1 = out.shape[1]
    cdef double* po = <double*> &out[0, 0]
    cdef double* pu = <double*> &u[0, 0]
    cdef double* pk = <double*> &k[0, 0]
    cdef double ev
    for i in range(n0):
        for j in range(n1):
            idx = 2 * (i * n1 + j)
            ev = e[i, j]
            po[idx] = pu[idx] * ev + c * pk[idx]
            po[idx + 1] = pu[idx + 1] * ev + c * pk[idx + 1]


def stage_final(cnp.complex128_t[:, ::1] out, double[:, ::1] e,
                double[:, ::1] e2, cnp.complex128_t[:, ::1] u,
                cnp.complex128_t[:, ::1] k1, cnp.complex128_t[:, ::1] k2,
                cnp.complex128_t[:, ::1] k3, cnp.complex128_t[:, ::1] k4,
                double dt):
    """out = e2*u + (dt/6) * (e2*k1 + 2*e*(k2 + k3) + k4)."""
    cdef Py_ssize_t i, j, idx, c
    cdef Py_ssize_t n0 = out.shape[0], n1 = out.shape[1]
    cdef double* po = <double*> &out[0, 0]
    cdef double* pu = <double*> &u[0, 0]
    cdef double* p1 = <double*> &k1[0, 0]
    cdef double* p2 = <double*> &k2[0, 0]
    cdef double* p3 = <double*> &k3[0, 0]
    cdef double* p4 = <double*> &k4[0, 0]
    cdef double acc, ev, e2v
    cdef double w = dt / 6.0
    for i in range(n0):
        for j in range(n1):
            ev = e[i, j]
            e2v = e2[i, j]
            for c in range(2):
                idx = 2 * (i * n1 + j) + c
                acc = e2v * p1[idx]
                acc = acc + (2.0 * ev) * (p2[idx] + p3[idx])
                acc = acc + p4[idx]
                po[idx] = pu[idx] * e2v + w * acc


def max_mag2(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t i, j
    cdef Py_ssize_t n0 = a.shape[0], n1 = a.shape[1]
    cdef double best = 0.0, t
    for i in range(n0):
        for j in range(n1):
            t = a[i, j] * a[i, j] + b[i, j] * b[i, j]
            if t > best:
                best = t
    return best
