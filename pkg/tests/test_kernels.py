"""Backend parity: the compiled kernels must match the numpy fallback."""

import numpy as np
import pytest

from lpvv import _kernels_py, kernels


requires_ext = pytest.mark.skipif(
    "cython" not in kernels.available_backends(),
    reason="compiled kernels not built",
)


def _data(shape=(32, 32), seed=0):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    r = rng.standard_normal(shape)
    return np.ascontiguousarray(c), np.ascontiguousarray(r)


@requires_ext
def test_elementwise_kernels_bitwise_equal():
    from lpvv import _kernels_cy

    c1, r1 = _data(seed=1)
    c2, r2 = _data(seed=2)
    _, r3 = _data(seed=3)

    # multiplier pairs are real or purely imaginary in production
    for name, args in {
        "mul_real": (c1, r1),
        "mul_pair": (c1, 1j * np.ascontiguousarray(r2), 1j * np.ascontiguousarray(r3)),
        "stage_pre": (np.abs(r1), c1, c2, 0.37),
        "stage_mid": (np.abs(r1), c1, c2, 0.37),
    }.items():
        out_py = np.empty_like(c1)
        out_cy = np.empty_like(c1)
        if name == "mul_pair":
            o2_py = np.empty_like(c1)
            o2_cy = np.empty_like(c1)
            getattr(_kernels_py, name)(out_py, o2_py, *args)
            getattr(_kernels_cy, name)(out_cy, o2_cy, *args)
            assert np.array_equal(o2_py, o2_cy)
        else:
            getattr(_kernels_py, name)(out_py, *args)
            getattr(_kernels_cy, name)(out_cy, *args)
        assert np.array_equal(out_py, out_cy), name

    a, b = np.abs(r1), np.abs(r2)
    g1, g2 = _data(seed=5)[1], _data(seed=6)[1]
    out_py = np.empty_like(a)
    out_cy = np.empty_like(a)
    _kernels_py.neg_dot(out_py, a, b, g1, g2)
    _kernels_cy.neg_dot(out_cy, a, b, g1, g2)
    assert np.array_equal(out_py, out_cy)
    assert _kernels_py.max_mag2(a, b) == _kernels_cy.max_mag2(a, b)

    e = np.abs(r1)
    e2 = e * e
    k1, _ = _data(seed=7)
    k2, _ = _data(seed=8)
    k3, _ = _data(seed=9)
    k4, _ = _data(seed=10)
    out_py = np.empty_like(c1)
    out_cy = np.empty_like(c1)
    _kernels_py.stage_final(out_py, e, e2, c1, k1, k2, k3, k4, 0.01)
    _kernels_cy.stage_final(out_cy, e, e2, c1, k1, k2, k3, k4, 0.01)
    assert np.array_equal(out_py, out_cy)


@requires_ext
def test_step_bitwise_parity():
    from lpvv.flow import FlowState, random_rough_vorticity, step
    from lpvv.grid import Grid2D

    grid = Grid2D(64)
    w = random_rough_vorticity(3, 1.0, 16, grid)
    state = FlowState(w, 0.0, 1e-3)
    previous = kernels.current_backend()
    try:
        kernels.use_backend("cython")
        a = step(state, 1e-3, grid)
        kernels.use_backend("python")
        b = step(state, 1e-3, grid)
    finally:
        kernels.use_backend(previous)
    assert np.array_equal(a.omega.coeffs, b.omega.coeffs)


def test_backend_selection_roundtrip():
    previous = kernels.current_backend()
    try:
        kernels.use_backend("python")
        assert kernels.current_backend() == "python"
    finally:
        kernels.use_backend(previous)
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")
