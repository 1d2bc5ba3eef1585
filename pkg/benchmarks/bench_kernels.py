"""Benchmark the compiled kernels against the numpy fallback.

Times the solver step (the sweep hot loop) and the individual elementwise
kernels on both backends, and verifies they agree bitwise.

Run:  python3 benchmarks/bench_kernels.py [N]
"""

import sys
import time

import numpy as np

from lpvv import kernels
from lpvv.flow import FlowState, random_rough_vorticity, step
from lpvv.grid import Grid2D


def time_call(fn, repeat=20):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def bench_step(grid, backend, nsteps=10):
    kernels.use_backend(backend)
    w = random_rough_vorticity(42, 1.2, grid.N // 4, grid)
    state = FlowState(w, 0.0, 1e-3)
    dt = 0.25 * 0.5 * grid.dx  # safely inside the CFL bound (|v| < 2)
    step(state, dt, grid)  # warm FFT plan caches before timing
    t0 = time.perf_counter()
    for _ in range(nsteps):
        state = step(state, dt, grid)
    return (time.perf_counter() - t0) / nsteps, state.omega.coeffs


def bench_elementwise(grid, backend):
    kernels.use_backend(backend)
    rng = np.random.default_rng(0)
    c = np.ascontiguousarray(
        rng.standard_normal((grid.N, grid.N)) + 1j * rng.standard_normal((grid.N, grid.N))
    )
    out1 = np.empty_like(c)
    out2 = np.empty_like(c)
    e = np.exp(-1e-3 * grid.k2 * 1e-3)
    rows = {}
    rows["mul_pair (velocity)"] = time_call(
        lambda: kernels.mul_pair(out1, out2, c, grid.mult_bs1, grid.mult_bs2)
    )
    rows["stage_pre"] = time_call(lambda: kernels.stage_pre(out1, e, c, out2, 0.01))
    a = np.abs(c.real).copy()
    b = np.abs(c.imag).copy()
    out_r = np.empty_like(a)
    rows["neg_dot (advection)"] = time_call(lambda: kernels.neg_dot(out_r, a, b, a, b))
    rows["max_mag2 (CFL)"] = time_call(lambda: kernels.max_mag2(a, b))
    return rows


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 256
    grid = Grid2D(n)
    backends = kernels.available_backends()
    print(f"grid N={n}, backends: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled kernels not built (pip install -e .); timing fallback only")

    results = {}
    states = {}
    for backend in backends:
        per_step, final = bench_step(grid, backend)
        results[backend] = {"step (full solver)": per_step}
        results[backend].update(bench_elementwise(grid, backend))
        states[backend] = final

    names = list(next(iter(results.values())))
    width = max(len(s) for s in names)
    header = f"{'kernel':<{width}}" + "".join(f"  {b:>12}" for b in backends)
    if len(backends) == 2:
        header += "  speedup"
    print(header)
    for name in names:
        row = f"{name:<{width}}"
        for b in backends:
            row += f"  {results[b][name] * 1e3:>10.3f}ms"
        if len(backends) == 2:
            ratio = results["python"][name] / results["cython"][name]
            row += f"  {ratio:>6.2f}x"
        print(row)

    if len(backends) == 2:
        same = np.array_equal(states["cython"], states["python"])
        print(f"solver states bitwise identical across backends: {same}")
    kernels.use_backend(backends[0])


if __name__ == "__main__":
    main()
