"""Backend dispatch for the elementwise hot loops.

The compiled extension (``lpvv._kernels_cy``, built from the Cython source
at install time) and the numpy fallback (``lpvv._kernels_py``) expose the
same functions and produce bitwise identical results.  The compiled one is
picked automatically when importable; set ``LPVV_BACKEND=python`` (or
``cython``) to force a choice, or call :func:`use_backend` at runtime.
"""

import os

from lpvv import _kernels_py

try:
    from lpvv import _kernels_cy
except ImportError:
    _kernels_cy = None

_FUNCS = (
    "mul_real",
    "mul_pair",
    "neg_dot",
    "stage_pre",
    "stage_mid",
    "stage_final",
    "max_mag2",
)

_current = None


def available_backends():
    names = ["python"]
    if _kernels_cy is not None:
        names.insert(0, "cython")
    return names


def use_backend(name):
    """Rebind the kernel functions to the named backend."""
    global _current
    if name == "cython":
        if _kernels_cy is None:
            raise RuntimeError("compiled kernels not built; run pip install -e .")
        impl = _kernels_cy
    elif name == "python":
        impl = _kernels_py
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    g = globals()
    for fn in _FUNCS:
        g[fn] = getattr(impl, fn)
    _current = name
    return name


def current_backend():
    return _current


_requested = os.environ.get("LPVV_BACKEND", "").strip().lower()
if _requested:
    use_backend(_requested)
else:
    use_backend("cython" if _kernels_cy is not None else "python")
