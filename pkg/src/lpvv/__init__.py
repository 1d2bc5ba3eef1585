"""Littlewood-Paley toolkit and 2D pseudospectral flow solver.

The package has four layers:

* ``lpvv.lp``      dyadic partition of unity, frequency-localization
                   operators, Besov/Zygmund norms, Bony decomposition and
                   the related operator audits;
* ``lpvv.flow``    periodic vorticity solver for the Euler and
                   Navier-Stokes systems with Biot-Savart reconstruction;
* ``lpvv.harness`` matched viscous/inviscid sweeps, band splits,
                   inequality audits and convergence-rate fitting;
* ``lpvv.cli``     command-line drivers, config parsing and report I/O.

Hot elementwise loops live behind ``lpvv.kernels`` which selects a compiled
extension when present and falls back to numpy.
"""

__version__ = "0.1.0"

from lpvv.errors import (
    AuditFailure,
    CFLError,
    ConfigurationError,
    GridMismatchError,
    InconsistencyError,
    PreconditionError,
    SamplingError,
    SmallnessError,
)

__all__ = [
    "AuditFailure",
    "CFLError",
    "ConfigurationError",
    "GridMismatchError",
    "InconsistencyError",
    "PreconditionError",
    "SamplingError",
    "SmallnessError",
    "__version__",
]
