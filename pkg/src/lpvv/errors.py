"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, partition or experiment configuration."""


class GridMismatchError(ValueError):
    """Two fields that must share a grid do not."""


class PreconditionError(ValueError):
    """An operation's stated precondition does not hold for the input."""


class CFLError(RuntimeError):
    """Requested time step violates the advective CFL bound."""

    def __init__(self, dt, admissible):
        self.dt = dt
        self.admissible = admissible
        super().__init__(
            f"dt={dt:.3e} exceeds the CFL-admissible step {admissible:.3e}"
        )


class SamplingError(RuntimeError):
    """Trajectory sampling too coarse for finite-difference audits."""


class InconsistencyError(RuntimeError):
    """A measured normalizing constant turned out too small."""


class SmallnessError(ValueError):
    """Envelope smallness condition violated; a larger n is required."""


class AuditFailure(RuntimeError):
    """A numerical audit contract did not hold."""
