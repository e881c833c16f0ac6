"""Exception types shared across the package."""


class DFSLabError(Exception):
    """Base class for package-specific errors."""


class ConfigError(DFSLabError):
    """A run configuration could not be parsed or is inconsistent."""


class NumericalError(DFSLabError):
    """A numerical routine failed (non-convergence, broken contract)."""


class StabilityError(DFSLabError):
    """The fixed-step integrator stability guard was violated."""
