"""Exception types shared across the package."""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(ToolkitError, ValueError):
    """A mode count, particle count or vector length is out of range."""


class DegenerateInputError(ToolkitError, ValueError):
    """An operation received a zero-norm or otherwise degenerate state."""


class InvalidRDMError(ToolkitError, ValueError):
    """A matrix fails the one-body reduced density matrix contract."""


class ZeroStateError(ToolkitError, ValueError):
    """A construction produced the zero vector (vanishing wedge product)."""


class SectorMismatchError(ToolkitError, ValueError):
    """Two states live on different (d, N) sectors."""


class InvalidGateError(ToolkitError, ValueError):
    """A gate description is inconsistent with the target sector."""


class InvalidPulseError(ToolkitError, ValueError):
    """A pulse specification contains non-finite or unusable values."""


class StepSizeError(ToolkitError, ValueError):
    """A time step is incompatible with the gate durations."""


class InvalidDistributionError(ToolkitError, ValueError):
    """A vector is not a probability distribution."""


class InfeasiblePolytopeError(ToolkitError, ValueError):
    """A polytope specification has an empty feasible set."""


class UnsupportedCaseError(ToolkitError, ValueError):
    """The requested (N, d, m) combination has no known constraint table."""


class ConfigError(ToolkitError, ValueError):
    """A command-line or config-file parameter failed validation."""
