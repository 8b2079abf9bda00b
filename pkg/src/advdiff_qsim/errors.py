"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid physical or numerical parameters (stability, grid, scenario)."""


class ShapeError(ValueError):
    """Array or operator dimensions do not match."""


class NumericalError(RuntimeError):
    """A numerical kernel failed to reach its accuracy contract."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateStateError(NumericalError):
    """Post-selection probability fell below the configured floor."""


class ConsistencyError(RuntimeError):
    """An internal invariant (e.g. reflection symmetry) was violated."""
