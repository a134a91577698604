"""Exception types shared across the solver."""


class MovingMeshError(Exception):
    """Base class for all errors raised by this package."""


class GridError(MovingMeshError):
    """Invalid grid geometry: non-monotone nodes or a collapsed cell."""


class CFLViolationError(MovingMeshError):
    """A cell exceeded the stability bound for the chosen time step."""


class DryStateError(MovingMeshError):
    """Total water depth fell below the configured minimum."""


class TridiagonalError(MovingMeshError):
    """Zero pivot encountered while eliminating a tridiagonal system."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"zero pivot at row {index} of tridiagonal system")


class IterationError(MovingMeshError):
    """An iterative procedure failed to converge within its budget."""


class ConfigError(MovingMeshError):
    """Invalid experiment configuration."""
