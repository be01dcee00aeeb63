"""Exception types raised across the package."""


class DimensionError(ValueError):
    pass


class SymmetryError(ValueError):
    pass


class ValidationError(ValueError):
    """Input matrix fails the hermiticity check."""


class SolverError(RuntimeError):
    """Eigensolver did not converge; carries the realization seed for replay."""

    def __init__(self, message, seed=None):
        super().__init__(message)
        self.seed = seed


class UnfoldingError(ValueError):
    """Fitted staircase polynomial is not monotone over the retained window."""
