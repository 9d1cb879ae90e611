"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An input lies outside a function's documented domain."""


class FitConvergenceError(RuntimeError):
    """Quantile fitting failed to converge; carries the last residuals."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = tuple(residuals) if residuals is not None else None


class InternalConsistencyError(RuntimeError):
    """An intermediate result violated an internal identity.

    Raised instead of silently renormalizing, so numerical rot surfaces at
    the point of computation rather than downstream.
    """
