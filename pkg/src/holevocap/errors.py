"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input violates a documented invariant."""


class NotPSDError(ValidationError):
    """A matrix that must be positive semidefinite has a negative eigenvalue."""


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its iteration budget."""
