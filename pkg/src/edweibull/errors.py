"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class ConvergenceError(ArithmeticError):
    """A series or quadrature failed to reach its tolerance.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (terms used, largest term magnitude, estimated rounding error, ...), so
    callers can decide whether to fall back to another method.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class AccuracyError(ArithmeticError):
    """A probability left [0, 1] by more than rounding can explain."""
