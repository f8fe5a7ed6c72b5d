"""Exception types shared across the package."""


class OptilensError(Exception):
    """Base class for all package errors."""


class DomainError(OptilensError, ValueError):
    """Raised when a point or parameter lies outside a metric's valid domain."""


class CaptureError(OptilensError):
    """A light ray fell below the capture radius instead of escaping."""

    def __init__(self, message, r=None, s=None):
        super().__init__(message)
        self.r = r
        self.s = s


class StepFailure(OptilensError):
    """The adaptive step controller could not meet its tolerance."""


class NonConvergence(OptilensError):
    """An iteration or integration did not reach its target."""


class ToleranceNotMet(OptilensError):
    """Adaptive quadrature exhausted its subdivision budget."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error
