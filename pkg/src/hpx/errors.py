"""Exception types shared across the package."""


class HpxError(Exception):
    """Base class for all package errors."""


class DomainError(HpxError, ValueError):
    pass


class ZeroConstantTerm(HpxError, ValueError):
    pass


class BranchError(HpxError, ValueError):
    """Raised when a real power of a series would need an ambiguous branch."""


class DegreeTooHigh(HpxError, ValueError):
    pass


class DegenerateInput(HpxError, ValueError):
    pass


class NotNonnegative(HpxError, ValueError):
    pass


class PairingFailure(HpxError, RuntimeError):
    pass


class StaleCandidate(HpxError, ValueError):
    pass


class InvariantViolation(HpxError, AssertionError):
    pass


class NoConvergence(HpxError, RuntimeError):
    """Quadrature refinement hit its node cap; ``estimate`` holds the best value."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
