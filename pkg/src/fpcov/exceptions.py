"""Exception hierarchy shared by the solution engines."""


class FPCovError(Exception):
    """Base class for all errors raised by fpcov.

    Engines attach context on the way out: ``t`` is the time at which a
    control evaluation failed, ``v`` the shooting unknowns being tried.
    """

    t = None
    v = None


class NoStationaryPoint(FPCovError):
    """f_u - p has no sign change on the control search bracket."""


class SingularControl(FPCovError):
    """The closed-form control law hit its singular denominator."""


class MaxItersExceeded(FPCovError):
    """Iteration budget exhausted; ``best`` holds the best-so-far state."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class LineSearchFailed(FPCovError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SingularBranch(FPCovError):
    """c**2 - 4 z**2 is (numerically) zero, or the branch tag is violated."""


class SingularDenominator(FPCovError):
    pass


class DomainError(FPCovError):
    """A control value left the admissible set before reaching the integrand."""
