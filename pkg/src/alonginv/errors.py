"""Exception hierarchy shared by every module."""


class AlongInvError(Exception):
    """Base class for all library errors."""


class InputError(AlongInvError, ValueError):
    """Malformed matrix data or arguments."""


class NotInvertible(AlongInvError):
    """A square matrix failed the singular-value invertibility test."""


class NotInvertibleAlong(AlongInvError):
    """``a`` is not invertible along ``d`` (a mathematical fact, not a failure)."""


class SingularResolvent(AlongInvError):
    """A resolvent such as ``da + t*pi`` or ``da + t*I`` could not be inverted."""


class PreconditionViolated(AlongInvError):
    """A theorem hypothesis needed by the requested operation does not hold."""


class BadInnerInverse(PreconditionViolated):
    pass


class ContractionFailed(PreconditionViolated):
    pass


class SpectrumViolation(PreconditionViolated):
    pass


class BudgetExceeded(AlongInvError):
    """Exhaustive enumeration would exceed the configured budget."""


class ConvergenceError(AlongInvError):
    """An iteration (QR, Jacobi, series, quadrature) did not converge."""


class MaxTermsExceeded(ConvergenceError):
    pass


class QuadratureNotConverged(ConvergenceError):
    pass
