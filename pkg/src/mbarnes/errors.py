"""Exception types shared across the package."""


class MBError(Exception):
    """Base class for all package errors."""


class PoleError(MBError, ValueError):
    """A gamma argument sits on (or within tolerance of) a pole."""


class DivisionByZero(MBError, ZeroDivisionError):
    """A rational prefactor with negative power vanishes at the evaluation point."""


class DivergentTailError(MBError, ValueError):
    """The integrand does not decay exponentially along the contour."""


class PatternMismatch(MBError, ValueError):
    """An expression does not have the shape a rewrite rule requires."""


class NotARightPole(MBError, ValueError):
    pass


class HigherOrderPole(MBError, ValueError):
    pass


class NotAdmissible(MBError, ValueError):
    """The requested contour does not separate the poles of the integrand."""

    def __init__(self, message, violated=()):
        super().__init__(message)
        self.violated = list(violated)


class BudgetExceeded(MBError, RuntimeError):
    """Quadrature ran out of evaluations; ``result`` carries the best estimate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ParseError(MBError, ValueError):
    pass
