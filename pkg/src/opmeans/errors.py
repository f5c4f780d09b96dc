"""Exception hierarchy shared by every module."""


class OpMeansError(Exception):
    """Base class for all library errors."""


class NotSymmetric(OpMeansError, ValueError):
    pass


class NotPositiveDefinite(OpMeansError, ValueError):
    pass


class NoConvergence(OpMeansError, RuntimeError):
    pass


class DomainError(OpMeansError, ValueError):
    pass


class DimensionMismatch(OpMeansError, ValueError):
    pass


class EmptyInput(OpMeansError, ValueError):
    pass


class ParamOutOfRange(OpMeansError, ValueError):
    pass


class LengthMismatch(OpMeansError, ValueError):
    pass


class RecipeInvalid(OpMeansError, ValueError):
    pass


class ClassTagMismatch(OpMeansError, ValueError):
    pass


class UnsupportedMean(OpMeansError, ValueError):
    pass


class ParseError(OpMeansError, ValueError):
    pass


class MaxIterExceeded(NoConvergence):
    """Raised by iterative solvers; carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class MonotoneViolation(OpMeansError, RuntimeError):
    """An upper-start iterate increased beyond slack in Loewner order."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
