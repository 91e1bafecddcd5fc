"""Exception hierarchy shared by all modules."""


class GammasumError(Exception):
    """Base class for errors raised by this package."""


class DomainError(GammasumError, ValueError):
    """An argument lies outside the domain of the requested function."""


class PoleError(DomainError):
    """The argument coincides with (or is too close to) a pole."""


class DivergentError(DomainError):
    """The requested quantity is infinite for these parameters."""


class ConvergenceError(GammasumError, ArithmeticError):
    """An iterative method failed to reach its tolerance.

    The partial result, when one exists, is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
