"""Exception hierarchy shared by every module.

The CLI maps ``DomainError`` to exit status 2 and ``NumericalError`` /
``ScheduleOverflowError`` to exit status 1.
"""


class EntangledError(Exception):
    """Base class for package errors."""


class DomainError(EntangledError, ValueError):
    """An argument is outside the domain of the operation."""


class InvalidIntervalError(DomainError):
    pass


class EmptyInputError(DomainError):
    pass


class DegenerateFitError(DomainError):
    pass


class NumericalError(EntangledError, ArithmeticError):
    """A computation produced a non-finite intermediate or failed to converge."""


class QuadratureError(NumericalError):
    pass


class ScheduleOverflowError(EntangledError, RuntimeError):
    """The requested run exceeds the configured truncation step budget."""
