"""Exception types raised across the package."""


class PrecisError(Exception):
    """Base class for all package errors."""


class InputValidationError(PrecisError, ValueError):
    """Input data or parameters violate a documented precondition."""


class NotPositiveDefinite(PrecisError, ArithmeticError):
    """A matrix required to be positive definite is not."""


class NumericalError(PrecisError, ArithmeticError):
    """An iterative solver lost positive definiteness or diverged.

    ``iteration`` carries the outer iteration index where it happened.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class SolverFailure(PrecisError, RuntimeError):
    """A column subproblem could not be solved."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class DegenerateColumn(InputValidationError):
    """A data column has zero variance."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class DegenerateGrid(InputValidationError):
    """A penalty grid cannot be built (no off-diagonal signal)."""
