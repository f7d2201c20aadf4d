"""
Error hierarchy for the operator_means app.

Input problems (malformed matrices, violated hypotheses) are Django
ValidationErrors, the same way forms and models report bad data. Numerical
breakdowns are ArithmeticErrors. A failed inequality is never an exception:
it is an InequalityReport with holds=False.
"""
from django.core.exceptions import ValidationError


class InputError(ValidationError):
    """Malformed or inconsistent input (shape, symmetry, JSON layout)."""


class DimensionMismatch(InputError):
    pass


class NotPositiveDefinite(InputError):
    pass


class HypothesisViolation(ValidationError):
    """The inputs do not satisfy the hypotheses of the requested inequality."""


class NumericalError(ArithmeticError):
    pass


class ConvergenceError(NumericalError):
    """Jacobi sweeps exhausted before the off-diagonal mass vanished."""


class ConditioningError(NumericalError):
    """Fractional or negative power requested of an ill-conditioned matrix."""


class FunctionalCalculusError(NumericalError):
    """The scalar function is undefined (or not finite) on the spectrum."""


def error_text(exc):
    """Flatten a ValidationError (or any exception) into one line."""
    if isinstance(exc, ValidationError):
        return '; '.join(exc.messages)
    return str(exc)
