"""Exception types shared across the package."""

from __future__ import annotations


class BSharpError(Exception):
    """Base class for all errors raised by this package."""


class InvalidTreeError(BSharpError, ValueError):
    """A level sequence does not describe a single rooted tree."""


class CoefficientError(BSharpError, ValueError):
    """Invalid coefficient arithmetic (e.g. division by a zero value)."""


class SeriesError(BSharpError, ValueError):
    """A series operation violated one of its preconditions.

    Covers truncation-order mismatches, wrong series kind (map where a flow
    is required or vice versa), and malformed coefficient tables.
    """


class SingularMethodError(SeriesError):
    """The method series cannot be inverted (coefficient of the one-node
    tree is zero)."""


class TableauError(BSharpError, ValueError):
    """Malformed Butcher tableau (ragged rows, length mismatches, ...)."""


class ParseError(BSharpError, ValueError):
    """Syntax error in user-supplied text (coefficients, trees, ODE files).

    Carries a 1-based ``line`` and ``column`` when they are known.
    """

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class UnboundSymbolError(BSharpError, ValueError):
    """A symbolic coefficient was evaluated without a binding for one of
    its symbols."""


class NumericFailureError(BSharpError, ArithmeticError):
    """Floating-point breakdown (NaN/overflow) during numeric integration."""

    def __init__(self, message: str, last_valid_t: float):
        self.last_valid_t = last_valid_t
        super().__init__(message)
