"""Exception hierarchy.

The command-line front end maps these onto exit codes: argument/config
problems exit with 2, numerical failures with 3 and degenerate instances
with 4.
"""


class SklError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ArgumentError(SklError, ValueError):
    """An input violates a documented precondition."""

    exit_code = 2


class ParseError(ArgumentError):
    """A dataset file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ArgumentError):
    """Parsed data is well-formed but unusable (e.g. nothing labeled)."""


class NumericalError(SklError, ArithmeticError):
    """A numerical routine failed (non-convergence, singular system)."""

    exit_code = 3


class DegenerateInstanceError(SklError, ArithmeticError):
    """A closed form is undefined for this particular instance."""

    exit_code = 4
