"""Exception hierarchy shared by every sectag module."""


class SectagError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ParseError(SectagError):
    """Input text does not follow the declared file format."""

    exit_code = 2

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InputError(SectagError):
    """Inputs are missing or cannot be paired."""

    exit_code = 2


class ValidationError(SectagError):
    """Input parsed but violates a domain invariant."""

    exit_code = 3


class ConfigurationError(SectagError):
    exit_code = 3


class UnsupportedInputError(SectagError):
    exit_code = 3


class TrainingDataError(SectagError):
    exit_code = 3


class UndefinedMetricError(SectagError):
    """The metric has an empty denominator."""

    exit_code = 3


class ShapeError(SectagError):
    exit_code = 3


class GraphStateError(SectagError):
    """Backward was requested on a tensor that has no recorded graph."""

    exit_code = 4


class NumericalError(SectagError):
    exit_code = 4
