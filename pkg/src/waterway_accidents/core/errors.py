"""
Exception hierarchy for the analysis core.

Every error carries the process exit code the command line reports for it,
so the CLI can map failures without knowing where they were raised.
"""

from typing import Any


class AnalysisError(Exception):
    """Base class for all analysis failures."""

    exit_code: int = 1


class EmptyInputError(AnalysisError):
    """Raised when an input that must be non-empty is empty."""

    exit_code = 3


class RecordParseError(AnalysisError):
    """Raised for a malformed accident-record or alias row.

    Attributes:
        line: 1-based source line of the offending row.
        column: Name of the offending column, when known.
    """

    exit_code = 3

    def __init__(self, message: str, line: int, column: str | None = None) -> None:
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}")


class InsufficientDataError(AnalysisError):
    """Raised when there are too few years for the requested regression."""

    exit_code = 4


class CollinearityError(AnalysisError):
    """Raised when the normal matrix of a fit is singular.

    Attributes:
        column: Design column at which elimination broke down.
    """

    exit_code = 4

    def __init__(self, column: str) -> None:
        self.column = column
        super().__init__(f"predictor '{column}' is collinear with earlier design columns")


class DegenerateResponseError(AnalysisError):
    """Raised when the response is constant but the fit still leaves residual error."""

    exit_code = 4


class NoModelError(AnalysisError):
    """Raised when model selection cannot produce a final model.

    Attributes:
        diagnostics: Gate outcomes gathered before the failure.
    """

    exit_code = 4

    def __init__(self, message: str, diagnostics: list[str] | None = None) -> None:
        self.diagnostics = diagnostics or []
        super().__init__(message)


class DegenerateInputError(NoModelError):
    """Raised when the multicollinearity gate removes every predictor."""


class SubsetLimitError(AnalysisError):
    """Raised when exhaustive enumeration would exceed the predictor cap."""

    exit_code = 4


class UndefinedCorrelationError(AnalysisError):
    """Raised when a correlation is requested for a constant column."""

    exit_code = 4


class ConsistencyError(AnalysisError):
    """Raised when inputs that must agree (fit, matrix, labels) do not."""

    exit_code = 4


class DomainError(AnalysisError):
    """Raised for distribution parameters outside their domain."""

    exit_code = 4


class ModelSchemaError(AnalysisError):
    """Raised when a serialized model document fails validation."""

    exit_code = 5

    def __init__(self, message: str, details: Any = None) -> None:
        self.details = details
        super().__init__(message)
