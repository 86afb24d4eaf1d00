"""
Custom exception hierarchy for the CIUV truth-discovery engine.

Every error raised by the package derives from :class:`CIUVError`, so callers
(and the CLI) can catch one base class and still tell configuration problems,
invalid inputs and bad data files apart.
"""

from typing import Optional


class CIUVError(Exception):
    """Base exception for all truth-discovery errors."""

    def __init__(
        self,
        message: str,
        details: Optional[dict] = None,
        cause: Optional[Exception] = None,
    ):
        """
        Initialize the exception.

        Args:
            message: Human-readable error message
            details: Optional dictionary with additional error details
            cause: Optional underlying exception that caused this error
        """
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.cause = cause

    def __str__(self) -> str:
        """Return a formatted error message."""
        base_msg = self.message
        if self.details:
            details_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            return f"{base_msg} ({details_str})"
        return base_msg


class ConfigurationError(CIUVError):
    """Raised when a scenario, sweep or settings value is invalid."""

    pass


class ValidationError(CIUVError):
    """Raised when an operation's precondition or a type invariant is violated."""

    pass


class MappingError(ValidationError):
    """Raised when a raw view is mapped with a spec for another representation."""

    pass


class IncompleteAnswersError(ValidationError):
    """Raised when a report set does not cover every (source, question) pair."""

    pass


class RespondentError(CIUVError):
    """Raised when a respondent environment cannot serve a request."""

    pass


class DatasetError(CIUVError):
    """Base exception for dataset ingestion and transformation errors."""

    pass


class DatasetParseError(DatasetError):
    """Raised when a CSV file cannot be parsed."""

    def __init__(
        self,
        message: str,
        row: Optional[int] = None,
        column: Optional[str] = None,
        details: Optional[dict] = None,
        cause: Optional[Exception] = None,
    ):
        """
        Initialize the parse error.

        Args:
            message: Human-readable error message
            row: 1-based data row (header excluded) where parsing failed
            column: Column name where parsing failed
            details: Optional dictionary with additional error details
            cause: Optional underlying exception that caused this error
        """
        super().__init__(message, details=details, cause=cause)
        self.row = row
        self.column = column

    def __str__(self) -> str:
        """Return a formatted error message."""
        base_msg = super().__str__()
        location = []
        if self.row is not None:
            location.append(f"row {self.row}")
        if self.column is not None:
            location.append(f"column {self.column}")
        if location:
            return f"{base_msg} [{', '.join(location)}]"
        return base_msg


class SchemaError(DatasetError):
    """Raised when a CSV header does not match the expected vocabulary."""

    pass


class GrowthRateError(DatasetError):
    """Raised when growth rates cannot be derived (zero base, unfillable gap)."""

    pass
