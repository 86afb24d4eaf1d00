"""
Core infrastructure modules for the CIUV engine.

This package provides:
- Logging setup
- Exception hierarchy
- Constants and algorithm defaults

Configuration lives in :mod:`src.core.config` and is imported from there
directly, since it depends on the domain enums in :mod:`src.models`.
"""

from src.core.logging import setup_logging, get_logger
from src.core.exceptions import (
    CIUVError,
    ConfigurationError,
    ValidationError,
    MappingError,
    IncompleteAnswersError,
    RespondentError,
    DatasetError,
    DatasetParseError,
    SchemaError,
    GrowthRateError,
)
from src.core.constants import (
    GdpViews,
    ErrorSignProfiles,
    MethodNames,
    AlgorithmDefaults,
    FilePatterns,
    CsvColumns,
    ExitCodes,
)

__all__ = [
    "setup_logging",
    "get_logger",
    "CIUVError",
    "ConfigurationError",
    "ValidationError",
    "MappingError",
    "IncompleteAnswersError",
    "RespondentError",
    "DatasetError",
    "DatasetParseError",
    "SchemaError",
    "GrowthRateError",
    "GdpViews",
    "ErrorSignProfiles",
    "MethodNames",
    "AlgorithmDefaults",
    "FilePatterns",
    "CsvColumns",
    "ExitCodes",
]
