"""
Common error handling utilities.

This module maps the exception hierarchy onto CLI exit codes so every
subcommand reports failures the same way.
"""

import sys
from typing import Optional, TextIO

from src.core.constants import ExitCodes
from src.core.exceptions import (
    CIUVError,
    ConfigurationError,
    DatasetError,
    ValidationError,
)
from src.core.logging import get_logger

logger = get_logger(__name__)


def exit_code_for(exception: Optional[BaseException]) -> int:
    """
    Classify an exception into a process exit code.

    Args:
        exception: The exception that ended the command, or None on success

    Returns:
        0 on success, 2 for configuration, 3 for data files, 4 for invalid
        inputs and 1 for anything unexpected
    """
    if exception is None:
        return ExitCodes.OK
    if isinstance(exception, ConfigurationError):
        return ExitCodes.CONFIGURATION
    if isinstance(exception, DatasetError):
        return ExitCodes.DATA
    if isinstance(exception, ValidationError):
        return ExitCodes.VALIDATION
    return ExitCodes.UNEXPECTED


def handle_cli_error(
    exception: BaseException, command: str, stream: Optional[TextIO] = None
) -> int:
    """
    Report an error from a CLI command and return its exit code.

    Known errors get a one-line diagnostic; unexpected ones are logged with
    their traceback.

    Args:
        exception: The exception raised by the command
        command: Subcommand name, used as the diagnostic prefix
        stream: Where to write the diagnostic (defaults to stderr)

    Returns:
        Exit code for the exception
    """
    stream = stream or sys.stderr
    code = exit_code_for(exception)
    if isinstance(exception, CIUVError):
        logger.debug(f"{command} failed with {type(exception).__name__}: {exception}")
        print(f"ciuv {command}: error: {exception}", file=stream)
    else:
        logger.exception(f"Unexpected error in {command}")
        print(f"ciuv {command}: unexpected error: {exception}", file=stream)
    return code
