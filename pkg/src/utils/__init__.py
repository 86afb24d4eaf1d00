"""
Utility modules for the CIUV engine.

This package provides shared utilities for error reporting and output files.
"""

from src.utils.error_handlers import exit_code_for, handle_cli_error
from src.utils.file_utils import (
    ensure_dir,
    write_jsonl,
    read_jsonl,
    write_xy_csv,
    write_records_csv,
    read_records_csv,
)

__all__ = [
    "exit_code_for",
    "handle_cli_error",
    "ensure_dir",
    "write_jsonl",
    "read_jsonl",
    "write_xy_csv",
    "write_records_csv",
    "read_records_csv",
]
