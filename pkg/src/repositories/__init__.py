"""
Repository Pattern implementation for data access abstraction.

This package provides:
- The respondent environment port and its simulated and static implementations
- File access for level tables, reports and truths
"""

from src.repositories.base import RespondentEnvironment
from src.repositories.static_environment import StaticEnvironment
from src.repositories.simulated_environment import SimulatedEnvironment
from src.repositories.dataset_repository import DatasetRepository

__all__ = [
    "RespondentEnvironment",
    "StaticEnvironment",
    "SimulatedEnvironment",
    "DatasetRepository",
]
