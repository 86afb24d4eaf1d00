"""
Service Layer implementation for the CIUV stages and the experiment harness.

This package provides the reliability, fusion and baseline estimators, the
iterative CIUV loop and the Monte Carlo experiment runner.
"""

from src.services.baseline_service import BaselineService, TrustRanking
from src.services.ciuv_service import CIUVService, run_ciuv, should_stop
from src.services.experiment_service import ExperimentService, ExperimentResult

__all__ = [
    "BaselineService",
    "TrustRanking",
    "CIUVService",
    "run_ciuv",
    "should_stop",
    "ExperimentService",
    "ExperimentResult",
]
