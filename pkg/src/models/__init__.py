"""
Domain types of the CIUV engine.

All types are immutable values. Result rows live in :mod:`src.models.results`
and are imported from there, since they embed the scenario configuration.
"""

from src.models.views import (
    UnifiedView,
    RawView,
    MappingSpec,
    Question,
    Report,
    map_view,
    distance,
    signed_diff,
)
from src.models.reliability import TruthMode, ReliabilityProfile, ProbeSet
from src.models.fusion import WeightAssignment, ErrorThreshold, TruthEstimate
from src.models.simworld import ExponentSign, SourceSpec, AdversaryConfig, ImprovementConfig
from src.models.orchestration import (
    StopDecision,
    StopReason,
    StoppingConfig,
    IterationRecord,
    CIUVRun,
)
from src.models.dataset import LevelTable, GrowthTable, IdentityResidual, IdentityReport

__all__ = [
    "UnifiedView",
    "RawView",
    "MappingSpec",
    "Question",
    "Report",
    "map_view",
    "distance",
    "signed_diff",
    "TruthMode",
    "ReliabilityProfile",
    "ProbeSet",
    "WeightAssignment",
    "ErrorThreshold",
    "TruthEstimate",
    "ExponentSign",
    "SourceSpec",
    "AdversaryConfig",
    "ImprovementConfig",
    "StopDecision",
    "StopReason",
    "StoppingConfig",
    "IterationRecord",
    "CIUVRun",
    "LevelTable",
    "GrowthTable",
    "IdentityResidual",
    "IdentityReport",
]
