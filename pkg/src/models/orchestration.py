"""
Types of the iterate / verify / stimulate loop.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Tuple

from src.core.constants import AlgorithmDefaults
from src.core.exceptions import ValidationError
from src.models.fusion import ErrorThreshold, TruthEstimate


class StopDecision(str, Enum):
    """Outcome of the stopping test after one iteration."""

    ACCEPT_R = "AcceptR"
    STALL_D = "StallD"
    CONTINUE = "Continue"


class StopReason(str, Enum):
    """Why a run ended."""

    ACCEPT_R = "AcceptR"
    STALL_D = "StallD"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class StoppingConfig:
    """
    Stopping thresholds.

    Attributes:
        R: Acceptable confidence probability
        D: Lower bound of confidence improvement between iterations
        e_T: Error window half-width
        max_iterations: Hard cap on the number of iterations
    """

    R: float = AlgorithmDefaults.ACCEPTABLE_CONFIDENCE
    D: float = AlgorithmDefaults.MIN_IMPROVEMENT
    e_T: float = AlgorithmDefaults.ERROR_THRESHOLD
    max_iterations: int = AlgorithmDefaults.MAX_ITERATIONS

    def __post_init__(self) -> None:
        if not 0 < self.R <= 1:
            raise ValidationError("R must lie in (0, 1]", details={"R": self.R})
        if not math.isfinite(self.D) or self.D < 0:
            raise ValidationError("D must be non-negative", details={"D": self.D})
        ErrorThreshold(self.e_T)
        if self.max_iterations < 1:
            raise ValidationError(
                "max_iterations must be positive",
                details={"max_iterations": self.max_iterations},
            )


@dataclass(frozen=True)
class IterationRecord:
    """
    One iteration of a run.

    ``per_source_confidence`` is ``P(|e_i| < e_T)`` for each source taken
    alone; ``stimulated`` holds the sources the means took effect on after
    this iteration, and ``cost`` is their count.
    """

    iteration: int
    estimate: TruthEstimate
    per_source_confidence: Tuple[float, ...]
    stimulated: FrozenSet[str] = field(default_factory=frozenset)
    cost: int = 0

    def __post_init__(self) -> None:
        if self.iteration < 0:
            raise ValidationError("iteration must be non-negative")
        if any(not 0.0 <= p <= 1.0 for p in self.per_source_confidence):
            raise ValidationError("per-source confidences must lie in [0, 1]")
        if self.cost != len(self.stimulated):
            raise ValidationError(
                "cost must equal the number of stimulated sources",
                details={"cost": self.cost, "stimulated": len(self.stimulated)},
            )

    def to_dict(self) -> Dict[str, Any]:
        """Flat JSON-ready representation."""
        estimate = self.estimate
        return {
            "iteration": self.iteration,
            "u_star": estimate.u_star,
            "mu_star": estimate.mu_star,
            "sigma2_star": estimate.sigma2_star,
            "confidence": estimate.confidence,
            "source_ids": list(estimate.source_ids),
            "weights": list(estimate.weights.weights),
            "per_source_confidence": list(self.per_source_confidence),
            "stimulated": sorted(self.stimulated),
            "cost": self.cost,
        }


@dataclass(frozen=True)
class CIUVRun:
    """Result of one run: the final estimate and the full history."""

    estimate: TruthEstimate
    history: Tuple[IterationRecord, ...]
    stop_reason: StopReason

    @property
    def total_cost(self) -> int:
        """Stimulations applied over the whole run."""
        return sum(record.cost for record in self.history)

    @property
    def confidences(self) -> List[float]:
        """Fused confidence per iteration."""
        return [record.estimate.confidence for record in self.history]

    def __iter__(self):
        # allows ``estimate, history = run``
        yield self.estimate
        yield list(self.history)
