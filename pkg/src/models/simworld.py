"""
Simulation types: source error models, adversaries and the stimulation response.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from src.core.constants import AlgorithmDefaults
from src.core.exceptions import ValidationError


class ExponentSign(str, Enum):
    """Sign of the exponent in the improvement-ratio curve."""

    NEGATIVE_DECAY = "negative_decay"
    LITERAL_POSITIVE = "literal_positive"


@dataclass(frozen=True)
class SourceSpec:
    """
    Error model of a simulated source.

    Answers are drawn as ``truth - e`` with ``e ~ N(error_mu, error_sigma**2)``,
    so the reliability estimate of a source converges to ``error_mu``.
    """

    source_id: str
    error_mu: float
    error_sigma: float
    malicious: bool = False

    def __post_init__(self) -> None:
        if not self.source_id:
            raise ValidationError("source_id must be non-empty")
        if not math.isfinite(self.error_mu) or not math.isfinite(self.error_sigma):
            raise ValidationError(
                "Error parameters must be finite", details={"source_id": self.source_id}
            )
        if self.error_sigma < 0:
            raise ValidationError(
                "error_sigma must be non-negative",
                details={"source_id": self.source_id, "error_sigma": self.error_sigma},
            )


@dataclass(frozen=True)
class AdversaryConfig:
    """How many sources are manipulated, how strongly, and the selection seed."""

    mv: int = 0
    mf: float = 1.0
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.mv < 0:
            raise ValidationError("mv must be non-negative", details={"mv": self.mv})
        if not math.isfinite(self.mf) or self.mf <= 0:
            raise ValidationError("mf must be positive", details={"mf": self.mf})


@dataclass(frozen=True)
class ImprovementConfig:
    """Parameters of the distance-shrink curve applied to stimulated sources."""

    if_factor: float = AlgorithmDefaults.IMPROVEMENT_FACTOR
    a: float = AlgorithmDefaults.IMPROVEMENT_A
    exponent_sign: ExponentSign = ExponentSign.NEGATIVE_DECAY

    def __post_init__(self) -> None:
        if not math.isfinite(self.if_factor) or self.if_factor <= 0:
            raise ValidationError(
                "if_factor must be positive", details={"if_factor": self.if_factor}
            )
        if not 0 < self.a < 1:
            raise ValidationError("a must lie in (0, 1)", details={"a": self.a})
