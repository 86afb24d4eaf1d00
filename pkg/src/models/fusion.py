"""
Fusion types: simplex weights, fused estimates and the error window.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from src.core.constants import AlgorithmDefaults
from src.core.exceptions import ValidationError


@dataclass(frozen=True)
class WeightAssignment:
    """Weights over sources: non-negative and summing to one."""

    weights: Tuple[float, ...]

    def __post_init__(self) -> None:
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise ValidationError("A weight assignment needs at least one weight")
        if any(not math.isfinite(w) or w < 0.0 for w in weights):
            raise ValidationError(
                "Weights must be finite and non-negative", details={"weights": weights}
            )
        total = math.fsum(weights)
        if abs(total - 1.0) > AlgorithmDefaults.SIMPLEX_TOLERANCE:
            raise ValidationError(
                "Weights must sum to 1", details={"sum": total, "weights": weights}
            )
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.weights)

    def as_array(self) -> np.ndarray:
        """Weights as a float array."""
        return np.asarray(self.weights, dtype=float)

    @classmethod
    def uniform(cls, size: int) -> "WeightAssignment":
        """Equal weights over ``size`` sources."""
        if size < 1:
            raise ValidationError("size must be positive", details={"size": size})
        return cls(weights=(1.0 / size,) * size)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "WeightAssignment":
        """Build from any sequence of floats."""
        return cls(weights=tuple(float(v) for v in values))


@dataclass(frozen=True)
class ErrorThreshold:
    """Half-width ``e_T`` of the error window ``|e*| < e_T``."""

    e_T: float = AlgorithmDefaults.ERROR_THRESHOLD

    def __post_init__(self) -> None:
        if not math.isfinite(self.e_T) or self.e_T <= 0:
            raise ValidationError("e_T must be positive", details={"e_T": self.e_T})


@dataclass(frozen=True)
class TruthEstimate:
    """
    A fused view with its Gaussian error model and confidence.

    Attributes:
        u_star: Fused view
        mu_star: Mean of the fused error
        sigma2_star: Variance of the fused error
        confidence: ``P(|e*| < e_T)``
        weights: Weights the views were fused with
        source_ids: Sources in weight order
    """

    u_star: float
    mu_star: float
    sigma2_star: float
    confidence: float
    weights: WeightAssignment
    source_ids: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(
                "confidence must lie in [0, 1]", details={"confidence": self.confidence}
            )
        if self.sigma2_star < 0:
            raise ValidationError(
                "sigma2_star must be non-negative", details={"sigma2_star": self.sigma2_star}
            )
