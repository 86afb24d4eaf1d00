"""
Views, questions and reports in the unified representation.

Sources answer in their own representation (railway cargo volume, electricity
consumption, ...). A :class:`MappingSpec` converts such a raw view into the
unified representation, where views are plain finite floats and can be
compared with :func:`distance` and :func:`signed_diff`.
"""

import math
from dataclasses import dataclass
from typing import Optional

from src.core.exceptions import MappingError, ValidationError

UnifiedView = float


def ensure_finite(value: float, name: str = "value") -> float:
    """
    Return ``value`` as a float, rejecting NaN and infinities.

    Args:
        value: Number to check
        name: Name used in the error message

    Returns:
        The value as a Python float

    Raises:
        ValidationError: If the value is not finite
    """
    as_float = float(value)
    if not math.isfinite(as_float):
        raise ValidationError(f"{name} must be finite", details={name: value})
    return as_float


@dataclass(frozen=True)
class RawView:
    """A view as provided by a source, in the source's own representation."""

    value: float
    representation_id: str

    def __post_init__(self) -> None:
        ensure_finite(self.value, "value")
        if not self.representation_id:
            raise ValidationError("representation_id must be non-empty")


@dataclass(frozen=True)
class MappingSpec:
    """Affine map from one raw representation into the unified one."""

    representation_id: str
    scale: float = 1.0
    offset: float = 0.0

    def __post_init__(self) -> None:
        if not self.representation_id:
            raise ValidationError("representation_id must be non-empty")
        ensure_finite(self.scale, "scale")
        ensure_finite(self.offset, "offset")
        if self.scale == 0.0:
            raise ValidationError(
                "scale must be non-zero",
                details={"representation_id": self.representation_id},
            )

    @classmethod
    def identity(cls, representation_id: str) -> "MappingSpec":
        """Return the identity mapping for a representation."""
        return cls(representation_id=representation_id, scale=1.0, offset=0.0)

    def inverse_map(self, unified: UnifiedView) -> float:
        """Convert a unified view back into this representation's raw value."""
        return (ensure_finite(unified, "unified") - self.offset) / self.scale


@dataclass(frozen=True)
class Question:
    """A question put to every source; probes carry a known ground truth."""

    question_id: str
    ground_truth: Optional[UnifiedView] = None

    def __post_init__(self) -> None:
        if not self.question_id:
            raise ValidationError("question_id must be non-empty")
        if self.ground_truth is not None:
            object.__setattr__(
                self, "ground_truth", ensure_finite(self.ground_truth, "ground_truth")
            )

    @property
    def has_truth(self) -> bool:
        """Whether the ground truth of this question is known."""
        return self.ground_truth is not None


@dataclass(frozen=True)
class Report:
    """One source's answer to one question, already in unified units."""

    source_id: str
    question_id: str
    answer: UnifiedView

    def __post_init__(self) -> None:
        if not self.source_id or not self.question_id:
            raise ValidationError(
                "source_id and question_id must be non-empty",
                details={"source_id": self.source_id, "question_id": self.question_id},
            )
        object.__setattr__(self, "answer", ensure_finite(self.answer, "answer"))


def map_view(raw: RawView, spec: MappingSpec) -> UnifiedView:
    """
    Convert a raw view into the unified representation.

    Args:
        raw: View in its source representation
        spec: Mapping for that representation

    Returns:
        ``spec.scale * raw.value + spec.offset``

    Raises:
        MappingError: If the spec belongs to another representation
    """
    if spec.representation_id != raw.representation_id:
        raise MappingError(
            "Mapping spec does not match the view's representation",
            details={
                "view_representation": raw.representation_id,
                "spec_representation": spec.representation_id,
            },
        )
    return spec.scale * raw.value + spec.offset


def signed_diff(a: UnifiedView, b: UnifiedView) -> float:
    """Return ``a - b``; the sign carries the direction of the error."""
    return ensure_finite(a, "a") - ensure_finite(b, "b")


def distance(a: UnifiedView, b: UnifiedView) -> float:
    """Return the absolute difference between two unified views."""
    return abs(signed_diff(a, b))
