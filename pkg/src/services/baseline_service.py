"""
Baseline Service - the comparison estimators.

Mean, Median, Voting and K-sources fuse the views of one question without
using CIUV's reliability weighting. K-sources relies on a trust ranking built
from prior questions.
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from src.core.constants import MethodNames
from src.core.exceptions import ValidationError
from src.core.logging import get_logger
from src.models.reliability import ReliabilityProfile
from src.models.views import UnifiedView
from src.services.fusion_service import mean_view

logger = get_logger(__name__)


@dataclass(frozen=True)
class TrustRanking:
    """Sources ordered most trustworthy first, with a note on where the order came from."""

    source_ids: Tuple[str, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "source_ids", tuple(self.source_ids))
        if len(set(self.source_ids)) != len(self.source_ids):
            raise ValidationError(
                "Trust ranking contains duplicate sources",
                details={"source_ids": list(self.source_ids)},
            )

    def top(self, k: int) -> Tuple[str, ...]:
        """The ``k`` most trusted sources."""
        return self.source_ids[:k]


def _values(views: Sequence[UnifiedView]) -> np.ndarray:
    values = np.asarray(views, dtype=float)
    if values.size == 0:
        raise ValidationError("At least one view is required")
    return values


def mean_estimate(views: Sequence[UnifiedView]) -> UnifiedView:
    """Arithmetic mean of the views."""
    return mean_view(_values(views))


def median_estimate(views: Sequence[UnifiedView]) -> UnifiedView:
    """Middle view, or the average of the two middle views for an even count."""
    return float(np.median(_values(views)))


def voting_estimate(views: Sequence[UnifiedView]) -> UnifiedView:
    """
    The view nearest to all the others.

    Returns the view minimizing the sum of distances to every view; ties go
    to the lowest index.
    """
    values = _values(views)
    totals = np.abs(values[:, np.newaxis] - values[np.newaxis, :]).sum(axis=1)
    return float(values[int(np.argmin(totals))])


def k_sources_estimate(
    views: Mapping[str, UnifiedView], ranking: TrustRanking, k: int
) -> UnifiedView:
    """
    Mean of the views of the ``k`` most trusted sources.

    Args:
        views: Answer per source id
        ranking: Trust ranking covering every source in ``views``
        k: Number of sources to average

    Raises:
        ValidationError: If ``k`` is out of range or the ranking misses a source
    """
    if not 1 <= k <= len(views):
        raise ValidationError(
            "k must lie between 1 and the number of views",
            details={"k": k, "views": len(views)},
        )
    uncovered = [sid for sid in views if sid not in ranking.source_ids]
    if uncovered:
        raise ValidationError(
            "Trust ranking does not cover every source", details={"missing": uncovered}
        )
    ranked = [sid for sid in ranking.source_ids if sid in views]
    return mean_view([views[sid] for sid in ranked[:k]])


def build_trust_ranking(
    profiles: Sequence[ReliabilityProfile], provenance: str = "prior probe questions"
) -> TrustRanking:
    """
    Rank sources by ascending ``|mu| + sigma``.

    The sort is stable, so equal scores keep the profile order.
    """
    scored = sorted(
        range(len(profiles)), key=lambda i: abs(profiles[i].mu) + profiles[i].sigma
    )
    return TrustRanking(
        source_ids=tuple(profiles[i].source_id for i in scored), provenance=provenance
    )


class BaselineService:
    """Runs every baseline estimator on one question."""

    def __init__(self, k: int = 3):
        """
        Initialize Baseline Service.

        Args:
            k: Number of sources K-sources averages
        """
        if k < 1:
            raise ValidationError("k must be positive", details={"k": k})
        self.k = k

    def estimate_all(
        self, views: Mapping[str, UnifiedView], ranking: TrustRanking
    ) -> Dict[str, UnifiedView]:
        """
        Every baseline's estimate for one question.

        Args:
            views: Answer per source id, in source order
            ranking: Trust ranking for K-sources

        Returns:
            Estimate keyed by method name
        """
        values: List[float] = list(views.values())
        return {
            MethodNames.MEAN: mean_estimate(values),
            MethodNames.MEDIAN: median_estimate(values),
            MethodNames.VOTING: voting_estimate(values),
            MethodNames.K_SOURCES: k_sources_estimate(views, ranking, self.k),
        }
