"""
Dataset types: level and growth-rate tables of GDP views, identity reports.
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import pandas as pd

from src.core.constants import GdpViews
from src.core.exceptions import SchemaError, ValidationError


def _check_frame(frame: pd.DataFrame) -> pd.DataFrame:
    unknown = [c for c in frame.columns if not GdpViews.is_valid(str(c))]
    if unknown:
        raise SchemaError(
            "Unknown view columns", details={"columns": unknown, "allowed": GdpViews.ALL}
        )
    years = list(frame.index)
    if any(later <= earlier for earlier, later in zip(years, years[1:])):
        raise ValidationError("Years must be strictly increasing", details={"years": years})
    return frame.astype(float)


@dataclass(frozen=True)
class LevelTable:
    """Per-year levels of each view; missing values are NaN."""

    frame: pd.DataFrame

    def __post_init__(self) -> None:
        object.__setattr__(self, "frame", _check_frame(self.frame))

    @property
    def years(self) -> List[int]:
        return [int(y) for y in self.frame.index]

    @property
    def views(self) -> List[str]:
        return [str(c) for c in self.frame.columns]


@dataclass(frozen=True)
class GrowthTable:
    """Per-year growth rates in percentage points, gaps already filled."""

    frame: pd.DataFrame

    def __post_init__(self) -> None:
        object.__setattr__(self, "frame", _check_frame(self.frame))

    @property
    def years(self) -> List[int]:
        return [int(y) for y in self.frame.index]

    @property
    def views(self) -> List[str]:
        return [str(c) for c in self.frame.columns]


@dataclass(frozen=True)
class IdentityResidual:
    """Residual ``aggregate - sum(components)`` of one identity in one year."""

    year: int
    aggregate_view: str
    aggregate: float
    components_sum: float
    residual: float
    flagged: bool


@dataclass(frozen=True)
class IdentityReport:
    """Residuals of every checkable identity; ``tolerance`` is relative."""

    tolerance: float
    residuals: Tuple[IdentityResidual, ...] = field(default=())

    @property
    def flagged(self) -> List[IdentityResidual]:
        return [r for r in self.residuals if r.flagged]

    @property
    def passed(self) -> bool:
        return not self.flagged
