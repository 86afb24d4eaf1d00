"""
Result rows of the experiment harness.

A :class:`ResultRow` is one ``(sweep point, method)`` cell of a results table:
the per-question absolute errors concatenated over trials, their mean and
population standard deviation, and the scenario that produced them.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from src.core.config import ScenarioConfig
from src.core.constants import MethodNames
from src.core.exceptions import ValidationError

STAT_TOLERANCE = 1e-9

# Leading columns of results.csv; scenario fields follow, then the series.
RESULT_COLUMNS = ["sweep_factor", "sweep_value", "method", "mean_error", "std_dev"]
ERRORS_COLUMN = "errors"


def series_stats(errors: Sequence[float]) -> Tuple[float, float]:
    """Mean and population standard deviation of an error series."""
    values = np.asarray(errors, dtype=float)
    return float(np.mean(values)), float(np.std(values))


@dataclass(frozen=True)
class ResultRow:
    """
    One method's aggregate error in one scenario.

    Attributes:
        method: Estimator name
        mean_error: Mean of ``errors``
        std_dev: Population standard deviation of ``errors``
        scenario: Scenario the row was produced under
        errors: ``|estimate - truth|`` per question, trials concatenated in order
        sweep_factor: Swept field name, empty when no sweep was given
        sweep_value: Value of the swept field as written on the command line
    """

    method: str
    mean_error: float
    std_dev: float
    scenario: ScenarioConfig
    errors: Tuple[float, ...] = field(default=())
    sweep_factor: str = ""
    sweep_value: str = ""

    def __post_init__(self) -> None:
        if self.method not in MethodNames.ALL:
            raise ValidationError("Unknown method name", details={"method": self.method})
        object.__setattr__(self, "errors", tuple(float(e) for e in self.errors))
        if not self.errors:
            raise ValidationError("A result row needs a non-empty error series")
        if any(not math.isfinite(e) or e < 0 for e in self.errors):
            raise ValidationError("Errors must be finite and non-negative")
        mean, std = series_stats(self.errors)
        if abs(mean - self.mean_error) > STAT_TOLERANCE or abs(std - self.std_dev) > STAT_TOLERANCE:
            raise ValidationError(
                "Statistics do not match the stored series",
                details={"method": self.method, "mean_error": self.mean_error, "expected": mean},
            )

    @classmethod
    def from_errors(
        cls,
        method: str,
        errors: Sequence[float],
        scenario: ScenarioConfig,
        sweep_factor: str = "",
        sweep_value: str = "",
    ) -> "ResultRow":
        """Build a row whose statistics are computed from ``errors``."""
        mean, std = series_stats(errors)
        return cls(
            method=method,
            mean_error=mean,
            std_dev=std,
            scenario=scenario,
            errors=tuple(errors),
            sweep_factor=sweep_factor,
            sweep_value=sweep_value,
        )

    def to_record(self) -> Dict[str, str]:
        """
        Flat string record for CSV output.

        Floats are written with ``repr`` so that reading the record back
        reproduces the row exactly.
        """
        record: Dict[str, str] = {
            "sweep_factor": self.sweep_factor,
            "sweep_value": self.sweep_value,
            "method": self.method,
            "mean_error": repr(self.mean_error),
            "std_dev": repr(self.std_dev),
        }
        for name, value in self.scenario.model_dump(mode="json").items():
            record[name] = repr(value) if isinstance(value, float) else str(value)
        record[ERRORS_COLUMN] = json.dumps(list(self.errors))
        return record

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "ResultRow":
        """
        Rebuild a row from a record produced by :meth:`to_record`.

        Raises:
            ValidationError: If the record is missing columns or malformed
        """
        missing = [c for c in RESULT_COLUMNS + [ERRORS_COLUMN] if c not in record]
        if missing:
            raise ValidationError("Result record is missing columns", details={"missing": missing})

        scenario_values = {
            name: record[name] for name in ScenarioConfig.field_names() if name in record
        }
        try:
            errors = tuple(float(e) for e in json.loads(record[ERRORS_COLUMN]))
            mean_error = float(record["mean_error"])
            std_dev = float(record["std_dev"])
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Malformed result record: {e}", cause=e) from e

        return cls(
            method=str(record["method"]),
            mean_error=mean_error,
            std_dev=std_dev,
            scenario=ScenarioConfig.from_mapping(scenario_values),
            errors=errors,
            sweep_factor=_text(record.get("sweep_factor")),
            sweep_value=_text(record.get("sweep_value")),
        )


def _text(value: Optional[Any]) -> str:
    return "" if value is None else str(value)
