"""
Unit tests for result rows.
"""

import pytest

from src.core.config import ScenarioConfig
from src.core.exceptions import ValidationError
from src.models.results import ResultRow, series_stats


class TestResultRow:
    """Test cases for ResultRow."""

    def test_from_errors_computes_statistics(self):
        """Test that statistics are recomputed from the series."""
        row = ResultRow.from_errors("Mean", [1.0, 2.0, 3.0], ScenarioConfig())
        assert row.mean_error == pytest.approx(2.0)
        assert row.std_dev == pytest.approx((2.0 / 3.0) ** 0.5)

    def test_mismatched_statistics_rejected(self):
        """Test that stored statistics must match the series."""
        with pytest.raises(ValidationError):
            ResultRow(
                method="Mean",
                mean_error=5.0,
                std_dev=0.0,
                scenario=ScenarioConfig(),
                errors=(1.0, 1.0),
            )

    def test_unknown_method_rejected(self):
        """Test that method names are restricted."""
        with pytest.raises(ValidationError):
            ResultRow.from_errors("Oracle", [1.0], ScenarioConfig())

    def test_negative_error_rejected(self):
        """Test that errors are absolute values."""
        with pytest.raises(ValidationError):
            ResultRow.from_errors("Mean", [-1.0], ScenarioConfig())

    def test_record_reproduces_row(self):
        """Test that a CSV record rebuilds an equal row."""
        scenario = ScenarioConfig(
            mv=3, mf=1.2, seed=9, include_ground_truth_view=True, stimulate_honest=True
        )
        row = ResultRow.from_errors(
            "K-sources",
            [0.1, 0.7000000000000001, 2.3],
            scenario,
            sweep_factor="mv",
            sweep_value="3",
        )
        record = row.to_record()
        assert all(isinstance(v, str) for v in record.values())
        assert ResultRow.from_record(record) == row

    def test_record_missing_columns(self):
        """Test that incomplete records are rejected."""
        with pytest.raises(ValidationError):
            ResultRow.from_record({"method": "Mean"})

    def test_series_stats(self):
        """Test mean and population standard deviation."""
        assert series_stats([2.0, 4.0]) == (3.0, 1.0)
