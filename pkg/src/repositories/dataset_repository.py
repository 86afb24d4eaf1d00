"""
Dataset Repository.

Reads and writes the CSV files of the engine and derives growth-rate data:

- level tables of the thirteen GDP views, checked against the accounting
  identities (which hold in levels, not in growth rates)
- year-over-year growth rates with the previous-year gap fill
- the GDP-view synthesizer producing a complete answer matrix
- long-format report, truth and mapping files
"""

import math
import re
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.core.constants import AlgorithmDefaults, CsvColumns, FilePatterns, GdpViews
from src.core.exceptions import (
    DatasetError,
    DatasetParseError,
    GrowthRateError,
    SchemaError,
)
from src.core.logging import get_logger
from src.models.dataset import GrowthTable, IdentityReport, IdentityResidual, LevelTable
from src.models.reliability import ProbeSet
from src.models.simworld import SourceSpec
from src.models.views import MappingSpec, Question, Report
from src.repositories.simulated_environment import honest_answers

logger = get_logger(__name__)

_LINE_PATTERN = re.compile(r"line (\d+)")


def _read_frame(path: Path, required: Sequence[str]) -> pd.DataFrame:
    """Read a CSV as strings and check the header holds ``required``."""
    path = Path(path)
    if not path.exists():
        raise DatasetError("File not found", details={"path": str(path)})
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError as e:
        raise SchemaError("File is empty or has no header", details={"path": str(path)}) from e
    except pd.errors.ParserError as e:
        match = _LINE_PATTERN.search(str(e))
        line = int(match.group(1)) if match else None
        raise DatasetParseError(
            "Malformed CSV",
            row=line - 1 if line else None,
            details={"path": str(path), "reason": str(e).strip()},
            cause=e,
        ) from e
    except UnicodeDecodeError as e:
        raise DatasetParseError(
            "File is not valid UTF-8", details={"path": str(path)}, cause=e
        ) from e

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise SchemaError(
            "Missing required columns",
            details={"path": str(path), "missing": missing, "found": list(frame.columns)},
        )
    return frame


def _parse_number(text: str, row: int, column: str, allow_missing: bool = False) -> float:
    cell = text.strip()
    if cell == "":
        if allow_missing:
            return math.nan
        raise DatasetParseError("Missing value", row=row, column=column)
    try:
        value = float(cell)
    except ValueError as e:
        raise DatasetParseError(
            "Not a number", row=row, column=column, details={"value": cell}, cause=e
        ) from e
    if not math.isfinite(value):
        raise DatasetParseError("Value must be finite", row=row, column=column)
    return value


def _parse_year(text: str, row: int) -> int:
    value = _parse_number(text, row, CsvColumns.YEAR)
    if not value.is_integer():
        raise DatasetParseError("Year must be an integer", row=row, column=CsvColumns.YEAR)
    return int(value)


def check_identities(levels: LevelTable, tolerance: float) -> IdentityReport:
    """
    Residuals of the three accounting identities in every year they can be checked.

    A year is checked for an identity only when the aggregate and every
    component are present. A residual is flagged when
    ``|residual| > tolerance * |aggregate|``.
    """
    frame = levels.frame
    residuals: List[IdentityResidual] = []
    for year in levels.years:
        for aggregate_view, components in GdpViews.IDENTITIES.items():
            columns = [aggregate_view] + components
            if any(c not in frame.columns for c in columns):
                continue
            row = frame.loc[year, columns]
            if row.isna().any():
                continue
            aggregate = float(row[aggregate_view])
            components_sum = math.fsum(float(row[c]) for c in components)
            residual = aggregate - components_sum
            residuals.append(
                IdentityResidual(
                    year=year,
                    aggregate_view=aggregate_view,
                    aggregate=aggregate,
                    components_sum=components_sum,
                    residual=residual,
                    flagged=abs(residual) > tolerance * abs(aggregate),
                )
            )
    return IdentityReport(tolerance=tolerance, residuals=tuple(residuals))


def load_and_validate(
    path: Path, tolerance: float = AlgorithmDefaults.IDENTITY_TOLERANCE
) -> Tuple[LevelTable, IdentityReport]:
    """
    Load a level CSV and check the accounting identities.

    Args:
        path: CSV with a ``year`` column and GDP view columns; empty cells are missing
        tolerance: Relative residual tolerance

    Returns:
        The level table and its identity report

    Raises:
        SchemaError: Missing ``year`` column or a column outside the vocabulary
        DatasetParseError: A cell that is not a number, with its row and column
    """
    frame = _read_frame(path, [CsvColumns.YEAR])
    views = [c for c in frame.columns if c != CsvColumns.YEAR]
    unknown = [c for c in views if not GdpViews.is_valid(c)]
    if unknown:
        raise SchemaError(
            "Unknown view columns",
            details={"path": str(path), "columns": unknown, "allowed": GdpViews.ALL},
        )

    years: List[int] = []
    data: Dict[str, List[float]] = {view: [] for view in views}
    for index, record in enumerate(frame.to_dict(orient="records"), start=1):
        years.append(_parse_year(record[CsvColumns.YEAR], index))
        for view in views:
            data[view].append(_parse_number(record[view], index, view, allow_missing=True))

    levels = LevelTable(frame=pd.DataFrame(data, index=pd.Index(years, name=CsvColumns.YEAR)))
    report = check_identities(levels, tolerance)
    for residual in report.flagged:
        logger.warning(
            f"Identity {residual.aggregate_view} off by {residual.residual:.6g} in {residual.year}",
            extra={
                "extra_fields": {
                    "year": residual.year,
                    "aggregate_view": residual.aggregate_view,
                    "residual": residual.residual,
                }
            },
        )
    logger.info(
        f"Loaded {len(levels.years)} years x {len(levels.views)} views from {path}; "
        f"{len(report.residuals)} identity checks, {len(report.flagged)} flagged"
    )
    return levels, report


def to_growth_rates(levels: LevelTable) -> GrowthTable:
    """
    Year-over-year growth rates in percentage points, gaps filled.

    A growth value that cannot be computed because a level is missing takes
    the previous year's growth of the same view. Present values are never
    changed.

    Raises:
        GrowthRateError: Fewer than two years, a zero base level, or a gap
            in the first growth year
    """
    years = levels.years
    if len(years) < 2:
        raise GrowthRateError("Growth rates need at least two years", details={"years": years})

    growth: Dict[str, List[float]] = {}
    for view in levels.views:
        series = levels.frame[view].to_numpy(dtype=float)
        rates: List[float] = []
        for t in range(1, len(series)):
            previous, current = series[t - 1], series[t]
            if np.isnan(previous) or np.isnan(current):
                if not rates:
                    raise GrowthRateError(
                        "Cannot fill a gap in the first growth year",
                        details={"view": view, "year": years[t]},
                    )
                rates.append(rates[-1])
                continue
            if previous == 0.0:
                raise GrowthRateError(
                    "Zero base level",
                    details={"view": view, "year": f"{years[t - 1]}->{years[t]}"},
                )
            rates.append(100.0 * (current - previous) / previous)
        growth[view] = rates

    return GrowthTable(frame=pd.DataFrame(growth, index=pd.Index(years[1:], name=CsvColumns.YEAR)))


def growth_table_to_probe_set(
    growth: GrowthTable,
    truth_view: str = GdpViews.GROUND_TRUTH_VIEW,
    include_truth_view: bool = False,
) -> ProbeSet:
    """
    Turn a growth table into a probe set: one question per year.

    The ``truth_view`` column supplies the ground truths; the other views
    (and optionally the truth view itself) are the sources.

    Raises:
        SchemaError: If the truth view is not in the table
    """
    if truth_view not in growth.views:
        raise SchemaError("Truth view missing from growth table", details={"view": truth_view})
    frame = growth.frame
    questions = [
        Question(question_id=str(year), ground_truth=float(frame.loc[year, truth_view]))
        for year in growth.years
    ]
    sources = [v for v in growth.views if include_truth_view or v != truth_view]
    answers = {view: [float(x) for x in frame[view]] for view in sources}
    return ProbeSet.from_answers(questions, answers)


def question_ids(n_questions: int) -> List[str]:
    """Zero-padded question identifiers ``q01, q02, ...``."""
    width = max(2, len(str(n_questions)))
    return [f"q{i:0{width}d}" for i in range(1, n_questions + 1)]


def synthesize_gdp_views(
    seed: Optional[int],
    n_questions: int,
    growth_range: Tuple[float, float] = (
        AlgorithmDefaults.GROWTH_LOW,
        AlgorithmDefaults.GROWTH_HIGH,
    ),
    error_signs: Optional[Mapping[str, int]] = None,
    include_ground_truth_view: bool = True,
) -> Tuple[ProbeSet, List[SourceSpec]]:
    """
    Synthetic questions answered by the thirteen views with their reference errors.

    Ground truths are uniform over ``growth_range``. Each view answers
    ``truth - e`` with ``e ~ N(sign * mean_error, std**2)``; the ground-truth
    view has zero error and echoes the truth exactly.

    Args:
        seed: Seed of the generator
        n_questions: Number of questions
        growth_range: Range of the ground truths in percentage points
        error_signs: Sign per view for the mean errors (default all positive)
        include_ground_truth_view: Whether the ground-truth view answers too

    Returns:
        The probe set (known truths) and one spec per answering view
    """
    if n_questions < 1:
        raise DatasetError("n_questions must be positive", details={"n_questions": n_questions})
    low, high = growth_range
    if not high > low:
        raise DatasetError("growth range must be increasing", details={"range": growth_range})

    rng = np.random.default_rng(seed)
    truths = rng.uniform(low, high, size=n_questions)
    questions = [
        Question(question_id=qid, ground_truth=float(t))
        for qid, t in zip(question_ids(n_questions), truths)
    ]

    signs = error_signs or {}
    specs: List[SourceSpec] = []
    answers: Dict[str, List[float]] = {}
    for view in GdpViews.ALL:
        if view == GdpViews.GROUND_TRUTH_VIEW and not include_ground_truth_view:
            continue
        mean_error, std = GdpViews.ERROR_STATS[view]
        spec = SourceSpec(
            source_id=view, error_mu=signs.get(view, 1) * mean_error, error_sigma=std
        )
        specs.append(spec)
        answers[view] = [float(a) for a in honest_answers(spec, truths, rng)]

    logger.debug(f"Synthesized {n_questions} questions for {len(specs)} views (seed={seed})")
    return ProbeSet.from_answers(questions, answers), specs


def read_reports(path: Path) -> List[Report]:
    """
    Read a long-format ``question_id,source_id,value`` file.

    Raises:
        SchemaError: Missing columns
        DatasetParseError: Empty identifiers or non-numeric values
    """
    frame = _read_frame(path, CsvColumns.REPORTS)
    reports = []
    for index, record in enumerate(frame.to_dict(orient="records"), start=1):
        question_id = record[CsvColumns.QUESTION_ID].strip()
        source_id = record[CsvColumns.SOURCE_ID].strip()
        if not question_id or not source_id:
            raise DatasetParseError(
                "Empty identifier",
                row=index,
                column=CsvColumns.QUESTION_ID if not question_id else CsvColumns.SOURCE_ID,
            )
        value = _parse_number(record[CsvColumns.VALUE], index, CsvColumns.VALUE)
        reports.append(Report(source_id=source_id, question_id=question_id, answer=value))
    return reports


def read_truths(path: Path) -> List[Question]:
    """
    Read a ``question_id,truth`` file; an empty truth marks an unknown one.

    Raises:
        DatasetParseError: Duplicate questions or non-numeric truths
    """
    frame = _read_frame(path, CsvColumns.TRUTHS)
    questions: List[Question] = []
    seen = set()
    for index, record in enumerate(frame.to_dict(orient="records"), start=1):
        question_id = record[CsvColumns.QUESTION_ID].strip()
        if not question_id:
            raise DatasetParseError("Empty identifier", row=index, column=CsvColumns.QUESTION_ID)
        if question_id in seen:
            raise DatasetParseError(
                "Duplicate question", row=index, column=CsvColumns.QUESTION_ID
            )
        seen.add(question_id)
        truth = _parse_number(record[CsvColumns.TRUTH], index, CsvColumns.TRUTH, allow_missing=True)
        questions.append(
            Question(question_id=question_id, ground_truth=None if math.isnan(truth) else truth)
        )
    return questions


def read_mappings(path: Path) -> Dict[str, MappingSpec]:
    """Read ``representation_id,scale,offset`` rows into mapping specs."""
    frame = _read_frame(path, CsvColumns.MAPPINGS)
    mappings: Dict[str, MappingSpec] = {}
    for index, record in enumerate(frame.to_dict(orient="records"), start=1):
        representation_id = record[CsvColumns.REPRESENTATION_ID].strip()
        scale = _parse_number(record[CsvColumns.SCALE], index, CsvColumns.SCALE)
        offset = _parse_number(record[CsvColumns.OFFSET], index, CsvColumns.OFFSET)
        if scale == 0.0:
            raise DatasetParseError("Scale must be non-zero", row=index, column=CsvColumns.SCALE)
        if not representation_id:
            raise DatasetParseError(
                "Empty identifier", row=index, column=CsvColumns.REPRESENTATION_ID
            )
        mappings[representation_id] = MappingSpec(
            representation_id=representation_id, scale=scale, offset=offset
        )
    return mappings


def write_reports(reports: Sequence[Report], path: Path) -> Path:
    """Write reports in long format, floats in round-trip precision."""
    frame = pd.DataFrame(
        [
            {
                CsvColumns.QUESTION_ID: r.question_id,
                CsvColumns.SOURCE_ID: r.source_id,
                CsvColumns.VALUE: repr(r.answer),
            }
            for r in reports
        ],
        columns=CsvColumns.REPORTS,
    )
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return Path(path)


def write_truths(questions: Sequence[Question], path: Path) -> Path:
    """Write ``question_id,truth``; unknown truths are left empty."""
    frame = pd.DataFrame(
        [
            {
                CsvColumns.QUESTION_ID: q.question_id,
                CsvColumns.TRUTH: "" if q.ground_truth is None else repr(q.ground_truth),
            }
            for q in questions
        ],
        columns=CsvColumns.TRUTHS,
    )
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return Path(path)


class DatasetRepository:
    """File-backed access to level tables, reports and truths."""

    def __init__(self, tolerance: float = AlgorithmDefaults.IDENTITY_TOLERANCE):
        """
        Initialize Dataset Repository.

        Args:
            tolerance: Relative tolerance of the identity check
        """
        if not tolerance >= 0:
            raise DatasetError("tolerance must be non-negative", details={"tolerance": tolerance})
        self.tolerance = tolerance

    def load_levels(self, path: Path) -> Tuple[LevelTable, IdentityReport]:
        """Load and validate a level CSV."""
        return load_and_validate(path, self.tolerance)

    def load_growth(
        self, path: Path, truth_view: str = GdpViews.GROUND_TRUTH_VIEW
    ) -> ProbeSet:
        """Load levels, convert to growth rates and build a probe set."""
        levels, _ = self.load_levels(path)
        return growth_table_to_probe_set(to_growth_rates(levels), truth_view=truth_view)

    def load_reports(
        self, reports_path: Path, truths_path: Path
    ) -> Tuple[List[Report], List[Question]]:
        """Read a report file and its truths file."""
        return read_reports(reports_path), read_truths(truths_path)

    def save_probe_set(self, probes: ProbeSet, output_dir: Path) -> Tuple[Path, Path]:
        """Write a probe set as ``reports.csv`` and ``truths.csv``."""
        output_dir = Path(output_dir)
        reports_path = write_reports(probes.reports, output_dir / FilePatterns.REPORTS)
        truths_path = write_truths(probes.questions, output_dir / FilePatterns.TRUTHS)
        logger.info(f"Wrote {len(probes.reports)} reports to {reports_path}")
        return reports_path, truths_path
