"""
Environment replaying a fixed report set.

Used for real data (``ciuv fuse``) and for checking the stall rule: sources
never change their answers, so stimulation has no effect.
"""

from typing import AbstractSet, Dict, FrozenSet, List, Sequence, Tuple

from src.core.exceptions import IncompleteAnswersError, ValidationError
from src.models.views import Question, Report
from src.repositories.base import RespondentEnvironment


class StaticEnvironment(RespondentEnvironment):
    """Answers from a fixed ``(source, question) -> answer`` table."""

    def __init__(self, reports: Sequence[Report]):
        """
        Initialize Static Environment.

        Args:
            reports: Every report the environment can serve

        Raises:
            ValidationError: If the set is empty or a pair is reported twice
        """
        super().__init__()
        if not reports:
            raise ValidationError("A static environment needs at least one report")
        table: Dict[Tuple[str, str], Report] = {}
        order: Dict[str, None] = {}
        for report in reports:
            key = (report.source_id, report.question_id)
            if key in table:
                raise ValidationError(
                    "Duplicate report for a (source, question) pair",
                    details={"source_id": report.source_id, "question_id": report.question_id},
                )
            table[key] = report
            order.setdefault(report.source_id, None)
        self._table = table
        self._source_ids = tuple(order)

    @property
    def source_ids(self) -> Tuple[str, ...]:
        return self._source_ids

    def answer(self, questions: Sequence[Question]) -> List[Report]:
        reports = []
        missing = []
        for source_id in self._source_ids:
            for question in questions:
                report = self._table.get((source_id, question.question_id))
                if report is None:
                    missing.append(f"{source_id}/{question.question_id}")
                else:
                    reports.append(report)
        if missing:
            raise IncompleteAnswersError(
                "Environment has no answer for some pairs",
                details={"missing_pairs": missing[:10], "missing_count": len(missing)},
            )
        return reports

    def apply_stimulation(self, source_ids: AbstractSet[str]) -> FrozenSet[str]:
        if source_ids:
            self.logger.debug(f"Ignoring stimulation of {len(source_ids)} sources")
        return frozenset()
