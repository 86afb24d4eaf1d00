"""
Reliability types: per-source Gaussian error models and probe sets.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import IncompleteAnswersError, ValidationError
from src.models.views import Question, Report


class TruthMode(str, Enum):
    """Where the per-question truth used for error samples comes from."""

    KNOWN_TRUTH = "known_truth"
    PROXY_MEAN = "proxy_mean"
    HISTORICAL = "historical"


@dataclass(frozen=True)
class ReliabilityProfile:
    """
    Gaussian error model of one source.

    Attributes:
        source_id: Source the profile describes
        mu: Mean error (truth minus answer), unified units
        sigma2: Error variance
        sample_count: Number of probe questions the estimate is based on
    """

    source_id: str
    mu: float
    sigma2: float
    sample_count: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma2)):
            raise ValidationError(
                "Profile parameters must be finite",
                details={"source_id": self.source_id, "mu": self.mu, "sigma2": self.sigma2},
            )
        if self.sigma2 < 0:
            raise ValidationError(
                "sigma2 must be non-negative",
                details={"source_id": self.source_id, "sigma2": self.sigma2},
            )
        if self.sample_count < 1:
            raise ValidationError(
                "sample_count must be at least 1",
                details={"source_id": self.source_id},
            )

    @property
    def sigma(self) -> float:
        """Error standard deviation."""
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class ProbeSet:
    """
    Probe questions and the complete answer matrix over them.

    Sources are ordered by their first appearance in ``reports``; that order
    is the index order of every vector derived from the probe set.
    """

    questions: Tuple[Question, ...]
    reports: Tuple[Report, ...]
    truth_mode: TruthMode = TruthMode.KNOWN_TRUTH
    priors: Optional[Mapping[str, ReliabilityProfile]] = None
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)
    _source_ids: Tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "questions", tuple(self.questions))
        object.__setattr__(self, "reports", tuple(self.reports))

        if not self.questions:
            raise ValidationError("A probe set needs at least one question")

        question_index: Dict[str, int] = {}
        for question in self.questions:
            if question.question_id in question_index:
                raise ValidationError(
                    "Duplicate question identifier",
                    details={"question_id": question.question_id},
                )
            question_index[question.question_id] = len(question_index)

        if self.truth_mode == TruthMode.KNOWN_TRUTH:
            missing = [q.question_id for q in self.questions if not q.has_truth]
            if missing:
                raise ValidationError(
                    "KnownTruth mode requires a ground truth for every question",
                    details={"missing": missing},
                )

        source_index: Dict[str, int] = {}
        for report in self.reports:
            if report.source_id not in source_index:
                source_index[report.source_id] = len(source_index)
        if not source_index:
            raise IncompleteAnswersError("A probe set needs at least one report")

        matrix = np.full((len(source_index), len(question_index)), np.nan)
        for report in self.reports:
            if report.question_id not in question_index:
                raise ValidationError(
                    "Report refers to a question outside the probe set",
                    details={"source_id": report.source_id, "question_id": report.question_id},
                )
            row = source_index[report.source_id]
            col = question_index[report.question_id]
            if not np.isnan(matrix[row, col]):
                raise ValidationError(
                    "Duplicate report for a (source, question) pair",
                    details={"source_id": report.source_id, "question_id": report.question_id},
                )
            matrix[row, col] = report.answer

        if np.isnan(matrix).any():
            rows, cols = np.nonzero(np.isnan(matrix))
            source_ids = list(source_index)
            question_ids = list(question_index)
            gaps = [f"{source_ids[r]}/{question_ids[c]}" for r, c in zip(rows, cols)]
            raise IncompleteAnswersError(
                "Answer matrix is incomplete",
                details={"missing_pairs": gaps[:10], "missing_count": len(gaps)},
            )

        if self.truth_mode == TruthMode.HISTORICAL:
            priors = self.priors or {}
            missing_priors = [sid for sid in source_index if sid not in priors]
            if missing_priors:
                raise ValidationError(
                    "Historical mode requires a prior for every source",
                    details={"missing": missing_priors},
                )

        matrix.setflags(write=False)
        object.__setattr__(self, "_matrix", matrix)
        object.__setattr__(self, "_source_ids", tuple(source_index))

    @property
    def source_ids(self) -> Tuple[str, ...]:
        """Sources in index order."""
        return self._source_ids

    @property
    def question_ids(self) -> Tuple[str, ...]:
        """Questions in index order."""
        return tuple(q.question_id for q in self.questions)

    def answer_matrix(self) -> np.ndarray:
        """Read-only (sources x questions) matrix of answers."""
        return self._matrix

    def ground_truths(self) -> List[Optional[float]]:
        """Ground truth per question, ``None`` where unknown."""
        return [q.ground_truth for q in self.questions]

    @classmethod
    def from_answers(
        cls,
        questions: Sequence[Question],
        answers: Mapping[str, Sequence[float]],
        truth_mode: TruthMode = TruthMode.KNOWN_TRUTH,
    ) -> "ProbeSet":
        """
        Build a probe set from per-source answer lists aligned with ``questions``.

        Args:
            questions: Probe questions
            answers: Mapping of source id to its answers, one per question
            truth_mode: Truth mode of the resulting probe set

        Returns:
            ProbeSet instance
        """
        reports = [
            Report(source_id=source_id, question_id=question.question_id, answer=value)
            for source_id, values in answers.items()
            for question, value in zip(questions, values, strict=True)
        ]
        return cls(questions=tuple(questions), reports=tuple(reports), truth_mode=truth_mode)
