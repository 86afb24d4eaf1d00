"""
Simulated respondent environment.

Honest sources answer ``truth - e`` with Gaussian errors; malicious sources
multiply their honest answer by the manipulation factor. Stimulating a source
shrinks its distance to the truth by the improvement ratio of the current
round, so the distance never grows.
"""

import math
from typing import AbstractSet, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import RespondentError, ValidationError
from src.core.logging import get_logger
from src.models.reliability import ProbeSet
from src.models.simworld import AdversaryConfig, ExponentSign, ImprovementConfig, SourceSpec
from src.models.views import Question, Report, UnifiedView
from src.repositories.base import RespondentEnvironment

logger = get_logger(__name__)


def inject_adversaries(
    specs: Sequence[SourceSpec], adv: AdversaryConfig
) -> List[SourceSpec]:
    """
    Mark ``adv.mv`` distinct sources malicious, chosen uniformly at random.

    The selection is a prefix of one seeded permutation, so for a fixed seed
    the malicious set at ``mv`` contains the set at every smaller ``mv``.

    Args:
        specs: Source specs
        adv: Adversary configuration

    Returns:
        New spec list in input order; the input itself when ``mv == 0``

    Raises:
        ValidationError: If ``mv`` exceeds the number of sources
    """
    if adv.mv > len(specs):
        raise ValidationError(
            "mv exceeds the number of sources", details={"mv": adv.mv, "sources": len(specs)}
        )
    if adv.mv == 0:
        return list(specs)
    rng = np.random.default_rng(adv.seed)
    chosen = set(int(i) for i in rng.permutation(len(specs))[: adv.mv])
    return [
        SourceSpec(
            source_id=spec.source_id,
            error_mu=spec.error_mu,
            error_sigma=spec.error_sigma,
            malicious=spec.malicious or i in chosen,
        )
        for i, spec in enumerate(specs)
    ]


def manipulate(answer: UnifiedView, mf: float) -> UnifiedView:
    """A malicious source's report of an honest answer."""
    return mf * answer


def improvement_ratio(j: int, cfg: ImprovementConfig) -> float:
    """
    Factor the distance to the truth is multiplied by at round ``j``.

    ``1 - a * exp(-if * (j + 1))`` under negative decay, ``1 - a * exp(if * (j + 1))``
    under the literal positive exponent; clamped to ``[0, 1]``.
    """
    if j < 0:
        raise ValidationError("Round index must be non-negative", details={"j": j})
    sign = -1.0 if cfg.exponent_sign == ExponentSign.NEGATIVE_DECAY else 1.0
    exponent = sign * cfg.if_factor * (j + 1)
    # exp overflows near 709; the clamp makes any larger exponent a zero ratio
    if exponent > 700:
        return 0.0
    ratio = 1.0 - cfg.a * math.exp(exponent)
    return min(1.0, max(0.0, ratio))


def respond(
    previous: UnifiedView, ground_truth: UnifiedView, j: int, cfg: ImprovementConfig
) -> UnifiedView:
    """
    New answer of a source stimulated at round ``j``.

    The answer moves toward the truth along the signed direction so that
    ``|new - truth| = ratio * |previous - truth|``.
    """
    return ground_truth + improvement_ratio(j, cfg) * (previous - ground_truth)


def honest_answers(
    spec: SourceSpec, truths: Sequence[float], rng: np.random.Generator
) -> np.ndarray:
    """
    Draw one honest answer per truth: ``truth - e`` with ``e ~ N(error_mu, error_sigma**2)``.

    A source with zero spread always answers ``truth - error_mu``.
    """
    base = np.asarray(truths, dtype=float)
    if spec.error_sigma == 0.0:
        return base - spec.error_mu
    return base - rng.normal(spec.error_mu, spec.error_sigma, size=base.size)


class SimulatedEnvironment(RespondentEnvironment):
    """
    Environment over a fixed world of honest answers.

    Each source's current answer to a question is
    ``truth + scale * (raw - truth)`` where ``raw`` is the honest answer,
    multiplied by ``mf`` for malicious sources, and ``scale`` starts at one
    and is multiplied by the improvement ratio every time the source is
    stimulated.

    By default only malicious sources respond to stimulation; honest
    statistics have nobody behind them to incentivize. ``stimulate_honest``
    lets every requested source respond.
    """

    def __init__(
        self,
        world: ProbeSet,
        specs: Sequence[SourceSpec],
        mf: float = 1.0,
        improvement: Optional[ImprovementConfig] = None,
        stimulate_honest: bool = False,
    ):
        """
        Initialize Simulated Environment.

        Args:
            world: Honest answers of every source; questions carry the ground truth
            specs: Participating sources, in order, with their malicious flags
            mf: Manipulation factor of malicious sources
            improvement: Response curve to stimulation
            stimulate_honest: Let honest sources respond to stimulation too

        Raises:
            ValidationError: If a spec has no answers in the world or a truth is missing
        """
        super().__init__()
        if not specs:
            raise ValidationError("A simulated environment needs at least one source")
        if not math.isfinite(mf) or mf <= 0:
            raise ValidationError("mf must be positive", details={"mf": mf})
        missing_truths = [q.question_id for q in world.questions if not q.has_truth]
        if missing_truths:
            raise ValidationError(
                "Simulated worlds need a ground truth for every question",
                details={"missing": missing_truths[:10]},
            )

        row_of = {sid: i for i, sid in enumerate(world.source_ids)}
        unknown = [s.source_id for s in specs if s.source_id not in row_of]
        if unknown:
            raise ValidationError(
                "Sources have no answers in the world", details={"sources": unknown}
            )

        self.specs: Tuple[SourceSpec, ...] = tuple(specs)
        self.mf = float(mf)
        self.improvement = improvement or ImprovementConfig()
        self.stimulate_honest = stimulate_honest

        self._source_ids = tuple(s.source_id for s in self.specs)
        self._column_of: Dict[str, int] = {qid: i for i, qid in enumerate(world.question_ids)}
        self._truths = np.array([q.ground_truth for q in world.questions], dtype=float)

        raw = np.array(world.answer_matrix()[[row_of[sid] for sid in self._source_ids], :])
        malicious = np.array([s.malicious for s in self.specs])
        raw[malicious] = manipulate(raw[malicious], self.mf)
        self._raw = raw
        self._responsive = frozenset(
            s.source_id for s in self.specs if s.malicious or stimulate_honest
        )
        self._scales = np.ones(len(self._source_ids))
        self._round = 0

    @property
    def source_ids(self) -> Tuple[str, ...]:
        return self._source_ids

    @property
    def malicious_ids(self) -> FrozenSet[str]:
        """Sources manipulating their answers."""
        return frozenset(s.source_id for s in self.specs if s.malicious)

    @property
    def round(self) -> int:
        """Number of stimulation rounds applied so far."""
        return self._round

    def truth_of(self, question_id: str) -> float:
        """Ground truth of a question in this world."""
        return float(self._truths[self._column(question_id)])

    def _column(self, question_id: str) -> int:
        try:
            return self._column_of[question_id]
        except KeyError as e:
            raise RespondentError(
                "Question is not part of the simulated world", details={"question_id": question_id}
            ) from e

    def current_answers(self, question_id: str) -> Dict[str, float]:
        """Every source's current answer to one question."""
        col = self._column(question_id)
        truth = self._truths[col]
        values = truth + self._scales * (self._raw[:, col] - truth)
        return {sid: float(v) for sid, v in zip(self._source_ids, values)}

    def answer(self, questions: Sequence[Question]) -> List[Report]:
        columns = [self._column(q.question_id) for q in questions]
        truths = self._truths[columns]
        values = truths[np.newaxis, :] + self._scales[:, np.newaxis] * (
            self._raw[:, columns] - truths[np.newaxis, :]
        )
        return [
            Report(source_id=sid, question_id=q.question_id, answer=float(values[i, j]))
            for i, sid in enumerate(self._source_ids)
            for j, q in enumerate(questions)
        ]

    def apply_stimulation(self, source_ids: AbstractSet[str]) -> FrozenSet[str]:
        applied = frozenset(source_ids) & self._responsive
        ratio = improvement_ratio(self._round, self.improvement)
        for i, sid in enumerate(self._source_ids):
            if sid in applied:
                self._scales[i] *= ratio
        self.logger.debug(
            f"Round {self._round}: stimulated {len(applied)} of {len(source_ids)} "
            f"requested sources (ratio {ratio:.5f})"
        )
        self._round += 1
        return applied

    def reset(self) -> None:
        self._scales = np.ones(len(self._source_ids))
        self._round = 0

    @classmethod
    def from_answers(
        cls,
        truths: Mapping[str, float],
        answers: Mapping[str, Sequence[float]],
        malicious: AbstractSet[str] = frozenset(),
        **kwargs,
    ) -> "SimulatedEnvironment":
        """
        Build an environment from plain per-source answer lists.

        Args:
            truths: Ground truth per question id, in question order
            answers: Honest answers per source, aligned with ``truths``
            malicious: Sources to mark malicious
            **kwargs: Forwarded to the constructor

        Returns:
            SimulatedEnvironment instance
        """
        questions = [Question(question_id=qid, ground_truth=t) for qid, t in truths.items()]
        world = ProbeSet.from_answers(questions, answers)
        specs = [
            SourceSpec(source_id=sid, error_mu=0.0, error_sigma=0.0, malicious=sid in malicious)
            for sid in answers
        ]
        return cls(world=world, specs=specs, **kwargs)
