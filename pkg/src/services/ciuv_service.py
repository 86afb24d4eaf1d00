"""
CIUV Service - the iterate / verify / stimulate loop.

Each iteration asks the environment for fresh answers to the probe questions
and the target question, re-estimates every source's reliability, fuses the
target's views and scores the fused confidence. The loop stops once the
confidence is acceptable, once it stops improving, or at the iteration cap.
Otherwise the sources whose own confidence still improves are stimulated;
a source that fails to improve is never stimulated again.
"""

import logging
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from src.core.exceptions import IncompleteAnswersError, ValidationError
from src.core.logging import get_logger
from src.models.fusion import TruthEstimate
from src.models.orchestration import (
    CIUVRun,
    IterationRecord,
    StopDecision,
    StopReason,
    StoppingConfig,
)
from src.models.reliability import ProbeSet, ReliabilityProfile, TruthMode
from src.models.views import Question, Report
from src.repositories.base import RespondentEnvironment
from src.services.fusion_service import confidence_vector, fuse_question
from src.services.reliability_service import estimate_profiles, sample_probes

logger = get_logger(__name__)


def should_stop(confidence_history: Sequence[float], stopping: StoppingConfig) -> StopDecision:
    """
    Apply the stopping rule to the fused confidences seen so far.

    Args:
        confidence_history: Fused confidence per iteration, oldest first
        stopping: Thresholds

    Returns:
        ``AcceptR`` when the latest confidence reaches ``R``; otherwise
        ``StallD`` when it improved by less than ``D`` over the previous one;
        otherwise ``Continue``

    Raises:
        ValidationError: If the history is empty
    """
    if len(confidence_history) == 0:
        raise ValidationError("Confidence history is empty")
    latest = confidence_history[-1]
    if latest >= stopping.R:
        return StopDecision.ACCEPT_R
    if len(confidence_history) >= 2 and latest - confidence_history[-2] < stopping.D:
        return StopDecision.STALL_D
    return StopDecision.CONTINUE


def _target_views(
    reports: Sequence[Report], source_ids: Sequence[str], target: Question
) -> List[float]:
    by_source: Dict[str, float] = {
        r.source_id: r.answer for r in reports if r.question_id == target.question_id
    }
    missing = [sid for sid in source_ids if sid not in by_source]
    if missing:
        raise IncompleteAnswersError(
            "Environment did not answer the target question for every source",
            details={"question_id": target.question_id, "missing": missing},
        )
    return [by_source[sid] for sid in source_ids]


def _default_truth_mode(probes: Sequence[Question]) -> TruthMode:
    if all(q.has_truth for q in probes):
        return TruthMode.KNOWN_TRUTH
    return TruthMode.PROXY_MEAN


def run_ciuv(
    env: RespondentEnvironment,
    probe_pool: Sequence[Question],
    target: Question,
    stopping: Optional[StoppingConfig] = None,
    seed: Optional[int] = None,
    n_probes: int = 10,
    truth_mode: Optional[TruthMode] = None,
    resample_probes: bool = False,
    priors: Optional[Mapping[str, ReliabilityProfile]] = None,
) -> CIUVRun:
    """
    Run CIUV on one target question.

    Args:
        env: Environment serving the sources' answers
        probe_pool: Questions reliability is estimated on; must not contain the target
        target: Question whose truth is sought
        stopping: Thresholds and iteration cap
        seed: Seed of the probe sampler
        n_probes: Probes per iteration (the whole pool if it is smaller)
        truth_mode: Known-truth or proxy-mean probes; inferred from the pool when None
        resample_probes: Draw a fresh probe sample every iteration instead of
            re-asking the first one
        priors: Externally supplied profiles per source; required in historical mode

    Returns:
        Final estimate, full history and stop reason

    Raises:
        ValidationError: Empty pool, target inside the pool, no sources, or
            historical mode without a prior for every source
        IncompleteAnswersError: If the environment leaves a pair unanswered
    """
    stopping = stopping or StoppingConfig()
    if not probe_pool:
        raise ValidationError("Probe pool is empty")
    if any(q.question_id == target.question_id for q in probe_pool):
        raise ValidationError(
            "Target question is part of the probe pool",
            details={"question_id": target.question_id},
        )
    source_ids = tuple(env.source_ids)
    if not source_ids:
        raise ValidationError("Environment has no sources")

    rng = np.random.default_rng(seed)
    probes = sample_probes(probe_pool, n_probes, rng)
    mode = truth_mode or _default_truth_mode(probes)
    if mode == TruthMode.HISTORICAL:
        missing = [sid for sid in source_ids if sid not in (priors or {})]
        if missing:
            raise ValidationError(
                "Historical mode requires a prior for every source",
                details={"missing": missing},
            )

    history: List[IterationRecord] = []
    confidences: List[float] = []
    prior_confidence = np.zeros(len(source_ids))
    active = set(source_ids)
    stop_reason = StopReason.MAX_ITERATIONS
    estimate: Optional[TruthEstimate] = None

    for iteration in range(stopping.max_iterations):
        if resample_probes and iteration > 0:
            probes = sample_probes(probe_pool, n_probes, rng)

        reports = env.answer(list(probes) + [target])
        probe_ids = {q.question_id for q in probes}
        probe_set = ProbeSet(
            questions=tuple(probes),
            reports=tuple(r for r in reports if r.question_id in probe_ids),
            truth_mode=mode,
            priors=priors,
        )
        if probe_set.source_ids != source_ids:
            raise IncompleteAnswersError(
                "Environment answered for an unexpected set of sources",
                details={"expected": list(source_ids), "got": list(probe_set.source_ids)},
            )

        profiles = estimate_profiles(probe_set)
        views = _target_views(reports, source_ids, target)
        estimate = fuse_question(profiles, views, stopping.e_T)
        per_source = confidence_vector(
            [p.mu for p in profiles], [p.sigma2 for p in profiles], stopping.e_T
        )
        confidences.append(estimate.confidence)

        decision = should_stop(confidences, stopping)
        last_iteration = iteration == stopping.max_iterations - 1
        stimulated = frozenset()
        if decision == StopDecision.CONTINUE and not last_iteration:
            improvement = per_source - prior_confidence
            requested = {
                sid
                for i, sid in enumerate(source_ids)
                if sid in active and improvement[i] >= stopping.D
            }
            active = requested
            stimulated = env.apply_stimulation(requested)
            prior_confidence = per_source

        record = IterationRecord(
            iteration=iteration,
            estimate=estimate,
            per_source_confidence=tuple(float(p) for p in per_source),
            stimulated=stimulated,
            cost=len(stimulated),
        )
        history.append(record)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(
                f"Iteration {iteration}: u*={estimate.u_star:.4f} "
                f"confidence={estimate.confidence:.4f} cost={record.cost}",
                extra={"extra_fields": record.to_dict()},
            )

        if decision != StopDecision.CONTINUE:
            stop_reason = StopReason(decision.value)
            break

    assert estimate is not None  # max_iterations >= 1
    return CIUVRun(estimate=estimate, history=tuple(history), stop_reason=stop_reason)


class CIUVService:
    """Runs CIUV against a respondent environment with fixed settings."""

    def __init__(
        self,
        stopping: Optional[StoppingConfig] = None,
        n_probes: int = 10,
        truth_mode: Optional[TruthMode] = None,
        resample_probes: bool = False,
        priors: Optional[Mapping[str, ReliabilityProfile]] = None,
    ):
        """
        Initialize CIUV Service.

        Args:
            stopping: Thresholds and iteration cap
            n_probes: Probes per iteration
            truth_mode: Probe truth mode; inferred per run when None
            resample_probes: Draw a fresh probe sample every iteration
            priors: Externally supplied profiles for historical mode
        """
        self.stopping = stopping or StoppingConfig()
        self.n_probes = n_probes
        self.truth_mode = truth_mode
        self.resample_probes = resample_probes
        self.priors = priors

    def run(
        self,
        env: RespondentEnvironment,
        probe_pool: Sequence[Question],
        target: Question,
        seed: Optional[int] = None,
    ) -> CIUVRun:
        """Run the loop for one target question."""
        run = run_ciuv(
            env,
            probe_pool,
            target,
            stopping=self.stopping,
            seed=seed,
            n_probes=self.n_probes,
            truth_mode=self.truth_mode,
            resample_probes=self.resample_probes,
            priors=self.priors,
        )
        logger.debug(
            f"CIUV on {target.question_id}: {run.stop_reason.value} after "
            f"{len(run.history)} iterations, cost {run.total_cost}"
        )
        return run
