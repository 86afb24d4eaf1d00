"""
Reliability Service - stage one of CIUV.

Estimates each source's Gaussian error model from its answers to probe
questions. Error samples are ``truth - answer``; the truth of a probe is its
ground truth, the cross-source mean of its answers, or (in historical mode)
not needed at all because externally supplied priors are returned as is.
"""

from typing import List, Sequence

import numpy as np

from src.core.exceptions import ValidationError
from src.core.logging import get_logger
from src.models.reliability import ProbeSet, ReliabilityProfile, TruthMode
from src.models.views import Question, UnifiedView

logger = get_logger(__name__)


def proxy_truth(answers_for_question: Sequence[UnifiedView]) -> UnifiedView:
    """
    Stand-in truth of a question whose ground truth is unknown.

    Args:
        answers_for_question: Every source's answer to the question

    Returns:
        Arithmetic mean of the answers

    Raises:
        ValidationError: If there are no answers
    """
    if len(answers_for_question) == 0:
        raise ValidationError("proxy_truth needs at least one answer")
    return float(np.mean(np.asarray(answers_for_question, dtype=float)))


def _reference_truths(probes: ProbeSet, matrix: np.ndarray) -> np.ndarray:
    if probes.truth_mode == TruthMode.KNOWN_TRUTH:
        return np.asarray(probes.ground_truths(), dtype=float)
    return np.array([proxy_truth(matrix[:, col]) for col in range(matrix.shape[1])])


def estimate_profiles(probes: ProbeSet) -> List[ReliabilityProfile]:
    """
    Estimate ``(mu, sigma2)`` for every source of a probe set.

    ``mu`` is the mean error sample; ``sigma2`` is the population variance of
    the samples around ``mu``.

    Args:
        probes: Probe questions with a complete answer matrix

    Returns:
        One profile per source, in the probe set's source order
    """
    if probes.truth_mode == TruthMode.HISTORICAL:
        priors = probes.priors or {}
        return [priors[source_id] for source_id in probes.source_ids]

    matrix = probes.answer_matrix()
    truths = _reference_truths(probes, matrix)
    samples = truths[np.newaxis, :] - matrix
    mus = samples.mean(axis=1)
    sigma2s = ((samples - mus[:, np.newaxis]) ** 2).mean(axis=1)
    count = matrix.shape[1]

    return [
        ReliabilityProfile(
            source_id=source_id, mu=float(mu), sigma2=float(sigma2), sample_count=count
        )
        for source_id, mu, sigma2 in zip(probes.source_ids, mus, sigma2s)
    ]


def sample_probes(
    pool: Sequence[Question], n: int, rng: np.random.Generator
) -> List[Question]:
    """
    Draw ``n`` probe questions uniformly without replacement.

    When the pool holds fewer than ``n`` questions the whole pool is used.

    Args:
        pool: Candidate probe questions
        n: Requested number of probes
        rng: Seeded generator

    Returns:
        Selected questions in draw order

    Raises:
        ValidationError: If the pool is empty or ``n`` is not positive
    """
    if not pool:
        raise ValidationError("Probe pool is empty")
    if n < 1:
        raise ValidationError("Probe count must be positive", details={"n": n})
    if n > len(pool):
        logger.warning(
            f"Requested {n} probe questions but the pool holds {len(pool)}; using all of them"
        )
        n = len(pool)
    picks = rng.choice(len(pool), size=n, replace=False)
    return [pool[int(i)] for i in picks]
