"""
Fusion Service - stage two of CIUV.

Turns reliability profiles into weights, fuses the views of one question and
scores the confidence ``P(|e*| < e_T)`` of the fused view.

Weights favour sources with a small mean error (``weights_mu``) and, separately,
a small error variance (``weights_sigma``); the two are combined by taking the
element-wise minimum and renormalizing.
"""

import math
from typing import Sequence, Tuple

import numpy as np
from scipy.special import ndtr

from src.core.constants import AlgorithmDefaults
from src.core.exceptions import ValidationError
from src.models.fusion import TruthEstimate, WeightAssignment
from src.models.reliability import ReliabilityProfile
from src.models.views import UnifiedView, ensure_finite


def _inverse_proportional(values: np.ndarray) -> WeightAssignment:
    """
    Weights proportional to ``prod_{k != i} |x_k|``.

    Dividing that product by ``prod_k |x_k|`` gives weights proportional to
    ``1 / |x_i|``; scaling by ``min |x|`` keeps every ratio in ``(0, 1]`` so
    nothing overflows. Zero entries share all the weight.
    """
    magnitudes = np.abs(np.asarray(values, dtype=float))
    if magnitudes.size == 0:
        raise ValidationError("At least one profile is required")

    zeros = magnitudes == 0.0
    if zeros.any():
        weights = zeros.astype(float) / float(zeros.sum())
        return WeightAssignment.from_array(weights)

    ratios = magnitudes.min() / magnitudes
    return WeightAssignment.from_array(ratios / ratios.sum())


def weights_mu(profiles: Sequence[ReliabilityProfile]) -> WeightAssignment:
    """
    Weights from mean errors: ``w_i`` proportional to ``1 / |mu_i|``.

    Args:
        profiles: Source profiles

    Returns:
        Simplex weights in profile order
    """
    return _inverse_proportional(np.array([p.mu for p in profiles], dtype=float))


def weights_sigma(profiles: Sequence[ReliabilityProfile]) -> WeightAssignment:
    """
    Weights from error variances: ``w_i`` proportional to ``1 / sigma2_i``.

    This is the closed-form minimizer of the fused variance ``sum w_i^2 sigma2_i``
    over the simplex.
    """
    return _inverse_proportional(np.array([p.sigma2 for p in profiles], dtype=float))


def combine_weights(w_mu: WeightAssignment, w_sigma: WeightAssignment) -> WeightAssignment:
    """
    Combine the two weight vectors by element-wise minimum, renormalized.

    Args:
        w_mu: Weights from mean errors
        w_sigma: Weights from variances

    Returns:
        Combined simplex weights; uniform when every minimum is zero

    Raises:
        ValidationError: If the vectors differ in length
    """
    if len(w_mu) != len(w_sigma):
        raise ValidationError(
            "Weight vectors differ in length",
            details={"w_mu": len(w_mu), "w_sigma": len(w_sigma)},
        )
    minima = np.minimum(w_mu.as_array(), w_sigma.as_array())
    total = minima.sum()
    if total == 0.0:
        return WeightAssignment.uniform(len(w_mu))
    return WeightAssignment.from_array(minima / total)


def assign_weights(profiles: Sequence[ReliabilityProfile]) -> WeightAssignment:
    """The CIUV weight assignment for a list of profiles."""
    return combine_weights(weights_mu(profiles), weights_sigma(profiles))


def mean_view(views: Sequence[UnifiedView]) -> UnifiedView:
    """
    Arithmetic mean kept inside ``[min, max]`` of the views.

    Shared by the Mean baseline and uniform-weight fusion so both produce the
    same bits.
    """
    values = np.asarray(views, dtype=float)
    if values.size == 0:
        raise ValidationError("At least one view is required")
    return float(np.clip(np.mean(values), values.min(), values.max()))


def fuse(views: Sequence[UnifiedView], w: WeightAssignment) -> UnifiedView:
    """
    Fused view ``sum w_i u_i``.

    Args:
        views: One view per source
        w: Weights in the same order

    Returns:
        The convex combination, clamped into ``[min(views), max(views)]``

    Raises:
        ValidationError: If lengths differ
    """
    values = np.asarray(views, dtype=float)
    if values.size != len(w):
        raise ValidationError(
            "Views and weights differ in length",
            details={"views": int(values.size), "weights": len(w)},
        )
    for value in values:
        ensure_finite(value, "view")
    weights = w.as_array()
    if np.all(weights == weights[0]):
        return mean_view(values)
    return float(np.clip(np.dot(weights, values), values.min(), values.max()))


def fused_error_params(
    profiles: Sequence[ReliabilityProfile], w: WeightAssignment
) -> Tuple[float, float]:
    """
    Gaussian parameters of the fused error.

    Returns:
        ``(sum w_i mu_i, sum w_i^2 sigma2_i)``

    Raises:
        ValidationError: If lengths differ
    """
    if len(profiles) != len(w):
        raise ValidationError(
            "Profiles and weights differ in length",
            details={"profiles": len(profiles), "weights": len(w)},
        )
    weights = w.as_array()
    mus = np.array([p.mu for p in profiles], dtype=float)
    sigma2s = np.array([p.sigma2 for p in profiles], dtype=float)
    return float(np.dot(weights, mus)), float(np.dot(weights**2, sigma2s))


def _check_threshold(e_T: float) -> float:
    if not math.isfinite(e_T) or e_T <= 0:
        raise ValidationError("e_T must be positive", details={"e_T": e_T})
    return float(e_T)


def confidence(mu_star: float, sigma2_star: float, e_T: float) -> float:
    """
    Probability that a Gaussian error ``N(mu_star, sigma2_star)`` lies in ``(-e_T, e_T)``.

    A zero variance is a point mass at ``mu_star``.

    Raises:
        ValidationError: If ``e_T <= 0`` or ``sigma2_star < 0``
    """
    e_T = _check_threshold(e_T)
    if sigma2_star < 0:
        raise ValidationError(
            "sigma2_star must be non-negative", details={"sigma2_star": sigma2_star}
        )
    if sigma2_star == 0.0:
        return 1.0 if abs(mu_star) < e_T else 0.0
    sigma = math.sqrt(sigma2_star)
    probability = float(ndtr((e_T - mu_star) / sigma) - ndtr((-e_T - mu_star) / sigma))
    return min(1.0, max(0.0, probability))


def confidence_vector(
    mus: Sequence[float], sigma2s: Sequence[float], e_T: float
) -> np.ndarray:
    """
    Per-source confidence, each source taken alone (weight one on itself).

    Args:
        mus: Mean errors
        sigma2s: Error variances
        e_T: Error window half-width

    Returns:
        Array of probabilities in input order
    """
    e_T = _check_threshold(e_T)
    mu = np.asarray(mus, dtype=float)
    var = np.asarray(sigma2s, dtype=float)
    if mu.shape != var.shape:
        raise ValidationError("mus and sigma2s differ in shape")
    if np.any(var < 0):
        raise ValidationError("Variances must be non-negative")

    point_mass = var == 0.0
    sigma = np.sqrt(np.where(point_mass, 1.0, var))
    spread = ndtr((e_T - mu) / sigma) - ndtr((-e_T - mu) / sigma)
    exact = (np.abs(mu) < e_T).astype(float)
    return np.clip(np.where(point_mass, exact, spread), 0.0, 1.0)


def worst_case_bound(views: Sequence[UnifiedView]) -> float:
    """
    Largest possible distance between the truth and the fused view: ``max |u_i|``.

    Raises:
        ValidationError: If there are no views
    """
    values = np.asarray(views, dtype=float)
    if values.size == 0:
        raise ValidationError("worst_case_bound needs at least one view")
    return float(np.max(np.abs(values)))


def fuse_question(
    profiles: Sequence[ReliabilityProfile],
    views: Sequence[UnifiedView],
    e_T: float = AlgorithmDefaults.ERROR_THRESHOLD,
) -> TruthEstimate:
    """
    Run stage two end to end for one question.

    Args:
        profiles: One profile per source
        views: The sources' answers to the question, same order
        e_T: Error window half-width

    Returns:
        The fused estimate with its error model and confidence
    """
    if len(profiles) != len(views):
        raise ValidationError(
            "Profiles and views differ in length",
            details={"profiles": len(profiles), "views": len(views)},
        )
    w = assign_weights(profiles)
    u_star = fuse(views, w)
    mu_star, sigma2_star = fused_error_params(profiles, w)
    return TruthEstimate(
        u_star=u_star,
        mu_star=mu_star,
        sigma2_star=sigma2_star,
        confidence=confidence(mu_star, sigma2_star, e_T),
        weights=w,
        source_ids=tuple(p.source_id for p in profiles),
    )
