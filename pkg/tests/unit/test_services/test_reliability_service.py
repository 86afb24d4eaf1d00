"""
Unit tests for the reliability stage.
"""

import numpy as np
import pytest

from src.core.exceptions import IncompleteAnswersError, ValidationError
from src.models.reliability import ProbeSet, ReliabilityProfile, TruthMode
from src.models.views import Question, Report
from src.services.reliability_service import (
    estimate_profiles,
    proxy_truth,
    sample_probes,
)


class TestProxyTruth:
    """Test cases for proxy_truth."""

    @pytest.mark.parametrize(
        "answers, expected", [([4.0, 6.0], 5.0), ([7.0], 7.0), ([1.0, 2.0, 3.0, 4.0], 2.5)]
    )
    def test_mean(self, answers, expected):
        """Test that the proxy is the mean answer."""
        assert proxy_truth(answers) == expected

    def test_empty(self):
        """Test that an empty answer list is rejected."""
        with pytest.raises(ValidationError):
            proxy_truth([])


class TestEstimateProfiles:
    """Test cases for estimate_profiles."""

    def test_constant_error(self, simple_probe_set):
        """Test a source with a constant offset and one echoing the truth."""
        a, b = estimate_profiles(simple_probe_set)
        assert (a.source_id, a.mu, a.sigma2) == ("A", 1.0, 0.0)
        assert (b.source_id, b.mu, b.sigma2) == ("B", 0.0, 0.0)
        assert a.sample_count == 3

    def test_population_variance(self):
        """Test mean and variance of mixed-sign error samples."""
        questions = [
            Question(question_id="q1", ground_truth=10.0),
            Question(question_id="q2", ground_truth=20.0),
        ]
        probes = ProbeSet.from_answers(questions, {"A": [9.0, 22.0]})
        (profile,) = estimate_profiles(probes)
        assert profile.mu == pytest.approx(-0.5)
        assert profile.sigma2 == pytest.approx(2.25)

    def test_proxy_mean_mode(self):
        """Test that the cross-source mean stands in for unknown truths."""
        questions = [Question(question_id="q1"), Question(question_id="q2")]
        probes = ProbeSet.from_answers(
            questions, {"A": [9.0, 19.0], "B": [11.0, 21.0]}, truth_mode=TruthMode.PROXY_MEAN
        )
        a, b = estimate_profiles(probes)
        assert (a.mu, a.sigma2) == (1.0, 0.0)
        assert (b.mu, b.sigma2) == (-1.0, 0.0)

    def test_historical_mode_returns_priors(self, known_truth_questions):
        """Test that historical priors are returned untouched."""
        prior = ReliabilityProfile(source_id="A", mu=0.3, sigma2=1.7, sample_count=10)
        reports = tuple(
            Report(source_id="A", question_id=q.question_id, answer=0.0)
            for q in known_truth_questions
        )
        probes = ProbeSet(
            questions=tuple(known_truth_questions),
            reports=reports,
            truth_mode=TruthMode.HISTORICAL,
            priors={"A": prior},
        )
        assert estimate_profiles(probes) == [prior]

    def test_incomplete_answers(self, known_truth_questions):
        """Test that gaps in the answer matrix are rejected."""
        reports = (
            Report(source_id="A", question_id="q1", answer=1.0),
            Report(source_id="B", question_id="q1", answer=1.0),
            Report(source_id="B", question_id="q2", answer=1.0),
        )
        with pytest.raises(IncompleteAnswersError):
            estimate_profiles(
                ProbeSet(questions=tuple(known_truth_questions[:2]), reports=reports)
            )


class TestSampleProbes:
    """Test cases for sample_probes."""

    def test_without_replacement(self, rng):
        """Test that draws are distinct and come from the pool."""
        pool = [Question(question_id=f"q{i}", ground_truth=float(i)) for i in range(20)]
        picks = sample_probes(pool, 10, rng)
        assert len({q.question_id for q in picks}) == 10
        assert all(q in pool for q in picks)

    def test_deterministic(self):
        """Test that a seed fixes the draw."""
        pool = [Question(question_id=f"q{i}") for i in range(20)]
        first = sample_probes(pool, 5, np.random.default_rng(3))
        second = sample_probes(pool, 5, np.random.default_rng(3))
        assert first == second

    def test_small_pool_uses_everything(self, rng, caplog):
        """Test that a pool smaller than n is used whole, with a warning."""
        pool = [Question(question_id="q1"), Question(question_id="q2")]
        picks = sample_probes(pool, 10, rng)
        assert sorted(q.question_id for q in picks) == ["q1", "q2"]
        assert "using all of them" in caplog.text

    @pytest.mark.parametrize("n", [0, -1])
    def test_invalid_count(self, rng, n):
        """Test that n must be positive."""
        with pytest.raises(ValidationError):
            sample_probes([Question(question_id="q1")], n, rng)

    def test_empty_pool(self, rng):
        """Test that an empty pool is rejected."""
        with pytest.raises(ValidationError):
            sample_probes([], 3, rng)



def _random_probe_set(rng, truth_mode=TruthMode.KNOWN_TRUTH, shift=None):
    n = int(rng.integers(2, 12))
    m = int(rng.integers(1, 9))
    truths = rng.uniform(-50, 50, size=n)
    questions = [
        Question(
            question_id=f"q{j}",
            ground_truth=float(truths[j]) if truth_mode == TruthMode.KNOWN_TRUTH else None,
        )
        for j in range(n)
    ]
    answers = {
        f"s{i}": [float(t - rng.normal(rng.normal(0, 3), rng.uniform(0.1, 4))) for t in truths]
        for i in range(m)
    }
    return questions, answers


class TestProfileProperties:
    """Seeded property loops over random answer matrices."""

    def test_shift_moves_mu_only(self, rng):
        """Test that shifting one source's answers by c moves its mu by -c."""
        for _ in range(200):
            questions, answers = _random_probe_set(rng)
            c = float(rng.uniform(-10, 10))
            shifted = dict(answers)
            shifted["s0"] = [a + c for a in answers["s0"]]
            before = estimate_profiles(ProbeSet.from_answers(questions, answers))
            after = estimate_profiles(ProbeSet.from_answers(questions, shifted))
            assert after[0].mu == pytest.approx(before[0].mu - c, rel=1e-12, abs=1e-9)
            assert after[0].sigma2 == pytest.approx(before[0].sigma2, rel=1e-9, abs=1e-9)
            assert after[1:] == before[1:]

    def test_sigma2_matches_brute_force(self, rng):
        """Test sigma2 against the mean squared deviation computed term by term."""
        for _ in range(200):
            questions, answers = _random_probe_set(rng)
            profiles = estimate_profiles(ProbeSet.from_answers(questions, answers))
            for profile in profiles:
                errors = [
                    q.ground_truth - a for q, a in zip(questions, answers[profile.source_id])
                ]
                mu = sum(errors) / len(errors)
                sigma2 = sum((e - mu) ** 2 for e in errors) / len(errors)
                assert profile.mu == pytest.approx(mu, rel=1e-12, abs=1e-12)
                assert profile.sigma2 == pytest.approx(sigma2, rel=1e-12, abs=1e-12)

    def test_proxy_mean_errors_cancel(self, rng):
        """Test that mu averaged over sources is zero against the cross-source mean."""
        for _ in range(200):
            questions, answers = _random_probe_set(rng, truth_mode=TruthMode.PROXY_MEAN)
            probes = ProbeSet.from_answers(questions, answers, truth_mode=TruthMode.PROXY_MEAN)
            mus = [p.mu for p in estimate_profiles(probes)]
            scale = max(abs(a) for row in answers.values() for a in row)
            assert abs(sum(mus) / len(mus)) <= 1e-12 * scale
