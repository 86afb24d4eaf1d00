"""
Unit tests for the iterate / verify / stimulate loop.
"""

import logging

import pytest

from src.core.exceptions import IncompleteAnswersError, ValidationError
from src.models.orchestration import IterationRecord, StopDecision, StopReason, StoppingConfig
from src.models.reliability import ReliabilityProfile, TruthMode
from src.models.simworld import AdversaryConfig, ImprovementConfig
from src.models.views import Question
from src.repositories.dataset_repository import question_ids, synthesize_gdp_views
from src.repositories.simulated_environment import SimulatedEnvironment, inject_adversaries
from src.repositories.static_environment import StaticEnvironment
from src.services.ciuv_service import CIUVService, run_ciuv, should_stop
from tests.conftest import make_reports


def _gdp_env(seed: int = 5, mv: int = 3, **kwargs) -> SimulatedEnvironment:
    world, specs = synthesize_gdp_views(seed, 12, include_ground_truth_view=False)
    specs = inject_adversaries(specs, AdversaryConfig(mv=mv, seed=seed))
    return SimulatedEnvironment(world=world, specs=specs, mf=1.2, **kwargs)


def _target_and_pool(env: SimulatedEnvironment):
    questions = [
        Question(question_id=qid, ground_truth=env.truth_of(qid))
        for qid in (f"q{i:02d}" for i in range(1, 13))
    ]
    return questions[0], questions[1:]


class TestShouldStop:
    """Test cases for should_stop."""

    def test_accept(self):
        """Test acceptance once the confidence reaches R."""
        assert should_stop([0.85, 0.92], StoppingConfig(R=0.9)) == StopDecision.ACCEPT_R

    def test_stall(self):
        """Test the stall rule."""
        decision = should_stop([0.50, 0.505], StoppingConfig(R=0.9, D=0.01))
        assert decision == StopDecision.STALL_D

    def test_continue(self):
        """Test continuing while the confidence improves."""
        assert should_stop([0.5, 0.6], StoppingConfig(R=0.9, D=0.01)) == StopDecision.CONTINUE

    def test_first_iteration_never_stalls(self):
        """Test that a single entry can only accept or continue."""
        assert should_stop([0.0], StoppingConfig(D=0.5)) == StopDecision.CONTINUE

    def test_empty_history(self):
        """Test that an empty history is rejected."""
        with pytest.raises(ValidationError):
            should_stop([], StoppingConfig())


class TestRunCIUV:
    """Test cases for run_ciuv."""

    def test_perfect_source_accepts_immediately(self, known_truth_questions):
        """Test that a source echoing the truth is accepted on the first iteration."""
        target = Question(question_id="t", ground_truth=42.0)
        answers = {q.question_id: q.ground_truth for q in known_truth_questions}
        answers["t"] = 42.0
        env = StaticEnvironment(make_reports({"oracle": answers}))
        run = run_ciuv(env, known_truth_questions, target, seed=1)
        assert run.stop_reason == StopReason.ACCEPT_R
        assert len(run.history) == 1
        assert run.estimate.u_star == 42.0
        assert run.estimate.confidence == 1.0

    def test_static_sources_stall(self, known_truth_questions):
        """Test that sources that never change stop on the stall rule."""
        answers = {
            "A": {"q1": 12.0, "q2": 19.0, "q3": 33.0, "t": 5.0},
            "B": {"q1": 7.0, "q2": 23.0, "q3": 28.0, "t": 6.0},
        }
        env = StaticEnvironment(make_reports(answers))
        run = run_ciuv(env, known_truth_questions, Question(question_id="t"), seed=1)
        assert run.stop_reason == StopReason.STALL_D
        assert len(run.history) == 2
        assert run.confidences[0] == run.confidences[1]
        assert run.total_cost == 0

    def test_noisy_source_gets_no_weight(self, small_world_env):
        """Test that two constant-bias sources outweigh a noisy manipulated one."""
        questions = [
            Question(question_id=f"q{i}", ground_truth=small_world_env.truth_of(f"q{i}"))
            for i in range(1, 6)
        ]
        run = run_ciuv(small_world_env, questions[1:], questions[0], seed=0, n_probes=4)
        weights = run.estimate.weights.weights
        assert run.stop_reason == StopReason.ACCEPT_R
        assert weights[2] == 0.0
        assert weights[0] == pytest.approx(23 / 39)
        assert run.estimate.mu_star == pytest.approx(-0.5 / 39)
        assert run.estimate.u_star == pytest.approx(5.0 + 0.5 / 39)

    def test_target_in_pool_rejected(self, known_truth_questions):
        """Test that probes and target must be disjoint."""
        env = StaticEnvironment(make_reports({"A": {"q1": 1.0, "q2": 2.0, "q3": 3.0}}))
        with pytest.raises(ValidationError):
            run_ciuv(env, known_truth_questions, known_truth_questions[0])

    def test_empty_pool_rejected(self):
        """Test that an empty probe pool is rejected."""
        env = StaticEnvironment(make_reports({"A": {"t": 1.0}}))
        with pytest.raises(ValidationError):
            run_ciuv(env, [], Question(question_id="t"))

    def test_incomplete_environment(self, known_truth_questions):
        """Test that a missing answer surfaces as an incompleteness error."""
        answers = {"A": {"q1": 1.0, "q2": 2.0, "q3": 3.0}, "B": {"q1": 1.0, "q2": 2.0}}
        env = StaticEnvironment(make_reports(answers))
        with pytest.raises(IncompleteAnswersError):
            run_ciuv(env, known_truth_questions[:2], known_truth_questions[2])

    def test_proxy_mode_inferred(self):
        """Test that probes without truth fall back to the proxy mean."""
        answers = {
            "A": {"p1": 10.0, "p2": 20.0, "t": 15.0},
            "B": {"p1": 10.0, "p2": 20.0, "t": 15.0},
        }
        env = StaticEnvironment(make_reports(answers))
        pool = [Question(question_id="p1"), Question(question_id="p2")]
        run = run_ciuv(env, pool, Question(question_id="t"), seed=0)
        assert run.estimate.u_star == 15.0
        assert run.stop_reason == StopReason.ACCEPT_R

    def test_iteration_cap(self):
        """Test that the loop never exceeds max_iterations."""
        env = _gdp_env()
        target, pool = _target_and_pool(env)
        stopping = StoppingConfig(R=1.0, D=0.0, max_iterations=4)
        run = run_ciuv(env, pool, target, stopping=stopping, seed=3, n_probes=5)
        assert len(run.history) <= 4
        assert [r.iteration for r in run.history] == list(range(len(run.history)))
        if len(run.history) == 4:
            assert run.stop_reason == StopReason.MAX_ITERATIONS
            assert run.history[-1].cost == 0

    def test_stimulation_set_only_shrinks(self):
        """Test that a source dropped from stimulation is never stimulated again."""
        env = _gdp_env(stimulate_honest=True)
        target, pool = _target_and_pool(env)
        stopping = StoppingConfig(R=0.999, D=0.0001, max_iterations=15)
        run = run_ciuv(env, pool, target, stopping=stopping, seed=7, n_probes=8)
        for earlier, later in zip(run.history, run.history[1:]):
            assert later.stimulated <= earlier.stimulated
        assert all(r.cost == len(r.stimulated) for r in run.history)

    def test_only_malicious_sources_respond_by_default(self):
        """Test that applied stimulations land on malicious sources only."""
        env = _gdp_env()
        target, pool = _target_and_pool(env)
        run = run_ciuv(env, pool, target, stopping=StoppingConfig(R=0.999), seed=2, n_probes=8)
        for record in run.history:
            assert record.stimulated <= env.malicious_ids

    def test_iteration_record_serialized_only_for_debug(self, mocker, caplog):
        """Test that records are turned into dicts only when debug logging is on."""
        to_dict = mocker.patch.object(IterationRecord, "to_dict", return_value={})
        env = _gdp_env()
        target, pool = _target_and_pool(env)
        stopping = StoppingConfig(R=0.999, D=0.0, max_iterations=3)
        caplog.set_level(logging.INFO, logger="src.services.ciuv_service")
        with env:
            run_ciuv(env, pool, target, stopping=stopping, seed=1, n_probes=6)
        to_dict.assert_not_called()
        caplog.set_level(logging.DEBUG, logger="src.services.ciuv_service")
        with env:
            run = run_ciuv(env, pool, target, stopping=stopping, seed=1, n_probes=6)
        assert to_dict.call_count == len(run.history)

    def test_deterministic(self):
        """Test that the same seed and environment replay the same history."""
        env = _gdp_env()
        target, pool = _target_and_pool(env)
        stopping = StoppingConfig(R=0.999, max_iterations=8)
        with env:
            first = run_ciuv(env, pool, target, stopping=stopping, seed=11, n_probes=6)
        with env:
            second = run_ciuv(env, pool, target, stopping=stopping, seed=11, n_probes=6)
        assert first.history == second.history
        assert first.stop_reason == second.stop_reason


class TestSimulatedTrajectories:
    """Seeded runs against the simulated GDP-view world."""

    @pytest.mark.parametrize("seed", range(20))
    def test_fused_error_never_increases(self, seed):
        """Test that the distance of u* to the truth does not grow between iterations."""
        world, specs = synthesize_gdp_views(seed, 20, include_ground_truth_view=False)
        specs = inject_adversaries(specs, AdversaryConfig(mv=3, seed=seed))
        env = SimulatedEnvironment(
            world=world, specs=specs, mf=1.2, improvement=ImprovementConfig(if_factor=0.2)
        )
        questions = [
            Question(question_id=q, ground_truth=env.truth_of(q)) for q in question_ids(20)
        ]
        run = run_ciuv(env, questions[1:], questions[0], seed=seed)
        truth = questions[0].ground_truth
        errors = [abs(record.estimate.u_star - truth) for record in run.history]
        for earlier, later in zip(errors, errors[1:]):
            assert later <= earlier + 1e-9


class TestHistoricalMode:
    """Test cases for runs on externally supplied profiles."""

    def test_priors_drive_the_weights(self, known_truth_questions):
        """Test that historical priors replace the probe estimates."""
        answers = {
            "A": {"q1": 10.0, "q2": 20.0, "q3": 30.0, "t": 8.0},
            "B": {"q1": 10.0, "q2": 20.0, "q3": 30.0, "t": 12.0},
        }
        priors = {
            "A": ReliabilityProfile(source_id="A", mu=0.0, sigma2=0.0),
            "B": ReliabilityProfile(source_id="B", mu=3.0, sigma2=4.0),
        }
        env = StaticEnvironment(make_reports(answers))
        run = run_ciuv(
            env,
            known_truth_questions,
            Question(question_id="t"),
            seed=0,
            truth_mode=TruthMode.HISTORICAL,
            priors=priors,
        )
        assert run.estimate.u_star == 8.0
        assert run.estimate.weights.weights == (1.0, 0.0)

    def test_missing_prior_rejected(self, known_truth_questions):
        """Test that every source needs a prior before the loop starts."""
        answers = {
            "A": {"q1": 10.0, "q2": 20.0, "q3": 30.0, "t": 8.0},
            "B": {"q1": 10.0, "q2": 20.0, "q3": 30.0, "t": 12.0},
        }
        env = StaticEnvironment(make_reports(answers))
        priors = {"A": ReliabilityProfile(source_id="A", mu=0.0, sigma2=0.0)}
        with pytest.raises(ValidationError, match="prior for every source"):
            run_ciuv(
                env,
                known_truth_questions,
                Question(question_id="t"),
                truth_mode=TruthMode.HISTORICAL,
                priors=priors,
            )
        with pytest.raises(ValidationError):
            run_ciuv(
                env,
                known_truth_questions,
                Question(question_id="t"),
                truth_mode=TruthMode.HISTORICAL,
            )

    def test_service_forwards_priors(self, known_truth_questions):
        """Test that CIUVService runs historical mode with its priors."""
        answers = {"A": {"q1": 11.0, "q2": 21.0, "q3": 31.0, "t": 5.0}}
        priors = {"A": ReliabilityProfile(source_id="A", mu=0.0, sigma2=0.0)}
        service = CIUVService(truth_mode=TruthMode.HISTORICAL, priors=priors)
        env = StaticEnvironment(make_reports(answers))
        run = service.run(env, known_truth_questions, Question(question_id="t"))
        assert run.stop_reason == StopReason.ACCEPT_R
        assert run.estimate.u_star == 5.0


class TestCIUVService:
    """Test cases for CIUVService."""

    def test_run_uses_configured_mode(self, mocker, known_truth_questions):
        """Test that the service forwards its settings to run_ciuv."""
        mock_run = mocker.patch("src.services.ciuv_service.run_ciuv")
        service = CIUVService(
            stopping=StoppingConfig(e_T=0.5),
            n_probes=4,
            truth_mode=TruthMode.PROXY_MEAN,
            resample_probes=True,
        )
        env = mocker.Mock()
        target = Question(question_id="t")
        service.run(env, known_truth_questions, target, seed=9)
        mock_run.assert_called_once_with(
            env,
            known_truth_questions,
            target,
            stopping=service.stopping,
            seed=9,
            n_probes=4,
            truth_mode=TruthMode.PROXY_MEAN,
            resample_probes=True,
            priors=None,
        )
