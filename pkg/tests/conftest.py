"""
Pytest configuration and shared fixtures.

This module provides common fixtures and configuration for all tests.
"""

from pathlib import Path
from typing import Dict, List

import numpy as np
import pytest

from src.core.config import ScenarioConfig, Settings, reset_settings
from src.models.reliability import ProbeSet, ReliabilityProfile
from src.models.views import Question, Report
from src.repositories.simulated_environment import SimulatedEnvironment

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(autouse=True)
def reset_settings_singleton():
    """Reset settings singleton before and after each test."""
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def settings(tmp_path: Path) -> Settings:
    """Settings writing into a temporary directory."""
    return Settings(output_dir=tmp_path / "results", log_level="WARNING")


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for property loops."""
    return np.random.default_rng(20240601)


@pytest.fixture
def sample_levels_path() -> Path:
    """Bundled level CSV with exact identities and one gap."""
    return DATA_DIR / "sample_levels.csv"


@pytest.fixture
def known_truth_questions() -> List[Question]:
    """Three probe questions with ground truths 10, 20, 30."""
    return [
        Question(question_id="q1", ground_truth=10.0),
        Question(question_id="q2", ground_truth=20.0),
        Question(question_id="q3", ground_truth=30.0),
    ]


@pytest.fixture
def simple_probe_set(known_truth_questions: List[Question]) -> ProbeSet:
    """Probe set where A is off by one everywhere and B echoes the truth."""
    return ProbeSet.from_answers(
        known_truth_questions,
        {"A": [9.0, 19.0, 29.0], "B": [10.0, 20.0, 30.0]},
    )


@pytest.fixture
def identical_profiles() -> List[ReliabilityProfile]:
    """Four sources with the same error model."""
    return [ReliabilityProfile(source_id=s, mu=0.7, sigma2=2.0) for s in "ABCD"]


def make_reports(answers: Dict[str, Dict[str, float]]) -> List[Report]:
    """Reports from ``{source: {question: answer}}``."""
    return [
        Report(source_id=source, question_id=question, answer=value)
        for source, by_question in answers.items()
        for question, value in by_question.items()
    ]


@pytest.fixture
def small_world_env() -> SimulatedEnvironment:
    """Five questions, three sources, one malicious."""
    truths = {f"q{i}": float(t) for i, t in enumerate([5.0, 8.0, 11.0, 6.0, 9.0], start=1)}
    answers = {
        "honest_a": [t - 0.5 for t in truths.values()],
        "honest_b": [t + 0.75 for t in truths.values()],
        "shady": [t - 1.5 for t in truths.values()],
    }
    return SimulatedEnvironment.from_answers(truths, answers, malicious={"shady"}, mf=1.5)


@pytest.fixture
def fast_scenario() -> ScenarioConfig:
    """Small scenario for end-to-end runs."""
    return ScenarioConfig(
        n_trials=2, n_questions=8, n_probe_questions=5, max_iterations=10, seed=11, mv=3, mf=1.2
    )
