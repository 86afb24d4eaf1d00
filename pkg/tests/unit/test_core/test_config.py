"""
Unit tests for configuration module.
"""

from pathlib import Path
from unittest.mock import patch

import pytest

from src.core.config import (
    ScenarioConfig,
    Settings,
    SweepSpec,
    get_settings,
    reset_settings,
    resolve_field_name,
)
from src.core.exceptions import ConfigurationError
from src.models.reliability import TruthMode
from src.models.simworld import ExponentSign


class TestSettings:
    """Test cases for Settings."""

    @patch("src.core.config.load_dotenv")
    def test_settings_singleton(self, mock_load_dotenv):
        """Test that get_settings returns singleton instance."""
        settings1 = get_settings()
        settings2 = get_settings()
        assert settings1 is settings2

    @patch("src.core.config.load_dotenv")
    def test_reset_settings(self, mock_load_dotenv):
        """Test that reset_settings clears singleton."""
        settings1 = get_settings()
        reset_settings()
        settings2 = get_settings()
        assert settings1 is not settings2

    @patch("src.core.config.load_dotenv")
    @patch.dict(
        "os.environ",
        {"CIUV_LOG_LEVEL": "DEBUG", "CIUV_WORKERS": "3", "CIUV_LOG_FORMAT": "JSON"},
        clear=False,
    )
    def test_settings_loads_from_env(self, mock_load_dotenv):
        """Test that settings load from CIUV_* environment variables."""
        settings = Settings.load()
        assert settings.log_level == "DEBUG"
        assert settings.workers == 3
        assert settings.log_format == "json"

    @patch("src.core.config.load_dotenv")
    @patch.dict("os.environ", {"CIUV_WORKERS": "0"}, clear=False)
    def test_invalid_settings_raise_configuration_error(self, mock_load_dotenv):
        """Test that invalid values are reported as ConfigurationError."""
        with pytest.raises(ConfigurationError):
            Settings.load()


class TestScenarioConfig:
    """Test cases for ScenarioConfig."""

    def test_defaults(self):
        """Test the documented defaults."""
        config = ScenarioConfig()
        assert config.mv == 0
        assert config.mf == 1.0
        assert config.if_factor == 0.2
        assert config.a == 0.1
        assert config.e_T == 1.0
        assert config.R == 0.9
        assert config.D == 0.01
        assert config.k == 3
        assert config.n_probe_questions == 10
        assert config.max_iterations == 50
        assert config.n_trials == 10
        assert config.exponent_sign == ExponentSign.NEGATIVE_DECAY
        assert config.include_ground_truth_view is False
        assert config.source_count == 12

    def test_from_key_value_file(self, tmp_path: Path):
        """Test loading a flat key=value file with aliases and mixed case."""
        path = tmp_path / "scenario.env"
        path.write_text(
            "# comment\nmv=3\nmf=1.2\nif=0.3\ne_t=0.5\nR=0.95\nseed=42\n"
            "exponent_sign=literal_positive\ninclude_ground_truth_view=true\n"
        )
        config = ScenarioConfig.from_file(path)
        assert config.mv == 3
        assert config.mf == 1.2
        assert config.if_factor == 0.3
        assert config.e_T == 0.5
        assert config.R == 0.95
        assert config.seed == 42
        assert config.exponent_sign == ExponentSign.LITERAL_POSITIVE
        assert config.include_ground_truth_view is True
        assert config.source_count == 13

    def test_from_yaml_file(self, tmp_path: Path):
        """Test loading a YAML mapping."""
        path = tmp_path / "scenario.yaml"
        path.write_text("mv: 6\nmf: 1.6\ntruth_mode: proxy_mean\n")
        config = ScenarioConfig.from_file(path)
        assert config.mv == 6
        assert config.truth_mode == TruthMode.PROXY_MEAN

    def test_unknown_key_rejected(self, tmp_path: Path):
        """Test that unknown keys raise ConfigurationError."""
        path = tmp_path / "scenario.env"
        path.write_text("mv=3\nbogus=1\n")
        with pytest.raises(ConfigurationError) as exc_info:
            ScenarioConfig.from_file(path)
        assert "bogus" in str(exc_info.value)

    def test_missing_file(self, tmp_path: Path):
        """Test that a missing file raises ConfigurationError."""
        with pytest.raises(ConfigurationError):
            ScenarioConfig.from_file(tmp_path / "nope.env")

    @pytest.mark.parametrize(
        "values",
        [
            {"mv": 13},
            {"mf": 0},
            {"a": 1.0},
            {"R": 0},
            {"R": 1.5},
            {"D": -0.1},
            {"e_T": 0},
            {"n_trials": 0},
            {"k": 13},
            {"n_probe_questions": 20},
            {"truth_mode": "historical"},
            {"error_sign_profile": "sideways"},
        ],
    )
    def test_invariants_enforced(self, values):
        """Test that component invariants are enforced."""
        with pytest.raises(ConfigurationError):
            ScenarioConfig.from_mapping(values)

    def test_mv_may_reach_thirteen_with_truth_view(self):
        """Test that including GDP_PA raises the mv ceiling."""
        config = ScenarioConfig.from_mapping({"mv": 13, "include_ground_truth_view": True})
        assert config.mv == 13

    def test_with_value_revalidates(self):
        """Test that with_value returns a validated copy."""
        config = ScenarioConfig()
        assert config.with_value("mv", "6").mv == 6
        with pytest.raises(ConfigurationError):
            config.with_value("mv", "-1")

    def test_resolve_field_name(self):
        """Test key resolution."""
        assert resolve_field_name("if") == "if_factor"
        assert resolve_field_name("E_T") == "e_T"
        assert resolve_field_name("r") == "R"
        assert resolve_field_name("MV") == "mv"
        assert resolve_field_name("unknown") is None


class TestSweepSpec:
    """Test cases for SweepSpec."""

    def test_parse(self):
        """Test parsing a sweep."""
        sweep = SweepSpec.parse("mv=3,6,9,12")
        assert sweep.factor == "mv"
        assert sweep.values == ("3", "6", "9", "12")

    def test_parse_alias(self):
        """Test that the if alias is accepted."""
        assert SweepSpec.parse("if=0.1,0.4").factor == "if_factor"

    @pytest.mark.parametrize("text", ["mv", "color=1,2", "mv=", "mv=3,3", "seed=1,2"])
    def test_invalid_sweeps(self, text):
        """Test that malformed sweeps raise ConfigurationError."""
        with pytest.raises(ConfigurationError):
            SweepSpec.parse(text)

    def test_configs_validate_each_point(self):
        """Test that every sweep point is validated."""
        sweep = SweepSpec.parse("mv=3,14")
        with pytest.raises(ConfigurationError):
            sweep.configs(ScenarioConfig())

    def test_configs_in_order(self):
        """Test that configs keep the sweep order."""
        points = SweepSpec.parse("mf=1.4,1.6").configs(ScenarioConfig(mv=6))
        assert [value for value, _ in points] == ["1.4", "1.6"]
        assert [config.mf for _, config in points] == [1.4, 1.6]
        assert all(config.mv == 6 for _, config in points)
