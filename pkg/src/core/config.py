"""
Centralized configuration management for the CIUV engine.

Two layers are configured here:

- :class:`Settings` holds process-wide options (logging, output directory,
  worker count). It is read from ``CIUV_*`` environment variables and an
  optional ``.env`` file and exposed as a singleton through :func:`get_settings`.
- :class:`ScenarioConfig` describes one experiment scenario. It is loaded from
  a flat ``key=value`` file (or YAML) and validated field by field.
"""

from functools import lru_cache
from pathlib import Path
from typing import Any, ClassVar, Dict, List, Optional, Tuple

import yaml
from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.constants import AlgorithmDefaults, ErrorSignProfiles, GdpViews
from src.core.exceptions import ConfigurationError
from src.models.reliability import TruthMode
from src.models.simworld import ExponentSign


class Settings(BaseSettings):
    """Process-wide settings."""

    model_config = SettingsConfigDict(
        env_prefix="CIUV_",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: str = Field(default="INFO", description="Logging level")
    log_format: str = Field(default="human", description="'human' or 'json'")
    log_file: Optional[Path] = Field(default=None, description="Optional log file")
    output_dir: Path = Field(default=Path("results"), description="Experiment output dir")
    workers: int = Field(default=1, ge=1, description="Processes for experiment cells")

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        """Only the two formatter names are accepted."""
        value = v.lower()
        if value not in ("human", "json"):
            raise ValueError("log_format must be 'human' or 'json'")
        return value

    @classmethod
    def load(cls, env_file: Optional[Path] = None) -> "Settings":
        """
        Load settings from environment variables and an optional .env file.

        Args:
            env_file: Optional path to .env file. If None, common locations are tried.

        Returns:
            Settings instance

        Raises:
            ConfigurationError: If a value is invalid
        """
        env_paths = [
            Path(".env"),
            Path(__file__).parent.parent.parent / ".env",
        ]
        if env_file:
            env_paths.insert(0, env_file)

        for env_path in env_paths:
            if env_path.exists():
                load_dotenv(env_path, override=False)
                break

        try:
            return cls()
        except PydanticValidationError as e:
            raise ConfigurationError(
                f"Failed to load settings: {e}",
                details={"error_type": type(e).__name__},
                cause=e,
            ) from e


@lru_cache(maxsize=1)
def get_settings(env_file: Optional[Path] = None) -> Settings:
    """
    Get the global settings instance (singleton pattern).

    Args:
        env_file: Optional path to .env file

    Returns:
        Settings instance
    """
    return Settings.load(env_file=env_file)


def reset_settings() -> None:
    """Reset the global settings (useful for testing)."""
    get_settings.cache_clear()


def _source_count(include_ground_truth_view: bool) -> int:
    total = len(GdpViews.ALL)
    return total if include_ground_truth_view else total - 1


class ScenarioConfig(BaseModel):
    """
    One experiment scenario: adversaries, stimulation response, stopping rule
    and harness sizes.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    mv: int = Field(default=0, ge=0, description="Number of malicious views")
    mf: float = Field(default=1.0, gt=0, description="Manipulation factor")
    if_factor: float = Field(
        default=AlgorithmDefaults.IMPROVEMENT_FACTOR, gt=0, description="Improvement factor"
    )
    a: float = Field(default=AlgorithmDefaults.IMPROVEMENT_A, gt=0, lt=1)
    e_T: float = Field(default=AlgorithmDefaults.ERROR_THRESHOLD, gt=0)
    R: float = Field(default=AlgorithmDefaults.ACCEPTABLE_CONFIDENCE, gt=0, le=1)
    D: float = Field(default=AlgorithmDefaults.MIN_IMPROVEMENT, ge=0)
    seed: int = Field(default=0, ge=0, description="Master seed")
    k: int = Field(default=AlgorithmDefaults.K, ge=1)
    n_probe_questions: int = Field(default=AlgorithmDefaults.N_PROBE_QUESTIONS, ge=1)
    max_iterations: int = Field(default=AlgorithmDefaults.MAX_ITERATIONS, ge=1)
    n_trials: int = Field(default=AlgorithmDefaults.N_TRIALS, ge=1)
    exponent_sign: ExponentSign = ExponentSign.NEGATIVE_DECAY
    include_ground_truth_view: bool = False

    n_questions: int = Field(default=AlgorithmDefaults.N_QUESTIONS, ge=2)
    growth_low: float = AlgorithmDefaults.GROWTH_LOW
    growth_high: float = AlgorithmDefaults.GROWTH_HIGH
    error_sign_profile: str = ErrorSignProfiles.MIXED
    stimulate_honest: bool = False
    resample_probes: bool = False
    truth_mode: TruthMode = TruthMode.KNOWN_TRUTH

    @field_validator("error_sign_profile")
    @classmethod
    def validate_sign_profile(cls, v: str) -> str:
        """Restrict to the known sign profiles."""
        if v not in ErrorSignProfiles.ALL:
            raise ValueError(f"error_sign_profile must be one of {ErrorSignProfiles.ALL}")
        return v

    @field_validator("truth_mode")
    @classmethod
    def validate_truth_mode(cls, v: TruthMode) -> TruthMode:
        """Historical priors cannot be expressed in a scenario file."""
        if v == TruthMode.HISTORICAL:
            raise ValueError("truth_mode must be known_truth or proxy_mean")
        return v

    @model_validator(mode="after")
    def validate_cross_fields(self) -> "ScenarioConfig":
        """Check invariants spanning several fields."""
        sources = _source_count(self.include_ground_truth_view)
        if self.mv > sources:
            raise ValueError(f"mv={self.mv} exceeds the {sources} participating sources")
        if self.k > sources:
            raise ValueError(f"k={self.k} exceeds the {sources} participating sources")
        if self.n_probe_questions > self.n_questions - 1:
            raise ValueError("n_probe_questions must leave the target question out of the pool")
        if self.growth_high <= self.growth_low:
            raise ValueError("growth_high must exceed growth_low")
        return self

    @property
    def source_count(self) -> int:
        """Sources participating in the scenario."""
        return _source_count(self.include_ground_truth_view)

    @classmethod
    def field_names(cls) -> List[str]:
        """Field names in declaration order."""
        return list(cls.model_fields)

    @classmethod
    def from_mapping(cls, values: Dict[str, Any]) -> "ScenarioConfig":
        """
        Validate a mapping whose keys may differ in case from the field names.

        Args:
            values: Raw key/value pairs (strings are coerced)

        Returns:
            ScenarioConfig instance

        Raises:
            ConfigurationError: On unknown keys or invalid values
        """
        normalized: Dict[str, Any] = {}
        unknown: List[str] = []
        for key, value in values.items():
            name = resolve_field_name(key)
            if name is None:
                unknown.append(key)
                continue
            if isinstance(value, str) and value.strip() == "":
                continue
            normalized[name] = value.strip() if isinstance(value, str) else value

        if unknown:
            raise ConfigurationError(
                "Unknown scenario keys",
                details={"keys": unknown, "allowed": cls.field_names()},
            )

        try:
            return cls.model_validate(normalized)
        except PydanticValidationError as e:
            raise ConfigurationError(
                "Invalid scenario configuration",
                details={"errors": _format_errors(e)},
                cause=e,
            ) from e

    @classmethod
    def from_file(cls, path: Path) -> "ScenarioConfig":
        """
        Load a scenario from a flat ``key=value`` file or a YAML mapping.

        Args:
            path: Path to the config file

        Returns:
            ScenarioConfig instance

        Raises:
            ConfigurationError: If the file is missing, unreadable or invalid
        """
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(
                "Scenario file not found", details={"path": str(path)}
            )

        if path.suffix.lower() in (".yaml", ".yml"):
            try:
                with open(path, "r", encoding="utf-8") as f:
                    raw = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigurationError(
                    f"Invalid YAML in scenario file: {e}",
                    details={"path": str(path)},
                    cause=e,
                ) from e
            if not isinstance(raw, dict):
                raise ConfigurationError(
                    "Scenario YAML must be a mapping", details={"path": str(path)}
                )
        else:
            raw = {k: v for k, v in dotenv_values(path).items() if v is not None}

        return cls.from_mapping(raw)

    def with_value(self, factor: str, value: Any) -> "ScenarioConfig":
        """Return a re-validated copy with one field replaced."""
        name = resolve_field_name(factor)
        if name is None:
            raise ConfigurationError(
                "Unknown scenario field", details={"field": factor}
            )
        return ScenarioConfig.from_mapping({**self.model_dump(), name: value})


_FIELD_ALIASES = {"if": "if_factor", "e_t": "e_T", "r": "R", "d": "D"}


def resolve_field_name(key: str) -> Optional[str]:
    """Map a user-facing key (any case, ``if`` alias) to a ScenarioConfig field."""
    cleaned = key.strip()
    if cleaned in ScenarioConfig.model_fields:
        return cleaned
    lowered = cleaned.lower()
    if lowered in _FIELD_ALIASES:
        return _FIELD_ALIASES[lowered]
    for name in ScenarioConfig.model_fields:
        if name.lower() == lowered:
            return name
    return None


def _format_errors(error: PydanticValidationError) -> List[str]:
    return [
        f"{'.'.join(str(p) for p in item['loc']) or 'config'}: {item['msg']}"
        for item in error.errors()
    ]


class SweepSpec(BaseModel):
    """One factor varied over a list of values, e.g. ``mv=3,6,9,12``."""

    model_config = ConfigDict(frozen=True)

    factor: str
    values: Tuple[str, ...]

    SWEEPABLE: ClassVar[Tuple[str, ...]] = (
        "mv",
        "mf",
        "if_factor",
        "a",
        "e_T",
        "R",
        "D",
        "k",
        "n_probe_questions",
        "max_iterations",
        "exponent_sign",
        "include_ground_truth_view",
        "error_sign_profile",
        "stimulate_honest",
    )

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        """
        Parse ``factor=v1,v2,...``.

        Raises:
            ConfigurationError: If the text is malformed or the factor unknown
        """
        if "=" not in text:
            raise ConfigurationError(
                "Sweep must look like factor=v1,v2", details={"sweep": text}
            )
        key, _, raw_values = text.partition("=")
        factor = resolve_field_name(key)
        if factor is None or factor not in cls.SWEEPABLE:
            raise ConfigurationError(
                "Invalid sweep factor",
                details={"factor": key.strip(), "sweepable": list(cls.SWEEPABLE)},
            )
        values = tuple(v.strip() for v in raw_values.split(",") if v.strip())
        if not values:
            raise ConfigurationError("Sweep has no values", details={"sweep": text})
        if len(set(values)) != len(values):
            raise ConfigurationError("Sweep repeats a value", details={"sweep": text})
        return cls(factor=factor, values=values)

    def configs(self, base: ScenarioConfig) -> List[Tuple[str, ScenarioConfig]]:
        """Validated ``(value, config)`` pairs in sweep order."""
        return [(value, base.with_value(self.factor, value)) for value in self.values]
