"""
Service Factory - Factory for creating service layer instances.

This factory provides a centralized way to create services and respondent
environments from the process settings and a scenario configuration.
"""

from typing import Optional, Sequence

from src.core.config import ScenarioConfig, Settings, get_settings
from src.core.logging import get_logger
from src.models.orchestration import StoppingConfig
from src.models.reliability import TruthMode
from src.models.views import Report
from src.repositories.dataset_repository import DatasetRepository
from src.repositories.static_environment import StaticEnvironment
from src.services.baseline_service import BaselineService
from src.services.ciuv_service import CIUVService
from src.services.experiment_service import ExperimentService

logger = get_logger(__name__)


class ServiceFactory:
    """
    Factory for creating service layer instances.

    Services are created lazily and cached, so one factory hands out the same
    instance on every call until :meth:`reset`.
    """

    def __init__(
        self,
        settings: Optional[Settings] = None,
        scenario: Optional[ScenarioConfig] = None,
    ):
        """
        Initialize Service Factory.

        Args:
            settings: Optional Settings instance. If None, uses get_settings().
            scenario: Scenario the services are configured from. If None, defaults.
        """
        self.settings = settings or get_settings()
        self.scenario = scenario or ScenarioConfig()
        self._ciuv_service: Optional[CIUVService] = None
        self._baseline_service: Optional[BaselineService] = None
        self._experiment_service: Optional[ExperimentService] = None
        self._dataset_repository: Optional[DatasetRepository] = None

    def get_ciuv_service(
        self,
        e_T: Optional[float] = None,
        n_probes: Optional[int] = None,
        truth_mode: Optional[TruthMode] = None,
    ) -> CIUVService:
        """
        Get or create CIUV Service (singleton).

        Overrides replace the scenario value for one call; the service they
        produce is not cached.

        Args:
            e_T: Error window half-width
            n_probes: Probes per iteration
            truth_mode: Probe truth mode

        Returns:
            CIUVService instance
        """
        if e_T is not None or n_probes is not None or truth_mode is not None:
            return self._build_ciuv_service(e_T, n_probes, truth_mode)
        if self._ciuv_service is None:
            self._ciuv_service = self._build_ciuv_service()
            logger.debug("Created CIUVService instance")
        return self._ciuv_service

    def _build_ciuv_service(
        self,
        e_T: Optional[float] = None,
        n_probes: Optional[int] = None,
        truth_mode: Optional[TruthMode] = None,
    ) -> CIUVService:
        scenario = self.scenario
        return CIUVService(
            stopping=StoppingConfig(
                R=scenario.R,
                D=scenario.D,
                e_T=e_T if e_T is not None else scenario.e_T,
                max_iterations=scenario.max_iterations,
            ),
            n_probes=n_probes if n_probes is not None else scenario.n_probe_questions,
            truth_mode=truth_mode or scenario.truth_mode,
            resample_probes=scenario.resample_probes,
        )

    def get_baseline_service(self) -> BaselineService:
        """
        Get or create Baseline Service (singleton).

        Returns:
            BaselineService instance
        """
        if self._baseline_service is None:
            self._baseline_service = BaselineService(k=self.scenario.k)
            logger.debug("Created BaselineService instance")
        return self._baseline_service

    def get_experiment_service(self, workers: Optional[int] = None) -> ExperimentService:
        """
        Get or create Experiment Service (singleton).

        Args:
            workers: Worker processes; defaults to the settings value

        Returns:
            ExperimentService instance
        """
        if self._experiment_service is None or (
            workers is not None and self._experiment_service.workers != workers
        ):
            self._experiment_service = ExperimentService(
                workers=workers if workers is not None else self.settings.workers
            )
            logger.debug("Created ExperimentService instance")
        return self._experiment_service

    def get_dataset_repository(self, tolerance: Optional[float] = None) -> DatasetRepository:
        """
        Get or create Dataset Repository (singleton).

        Args:
            tolerance: Identity tolerance; only used when the repository is created

        Returns:
            DatasetRepository instance
        """
        if self._dataset_repository is None:
            self._dataset_repository = (
                DatasetRepository(tolerance) if tolerance is not None else DatasetRepository()
            )
            logger.debug("Created DatasetRepository instance")
        return self._dataset_repository

    def create_static_environment(self, reports: Sequence[Report]) -> StaticEnvironment:
        """Create a fresh environment replaying ``reports``; never cached."""
        return StaticEnvironment(reports)

    def reset(self) -> None:
        """Reset all cached services (useful for testing)."""
        self._ciuv_service = None
        self._baseline_service = None
        self._experiment_service = None
        self._dataset_repository = None
        logger.debug("Reset all service instances")
