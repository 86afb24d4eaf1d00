"""
Respondent environment port.

The CIUV loop never talks to sources directly. It asks a
:class:`RespondentEnvironment` for answers and asks it to stimulate chosen
sources; how the means act on a source is the environment's business.
"""

from abc import ABC, abstractmethod
from typing import AbstractSet, FrozenSet, List, Sequence, Tuple

from src.core.logging import get_logger
from src.models.views import Question, Report


class RespondentEnvironment(ABC):
    """
    Abstract base class for all respondent environments.

    Implementations must answer every question for every source, so the
    reports returned by :meth:`answer` form a complete matrix.
    """

    def __init__(self) -> None:
        """Initialize the environment."""
        self.logger = get_logger(self.__class__.__name__)

    @property
    @abstractmethod
    def source_ids(self) -> Tuple[str, ...]:
        """Sources in a fixed order."""

    @abstractmethod
    def answer(self, questions: Sequence[Question]) -> List[Report]:
        """
        Collect every source's current answer to every question.

        Args:
            questions: Questions to ask

        Returns:
            One report per (source, question) pair
        """

    @abstractmethod
    def apply_stimulation(self, source_ids: AbstractSet[str]) -> FrozenSet[str]:
        """
        Apply incentivization or punishment to the given sources.

        Args:
            source_ids: Sources the loop wants stimulated

        Returns:
            The sources the means actually took effect on
        """

    def reset(self) -> None:
        """Restore the initial state; stateless environments need not override."""

    def __enter__(self) -> "RespondentEnvironment":
        """Context manager entry."""
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> bool:
        """Context manager exit: restore the initial state."""
        self.reset()
        return False
