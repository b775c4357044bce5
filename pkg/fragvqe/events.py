"""Event classes and event manager for progress reporting of fragment runs."""

import logging
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass

logger = logging.getLogger(__name__)


class Event(ABC):
    """Base class for all fragvqe events."""

    @abstractmethod
    def __repr__(self) -> str:
        """Return a string representation of the event."""


@dataclass(frozen=True)
class SubproblemSolvedEvent(Event):
    """A subproblem finished with an energy."""

    label: str
    tag: str
    energy: float
    n_qubits: int

    def __repr__(self) -> str:
        """Return a string representation of the solved event."""
        return (
            f"SubproblemSolvedEvent(label={self.label}, tag={self.tag}, "
            f"energy={self.energy:.12f}, n_qubits={self.n_qubits})"
        )


@dataclass(frozen=True)
class SubproblemFailedEvent(Event):
    """A subproblem raised instead of returning an energy."""

    label: str
    error: Exception

    def __repr__(self) -> str:
        """Return a string representation of the failed event."""
        return f"SubproblemFailedEvent(label={self.label}, error={self.error!r})"


@dataclass(frozen=True)
class DmetIterationEvent(Event):
    """One outer DMET iteration completed."""

    iteration: int
    mu: float
    cost: float
    e_total: float
    n_total: float

    def __repr__(self) -> str:
        """Return a string representation of the iteration event."""
        return (
            f"DmetIterationEvent(iteration={self.iteration}, mu={self.mu:.8f}, "
            f"cost={self.cost:.3e}, e_total={self.e_total:.12f}, n_total={self.n_total:.8f})"
        )


class RunEventManager:
    """Manages callbacks for subproblem completion and DMET progress."""

    _solved: list[Callable[[SubproblemSolvedEvent], None]]
    _failed: list[Callable[[SubproblemFailedEvent], None]]
    _dmet_iteration: list[Callable[[DmetIterationEvent], None]]

    def __init__(self) -> None:
        """Initialize the event manager with empty callback lists."""
        self._solved = []
        self._failed = []
        self._dmet_iteration = []

    def on_subproblem_solved(self, callback: Callable[[SubproblemSolvedEvent], None]) -> None:
        """Register a callback for solved subproblems."""
        logger.log(logging.DEBUG, "Registering subproblem solved callback %s", callback)
        self._solved.append(callback)

    def on_subproblem_failed(self, callback: Callable[[SubproblemFailedEvent], None]) -> None:
        """Register a callback for failed subproblems."""
        logger.log(logging.DEBUG, "Registering subproblem failed callback %s", callback)
        self._failed.append(callback)

    def on_dmet_iteration(self, callback: Callable[[DmetIterationEvent], None]) -> None:
        """Register a callback for DMET outer iterations."""
        logger.log(logging.DEBUG, "Registering DMET iteration callback %s", callback)
        self._dmet_iteration.append(callback)

    def trigger_subproblem_solved(self, label: str, tag: str, energy: float, n_qubits: int) -> None:
        """Trigger all solved callbacks."""
        event = SubproblemSolvedEvent(label, tag, energy, n_qubits)
        for callback in self._solved:
            callback(event)

    def trigger_subproblem_failed(self, label: str, error: Exception) -> None:
        """Trigger all failed callbacks."""
        event = SubproblemFailedEvent(label, error)
        for callback in self._failed:
            callback(event)

    def trigger_dmet_iteration(self, event: DmetIterationEvent) -> None:
        """Trigger all DMET iteration callbacks with the given event."""
        for callback in self._dmet_iteration:
            callback(event)
