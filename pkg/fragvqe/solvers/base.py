"""Base classes for subproblem solvers in fragvqe."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

from fragvqe.integrals.mo import MOIntegrals
from fragvqe.simulator.rdm import RDMs

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Subproblem:
    """An active-space Hamiltonian to solve, named by the fragment set it came from."""

    label: str
    integrals: MOIntegrals
    want_rdms: bool = False

    @property
    def n_qubits(self) -> int:
        """Qubits of the Jordan-Wigner register."""
        return self.integrals.n_qubits

    def key(self, tag: str) -> str:
        """Cache key: label, solver tag and a digest of the integrals."""
        return f"{self.label}|{tag}|{self.integrals.digest()}"


@dataclass(frozen=True, eq=False)
class SolverResult:
    """Energy (hartree) of a subproblem and, on request, its RDMs."""

    energy: float
    n_qubits: int
    tag: str
    rdms: RDMs | None = None
    converged: bool = True
    iterations: int = 0
    metadata: dict[str, object] = field(default_factory=dict)


class SubproblemSolver(ABC):
    """Abstract base class for all subproblem solvers."""

    @property
    @abstractmethod
    def tag(self) -> str:
        """Short name identifying the method and its settings."""

    @abstractmethod
    def solve(self, subproblem: Subproblem) -> SolverResult:
        """Return the ground-state energy (and RDMs when requested) of a subproblem."""


class ChainedSolver(SubproblemSolver):
    """Solver that chains to a next solver for cache layers."""

    _next_solver: SubproblemSolver

    def __init__(self, next_solver: SubproblemSolver) -> None:
        """Initialize the chained solver with a next solver."""
        self._next_solver = next_solver

    @property
    def tag(self) -> str:
        """Tag of the solver at the end of the chain."""
        return self._next_solver.tag

    @abstractmethod
    def _get_result(self, subproblem: Subproblem) -> SolverResult:
        """Return a stored result."""

    @abstractmethod
    def _has_result(self, subproblem: Subproblem) -> bool:
        """Return True if a usable result is stored for this subproblem."""

    @abstractmethod
    def _save_result(self, subproblem: Subproblem, result: SolverResult) -> None:
        """Store a result."""

    def _lookup(self, subproblem: Subproblem) -> SolverResult | None:
        """Return a stored result, or None; layers shared across threads override this atomically."""
        if self._has_result(subproblem):
            return self._get_result(subproblem)
        return None

    def solve(self, subproblem: Subproblem) -> SolverResult:
        """Return a stored result, or solve with the next solver and store it."""
        stored = self._lookup(subproblem)
        if stored is not None:
            return stored
        try:
            result = self._next_solver.solve(subproblem)
        except Exception as e:
            logger.log(
                logging.ERROR,
                "%s: Error solving subproblem %s: %s",
                type(self).__name__,
                subproblem.label,
                e,
            )
            raise
        self._save_result(subproblem, result)
        return result
