"""LoggingSolver for fragvqe: logs subproblem solves and their timing."""

import logging
import time

from .base import SolverResult, Subproblem, SubproblemSolver

logger = logging.getLogger(__name__)


class LoggingSolver(SubproblemSolver):
    """A solver that logs each subproblem and the time taken to solve it.

    Wraps any other solver.
    """

    def __init__(self, solver: SubproblemSolver) -> None:
        """Initialize the LoggingSolver with the solver to wrap.

        Args:
            solver: The solver to wrap.

        """
        self.solver = solver

    @property
    def tag(self) -> str:
        """Tag of the wrapped solver."""
        return self.solver.tag

    def solve(self, subproblem: Subproblem) -> SolverResult:
        """Solve with the wrapped solver and log the outcome and timing."""
        request_time = time.perf_counter()
        result = self.solver.solve(subproblem)
        elapsed = time.perf_counter() - request_time
        logger.log(
            logging.INFO,
            "[%s] %s (%d qubits) solved in %.3fs: E=%.12f",
            type(self.solver).__name__,
            subproblem.label,
            subproblem.n_qubits,
            elapsed,
            result.energy,
        )
        result.metadata.setdefault("wall_s", elapsed)
        return result
