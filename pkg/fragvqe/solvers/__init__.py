"""Subproblem solvers for fragvqe: concrete methods plus cache and logging layers.

A typical chain is MemoryCacheSolver -> DiskCacheSolver -> LoggingSolver ->
concrete solver; see :func:`build_solver_chain`.
"""

from pathlib import Path

from .adapt import AdaptVqeSolver
from .base import ChainedSolver, SolverResult, Subproblem, SubproblemSolver
from .disk_cache import DiskCacheSolver
from .exact import ExactMethod, ExactSolver
from .logging_solver import LoggingSolver
from .mean_field import MeanFieldSolver, determinant_rdms
from .memory_cache import MemoryCacheSolver


def build_solver_chain(
    solver: SubproblemSolver,
    cache_dir: Path | None = None,
    max_cache_size: int = 256,
) -> SubproblemSolver:
    """Wrap a concrete solver in logging, optional disk cache and memory cache layers."""
    chained: SubproblemSolver = LoggingSolver(solver)
    if cache_dir is not None:
        chained = DiskCacheSolver(chained, cache_dir)
    return MemoryCacheSolver(chained, max_cache_size)


__all__ = [
    "AdaptVqeSolver",
    "ChainedSolver",
    "DiskCacheSolver",
    "ExactMethod",
    "ExactSolver",
    "LoggingSolver",
    "MeanFieldSolver",
    "MemoryCacheSolver",
    "SolverResult",
    "Subproblem",
    "SubproblemSolver",
    "build_solver_chain",
    "determinant_rdms",
]
