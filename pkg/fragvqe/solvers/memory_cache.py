"""MemoryCacheSolver for fragvqe: in-memory LRU cache of subproblem results."""

import logging
import threading
from collections import OrderedDict

from .base import ChainedSolver, SolverResult, Subproblem, SubproblemSolver

logger = logging.getLogger(__name__)


class MemoryCacheSolver(ChainedSolver):
    """Solver that caches results in memory using an LRU strategy."""

    def __init__(
        self,
        next_solver: SubproblemSolver,
        max_cache_size: int = 256,
    ) -> None:
        """Initialize the memory cache solver.

        Args:
            next_solver: The next solver in the chain.
            max_cache_size: Maximum number of results kept in memory.

        """
        super().__init__(next_solver)
        self.max_cache_size = max_cache_size
        self._lru_cache: OrderedDict[str, SolverResult] = OrderedDict()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        """Return the number of cached results."""
        with self._lock:
            return len(self._lru_cache)

    def _has_result(self, subproblem: Subproblem) -> bool:
        """Return True if a result with the requested content is cached."""
        with self._lock:
            result = self._lru_cache.get(subproblem.key(self.tag))
        return result is not None and (result.rdms is not None or not subproblem.want_rdms)

    def _lookup(self, subproblem: Subproblem) -> SolverResult | None:
        """Return a usable cached result and mark it recently used, under a single lock."""
        key = subproblem.key(self.tag)
        with self._lock:
            result = self._lru_cache.get(key)
            if result is None or (result.rdms is None and subproblem.want_rdms):
                return None
            self._lru_cache.move_to_end(key)
            return result

    def _save_result(self, subproblem: Subproblem, result: SolverResult) -> None:
        """Save a result, evicting the least recently used beyond the size limit."""
        with self._lock:
            self._lru_cache[subproblem.key(self.tag)] = result
            if len(self._lru_cache) > self.max_cache_size:
                self._lru_cache.popitem(last=False)

    def _get_result(self, subproblem: Subproblem) -> SolverResult:
        """Return a cached result and mark it recently used.

        Raises:
            KeyError: The result is not cached (or was evicted meanwhile).

        """
        result = self._lookup(subproblem)
        if result is None:
            raise KeyError(subproblem.key(self.tag))
        return result

    def clear(self) -> None:
        """Clear the memory cache."""
        logger.log(logging.DEBUG, "%s: Clearing memory cache.", type(self).__name__)
        with self._lock:
            self._lru_cache.clear()
