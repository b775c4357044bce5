"""DiskCacheSolver for fragvqe: one text record per solved subproblem.

A record is a single line ``label tag energy n_qubits`` with the energy in
hartree to 12 decimals. Records carry energies only, so requests that need
RDMs always go to the next solver.
"""

import logging
import re
from pathlib import Path

from .base import ChainedSolver, SolverResult, Subproblem, SubproblemSolver

logger = logging.getLogger(__name__)

_UNSAFE = re.compile(r"[^A-Za-z0-9_.,=+-]")


class DiskCacheSolver(ChainedSolver):
    """Solver that caches subproblem energies on disk."""

    def __init__(
        self,
        next_solver: SubproblemSolver,
        cache_dir: Path,
    ) -> None:
        """Initialize the disk cache solver.

        Args:
            next_solver: The next solver in the chain.
            cache_dir: Directory for the records.

        """
        super().__init__(next_solver)
        self.cache_dir = cache_dir

    @property
    def cache_dir(self) -> Path:
        """Return the directory where records are stored."""
        return self._cache_dir

    @cache_dir.setter
    def cache_dir(self, cache_dir: Path) -> None:
        """Set the directory where records will be stored."""
        self._cache_dir = Path(cache_dir)
        self._cache_dir.mkdir(parents=True, exist_ok=True)
        logger.log(
            logging.INFO,
            "%s: Cache directory set to %s",
            type(self).__name__,
            self._cache_dir,
        )

    def _get_record_path(self, subproblem: Subproblem) -> Path:
        """Return the record file for a subproblem."""
        tag = _UNSAFE.sub("_", self.tag)
        label = _UNSAFE.sub("_", subproblem.label)
        return self.cache_dir / tag / f"{label}-{subproblem.integrals.digest()}.rec"

    def _has_result(self, subproblem: Subproblem) -> bool:
        """Return True if an energy record exists and no RDMs are needed."""
        return not subproblem.want_rdms and self._get_record_path(subproblem).exists()

    def _get_result(self, subproblem: Subproblem) -> SolverResult:
        """Read a record back; a damaged record is re-solved."""
        path = self._get_record_path(subproblem)
        try:
            _, tag, energy, n_qubits = path.read_text(encoding="utf-8").split()
            return SolverResult(float(energy), int(n_qubits), tag, metadata={"cached": True})
        except (OSError, ValueError) as e:
            logger.log(
                logging.ERROR,
                "%s: Unreadable record %s (%s); solving again",
                type(self).__name__,
                path,
                e,
            )
            result = self._next_solver.solve(subproblem)
            self._save_result(subproblem, result)
            return result

    def _save_result(self, subproblem: Subproblem, result: SolverResult) -> None:
        """Write the energy record of a subproblem."""
        path = self._get_record_path(subproblem)
        path.parent.mkdir(parents=True, exist_ok=True)
        label = _UNSAFE.sub("_", subproblem.label)
        tag = _UNSAFE.sub("_", result.tag)
        record = f"{label} {tag} {result.energy:.12f} {result.n_qubits}\n"
        try:
            path.write_text(record, encoding="utf-8")
        except OSError as e:
            logger.log(
                logging.ERROR,
                "%s: Failed to save record for %s: %s",
                type(self).__name__,
                subproblem.label,
                e,
            )
