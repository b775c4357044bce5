"""ExactSolver for fragvqe: exact diagonalization of a subproblem (the CASCI oracle)."""

import logging
from enum import StrEnum

from fragvqe.hamiltonian.jordan_wigner import qubit_hamiltonian
from fragvqe.simulator.exact import Sector, exact_ground_state
from fragvqe.simulator.fci import casci
from fragvqe.simulator.rdm import compute_rdms

from .base import SolverResult, Subproblem, SubproblemSolver

logger = logging.getLogger(__name__)


class ExactMethod(StrEnum):
    """Diagonalization back ends."""

    CASCI = "casci"
    SECTOR = "sector"


class ExactSolver(SubproblemSolver):
    """Solver returning the exact ground state within the subproblem's active space.

    ``casci`` diagonalizes in the alpha x beta determinant basis; ``sector``
    diagonalizes the Jordan-Wigner Hamiltonian restricted to the (N, S_z)
    sector. Both give the same energy.
    """

    def __init__(self, method: ExactMethod | str = ExactMethod.CASCI) -> None:
        """Initialize the exact solver.

        Args:
            method: Diagonalization back end.

        """
        self.method = ExactMethod(method)

    @property
    def tag(self) -> str:
        """Both back ends share one tag since they agree to solver precision."""
        return "exact"

    def solve(self, subproblem: Subproblem) -> SolverResult:
        """Diagonalize the subproblem Hamiltonian."""
        mo = subproblem.integrals
        if self.method is ExactMethod.CASCI:
            solution = casci(mo, want_rdms=subproblem.want_rdms)
            return SolverResult(solution.energy, mo.n_qubits, self.tag, solution.rdms)
        solution = exact_ground_state(qubit_hamiltonian(mo), Sector(mo.n_elec, mo.ms2))
        rdms = compute_rdms(solution.ground_state, mo.n_orb) if subproblem.want_rdms else None
        return SolverResult(solution.energy, mo.n_qubits, self.tag, rdms)
