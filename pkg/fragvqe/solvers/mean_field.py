"""MeanFieldSolver for fragvqe: restricted Hartree-Fock energies and RDMs of a subproblem."""

import logging

import numpy as np

from fragvqe.integrals.ao import AOIntegrals
from fragvqe.integrals.scf import run_rhf
from fragvqe.simulator.rdm import RDMs

from .base import SolverResult, Subproblem, SubproblemSolver

logger = logging.getLogger(__name__)


def determinant_rdms(density: np.ndarray) -> RDMs:
    """RDMs of a closed-shell determinant: Gamma_pqrs = D_pq D_rs - 1/2 D_ps D_rq."""
    two = np.einsum("pq,rs->pqrs", density, density) - 0.5 * np.einsum("ps,rq->pqrs", density, density)
    return RDMs(density.copy(), two)


class MeanFieldSolver(SubproblemSolver):
    """Solver that runs RHF inside the subproblem's orbital space."""

    @property
    def tag(self) -> str:
        """Method tag."""
        return "rhf"

    def solve(self, subproblem: Subproblem) -> SolverResult:
        """Return the RHF energy; unconverged SCF is flagged, not raised."""
        mo = subproblem.integrals
        if mo.n_orb == 0:
            empty = RDMs(np.zeros((0, 0)), np.zeros((0, 0, 0, 0)))
            return SolverResult(mo.e_core, 0, self.tag, empty if subproblem.want_rdms else None)
        rhf = run_rhf(AOIntegrals.from_orthonormal(mo), mo.n_elec)
        rdms = determinant_rdms(rhf.density) if subproblem.want_rdms else None
        return SolverResult(
            rhf.energy,
            mo.n_qubits,
            self.tag,
            rdms,
            converged=rhf.converged,
            iterations=rhf.n_iterations,
        )
