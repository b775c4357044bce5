"""AdaptVqeSolver for fragvqe: ADAPT-VQE statevector simulation of a subproblem."""

import logging
from functools import lru_cache

from fragvqe.adaptvqe.driver import ConvergenceSpec, adapt_vqe
from fragvqe.adaptvqe.pools import OperatorPool, PoolKind, build_pool
from fragvqe.concurrency import WorkQueue
from fragvqe.errors import UnsupportedMultiplicityError
from fragvqe.hamiltonian.jordan_wigner import qubit_hamiltonian
from fragvqe.integrals.ao import AOIntegrals
from fragvqe.integrals.scf import run_rhf
from fragvqe.simulator.rdm import compute_rdms

from .base import SolverResult, Subproblem, SubproblemSolver

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _cached_pool(n_orb: int, n_elec: int, kind: PoolKind) -> OperatorPool:
    return build_pool(n_orb, n_elec, kind)


class AdaptVqeSolver(SubproblemSolver):
    """Solver running ADAPT-VQE from the Hartree-Fock determinant of the subproblem.

    With ``canonicalize`` the subproblem is first rotated to its own RHF
    orbitals, so the reference determinant is the subproblem's mean-field
    ground state; RDMs are rotated back to the caller's orbitals.
    """

    def __init__(
        self,
        pool_kind: PoolKind | str = PoolKind.SPIN_ADAPTED,
        conv: ConvergenceSpec | None = None,
        *,
        canonicalize: bool = True,
        work_queue: WorkQueue | None = None,
    ) -> None:
        """Initialize the ADAPT-VQE solver.

        Args:
            pool_kind: Operator pool family.
            conv: ADAPT stopping rules.
            canonicalize: Rotate to the subproblem's RHF orbitals first.
            work_queue: Optional queue for pool-gradient evaluation.

        """
        self.pool_kind = PoolKind(pool_kind)
        self.conv = conv or ConvergenceSpec()
        self.canonicalize = canonicalize
        self.work_queue = work_queue

    @property
    def tag(self) -> str:
        """Method tag including the stopping rules."""
        c = self.conv
        return f"adapt-{self.pool_kind}-g{c.grad_norm_eps:g}-v{c.variance_eps:g}-n{c.max_iterations}"

    def solve(self, subproblem: Subproblem) -> SolverResult:
        """Run ADAPT-VQE on the subproblem Hamiltonian."""
        mo = subproblem.integrals
        if mo.ms2 != 0 or mo.n_elec % 2:
            raise UnsupportedMultiplicityError(mo.ms2 + 1, mo.n_elec)
        if mo.n_orb == 0:
            return SolverResult(mo.e_core, 0, self.tag)

        rotation = None
        if self.canonicalize and 0 < mo.n_elec < 2 * mo.n_orb:
            rhf = run_rhf(AOIntegrals.from_orthonormal(mo), mo.n_elec)
            if rhf.converged:
                rotation = rhf.coefficients
            else:
                logger.log(
                    logging.WARNING,
                    "%s: keeping the input orbitals of %s, its SCF did not converge",
                    type(self).__name__,
                    subproblem.label,
                )
        work = mo if rotation is None else mo.rotated(rotation)

        h = qubit_hamiltonian(work)
        pool = _cached_pool(work.n_orb, work.n_elec, self.pool_kind)
        result = adapt_vqe(h, pool, self.conv, work_queue=self.work_queue)
        rdms = None
        if subproblem.want_rdms:
            rdms = compute_rdms(result.state, work.n_orb)
            if rotation is not None:
                rdms = rdms.rotated(rotation.T)
        return SolverResult(
            result.energy,
            mo.n_qubits,
            self.tag,
            rdms,
            converged=result.converged,
            iterations=result.n_iterations,
            metadata={"reason": result.reason, "trace": [r.to_line() for r in result.trace]},
        )
