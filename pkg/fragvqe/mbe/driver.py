"""Many-body-expansion driver: solve every n-mer, assemble, optionally correct at RHF level."""

import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

from fragvqe.concurrency import WorkQueue, run_all
from fragvqe.errors import PlanError
from fragvqe.events import RunEventManager
from fragvqe.geometry import Geometry
from fragvqe.integrals.ao import build_ao_integrals
from fragvqe.integrals.mo import frontier_window, transform_to_mo
from fragvqe.integrals.scf import run_rhf
from fragvqe.solvers.base import SolverResult, Subproblem, SubproblemSolver
from fragvqe.solvers.mean_field import MeanFieldSolver

from .assembly import assemble_mbe_energy, check_cap_telescoping, mbe_increments
from .nmer import NMer, enumerate_nmers
from .plan import FragmentationPlan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActiveSpaceRule:
    """Per-order active-space sizes for n-mer subproblems.

    Orders without an entry use every orbital. An entry keeps that many
    orbitals around the HOMO-LUMO gap and folds the rest of the occupied
    block into a frozen core.
    """

    windows: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        """Validate the window sizes."""
        for order, n_active in self.windows:
            if order < 1 or n_active < 1:
                msg = f"active window {n_active} for order {order} must be positive"
                raise PlanError(msg)

    @classmethod
    def full(cls) -> "ActiveSpaceRule":
        """Use every orbital at every order."""
        return cls()

    @classmethod
    def frontier(cls, windows: Mapping[int, int]) -> "ActiveSpaceRule":
        """Use ``windows[order]`` frontier orbitals, e.g. ``{1: 4, 2: 8}``."""
        return cls(tuple(sorted((int(k), int(v)) for k, v in windows.items())))

    def n_active(self, order: int) -> int | None:
        """Active orbital count for an n-mer order, or None for the full space."""
        return dict(self.windows).get(order)


@dataclass
class MBEResult:
    """Energies of one expansion run; energies are in hartree."""

    order: int
    n_fragments: int
    energies: dict[tuple[int, ...], float]
    e_mbe: float
    e_corr: float = 0.0
    rhf_energies: dict[tuple[int, ...], float] = field(default_factory=dict)
    results: dict[tuple[int, ...], SolverResult] = field(default_factory=dict)
    failures: dict[tuple[int, ...], Exception] = field(default_factory=dict)

    @property
    def e_total(self) -> float:
        """Expansion energy plus the RHF correction."""
        return self.e_mbe + self.e_corr

    @property
    def partial(self) -> bool:
        """True when at least one n-mer failed."""
        return bool(self.failures)

    @property
    def max_qubits(self) -> int:
        """Largest subproblem register among solved n-mers."""
        return max((r.n_qubits for r in self.results.values()), default=0)

    @property
    def increments(self) -> dict[int, float]:
        """Summed k-body increments, available once every n-mer is solved."""
        return mbe_increments(self.energies, self.n_fragments, self.order)


def nmer_subproblem(
    nmer: NMer,
    active_space: ActiveSpaceRule | None = None,
    *,
    want_rdms: bool = False,
) -> tuple[Subproblem, float]:
    """Build the MO-basis subproblem of a capped n-mer and return it with its RHF energy.

    Raises:
        UnsupportedMultiplicityError: The capped n-mer is open-shell.
        ScfNotConvergedError: The n-mer SCF did not converge.

    """
    geometry = nmer.geometry
    geometry.require_closed_shell()
    ao = build_ao_integrals(geometry)
    rhf = run_rhf(ao, geometry.n_electrons).raise_if_unconverged()
    n_active = None if active_space is None else active_space.n_active(nmer.order)
    window = None if n_active is None else frontier_window(rhf, n_active)
    mo = transform_to_mo(ao, rhf, window)
    return Subproblem(nmer.label, mo, want_rdms), rhf.energy


def full_rhf_energy(geometry: Geometry) -> float:
    """Converged RHF energy of the whole system.

    Raises:
        ScfNotConvergedError: The SCF did not converge.

    """
    geometry.require_closed_shell()
    ao = build_ao_integrals(geometry)
    return run_rhf(ao, geometry.n_electrons).raise_if_unconverged().energy


def run_mbe(  # noqa: PLR0913 - the driver takes the full run description
    geometry: Geometry,
    plan: FragmentationPlan,
    order: int,
    solver: SubproblemSolver,
    *,
    active_space: ActiveSpaceRule | None = None,
    correction: bool = False,
    work_queue: WorkQueue | None = None,
    events: RunEventManager | None = None,
) -> MBEResult:
    """Solve all n-mers up to ``order`` and assemble the expansion energy.

    Subproblem failures do not abort the run: they are logged, reported
    through ``events`` and stored in :attr:`MBEResult.failures`, and the
    energies of a partial run are NaN.

    Args:
        geometry: Full system.
        plan: Fragmentation of ``geometry``.
        order: Truncation order; orders above the fragment count are clipped.
        solver: Subproblem solver (usually a cached chain).
        active_space: Per-order active-space rule; None keeps every orbital.
        correction: Add ``RHF(full) - MBE(RHF)`` at the same order.
        work_queue: Optional pool for independent n-mers.
        events: Optional event manager notified per n-mer.

    Raises:
        PlanError: The plan does not match the geometry or ``order`` < 1.

    """
    plan.validate(geometry)
    n = plan.n_fragments
    if order < 1:
        msg = f"expansion order must be at least 1, got {order}"
        raise PlanError(msg)
    if order > n:
        logger.log(logging.DEBUG, "Clipping expansion order %d to %d fragments", order, n)
        order = n

    nmers = [nmer for k in range(1, order + 1) for nmer in enumerate_nmers(plan, geometry, k)]
    check_cap_telescoping(nmers, n, order)

    def solve(nmer: NMer) -> tuple[SolverResult, float]:
        subproblem, e_rhf = nmer_subproblem(nmer, active_space)
        return solver.solve(subproblem), e_rhf

    outcomes = run_all([lambda nmer=nmer: solve(nmer) for nmer in nmers], work_queue)

    result = MBEResult(order, n, {}, math.nan)
    for nmer, outcome in zip(nmers, outcomes, strict=True):
        if isinstance(outcome, Exception):
            logger.log(logging.ERROR, "n-mer %s failed: %s", nmer.label, outcome)
            result.failures[nmer.members] = outcome
            if events is not None:
                events.trigger_subproblem_failed(nmer.label, outcome)
            continue
        solved, e_rhf = outcome
        result.energies[nmer.members] = solved.energy
        result.rhf_energies[nmer.members] = e_rhf
        result.results[nmer.members] = solved
        if events is not None:
            events.trigger_subproblem_solved(nmer.label, solved.tag, solved.energy, solved.n_qubits)

    if result.partial:
        logger.log(
            logging.ERROR,
            "Expansion of order %d is partial: %d of %d n-mers failed",
            order,
            len(result.failures),
            len(nmers),
        )
        result.e_corr = math.nan if correction else 0.0
        return result

    result.e_mbe = assemble_mbe_energy(result.energies, n, order)
    if correction:
        result.e_corr = full_rhf_energy(geometry) - assemble_mbe_energy(result.rhf_energies, n, order)
    logger.log(
        logging.INFO,
        "MBE%d over %d fragments: E_mbe=%.12f E_corr=%.12f (%d n-mers, max %d qubits)",
        order,
        n,
        result.e_mbe,
        result.e_corr,
        len(nmers),
        result.max_qubits,
    )
    return result


def rhf_correction(
    geometry: Geometry,
    plan: FragmentationPlan,
    solver: SubproblemSolver | None = None,
    *,
    order: int = 2,
    work_queue: WorkQueue | None = None,
) -> float:
    """Return ``RHF(full) - MBE(RHF)``, the long-range correction to an expansion.

    The n-mers are capped exactly as in :func:`run_mbe`.

    Raises:
        ScfNotConvergedError: An SCF (full system or n-mer) did not converge.

    """
    result = run_mbe(geometry, plan, order, solver or MeanFieldSolver(), work_queue=work_queue)
    if result.partial:
        raise next(iter(result.failures.values()))
    return full_rhf_energy(geometry) - result.e_mbe
