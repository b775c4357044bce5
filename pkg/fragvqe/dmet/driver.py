"""DMET self-consistency: chemical-potential fitting and optional fragment-only potential fitting."""

import contextlib
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

import numpy as np
from scipy.optimize import minimize, root_scalar

from fragvqe.concurrency import WorkQueue, run_all
from fragvqe.errors import DmetNotConvergedError, EmbeddingError, PlanError
from fragvqe.events import DmetIterationEvent, RunEventManager
from fragvqe.geometry import Geometry
from fragvqe.integrals.ao import AOIntegrals, build_ao_integrals
from fragvqe.integrals.mo import MOIntegrals
from fragvqe.integrals.scf import aufbau_density, run_rhf
from fragvqe.mbe.plan import FragmentationPlan
from fragvqe.solvers.base import SolverResult, Subproblem, SubproblemSolver

from .embedding import EmbeddingProblem, apply_chemical_potential, embedding_problem
from .localize import localize_orbitals, localized_integrals
from .partition import fragment_energy_and_number

logger = logging.getLogger(__name__)

ELECTRON_TOL = 1e-5
MU_BRACKET = 0.2
MU_BRACKET_EXPANSIONS = 5
POTENTIAL_TOL = 1e-6


class FittingMode(StrEnum):
    """What the outer loop fits."""

    CHEMICAL_POTENTIAL = "mu"
    FRAGMENT_ONLY = "fragment-only"


@dataclass(frozen=True)
class FragmentRecord:
    """Energy share and electron count of one fragment; energy excludes core terms."""

    fragment_id: int
    energy: float
    n_electrons: float
    n_bath: int
    n_qubits: int


@dataclass(frozen=True)
class DMETTraceRecord:
    """One outer iteration of the DMET loop."""

    iteration: int
    mu: float
    cost: float
    e_total: float
    n_total: float
    fragments: tuple[FragmentRecord, ...]

    def to_line(self) -> str:
        """Render as a whitespace-separated trace line with fixed column order."""
        head = f"{self.iteration:4d} {self.mu: .10f} {self.cost:.6e} {self.e_total: .12f} {self.n_total:.8f}"
        tail = " ".join(f"{f.energy: .12f} {f.n_electrons:.8f}" for f in self.fragments)
        return f"{head} {tail}".rstrip()


@dataclass
class DMETState:
    """Result of a DMET run; energies in hartree."""

    mu: float
    u: np.ndarray
    cost: float
    iteration: int
    fragments: tuple[FragmentRecord, ...]
    e_total: float
    n_total: float
    converged: bool
    trace: list[DMETTraceRecord] = field(default_factory=list)

    @property
    def max_qubits(self) -> int:
        """Largest embedding register."""
        return max((f.n_qubits for f in self.fragments), default=0)

    def raise_if_unconverged(self) -> "DMETState":
        """Return self, or raise if the outer loop stopped before converging."""
        if not self.converged:
            raise DmetNotConvergedError(self.iteration, self.cost)
        return self

    def write_trace(self, path: Path | str) -> None:
        """Write the trace: iteration, mu, cost, E_total, N_total, then E_frag N_frag per fragment."""
        header = "# iter mu cost E_total N_total" + "".join(
            f" E_frag{f.fragment_id} N_frag{f.fragment_id}" for f in self.fragments
        )
        lines = [header, *(record.to_line() for record in self.trace)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class _Evaluation:
    mu: float
    n_total: float
    results: list[SolverResult]


class _ElectronCountReached(Exception):  # noqa: N818 - control flow, not an error
    def __init__(self, evaluation: _Evaluation) -> None:
        self.evaluation = evaluation


def _check_partition(fragments: Sequence[Sequence[int]], n_orb: int) -> None:
    flat = [i for frag in fragments for i in frag]
    if sorted(flat) != list(range(n_orb)) or any(not frag for frag in fragments):
        msg = f"orbital fragments {[list(f) for f in fragments]} do not partition 0..{n_orb - 1}"
        raise PlanError(msg)


def _solve_embeddings(
    problems: Sequence[EmbeddingProblem],
    mu: float,
    solver: SubproblemSolver,
    work_queue: WorkQueue | None,
) -> list[SolverResult]:
    def solve(problem: EmbeddingProblem) -> SolverResult:
        shifted = apply_chemical_potential(problem.integrals, mu, range(problem.n_fragment))
        result = solver.solve(Subproblem(f"dmet-frag{problem.fragment_id}", shifted, want_rdms=True))
        if result.rdms is None:
            msg = f"solver {solver.tag} returned no RDMs"
            raise EmbeddingError(problem.fragment_id, msg)
        return result

    outcomes = run_all([lambda p=p: solve(p) for p in problems], work_queue)
    for problem, outcome in zip(problems, outcomes, strict=True):
        if isinstance(outcome, Exception):
            logger.log(logging.ERROR, "Embedding problem of fragment %d failed: %s", problem.fragment_id, outcome)
            raise outcome
    return outcomes  # type: ignore[return-value]


def _electron_count(problems: Sequence[EmbeddingProblem], results: Sequence[SolverResult]) -> float:
    return math.fsum(
        fragment_energy_and_number(r.rdms, p)[1]  # type: ignore[arg-type]
        for p, r in zip(problems, results, strict=True)
    )


def fit_chemical_potential(
    problems: Sequence[EmbeddingProblem],
    solver: SubproblemSolver,
    n_electrons: int,
    *,
    electron_tol: float = ELECTRON_TOL,
    bracket: float = MU_BRACKET,
    max_iterations: int = 50,
    work_queue: WorkQueue | None = None,
) -> tuple[float, list[SolverResult], bool]:
    """Find mu with sum of fragment electron counts equal to ``n_electrons``.

    Starts from mu = 0, brackets the root in [-bracket, bracket] (doubling the
    interval up to five times) and refines it with Brent's method. Returns the
    chosen mu, the embedding results at that mu and whether the electron
    count is within ``electron_tol``; without a bracket the best mu seen is
    returned flagged.
    """
    evaluations: dict[float, _Evaluation] = {}

    def evaluate(mu: float) -> _Evaluation:
        if mu not in evaluations:
            results = _solve_embeddings(problems, mu, solver, work_queue)
            evaluations[mu] = _Evaluation(mu, _electron_count(problems, results), results)
            logger.log(logging.DEBUG, "mu=%.10f N=%.10f", mu, evaluations[mu].n_total)
        return evaluations[mu]

    def residual(mu: float) -> float:
        evaluation = evaluate(mu)
        error = evaluation.n_total - n_electrons
        if abs(error) < electron_tol:
            raise _ElectronCountReached(evaluation)
        return error

    try:
        residual(0.0)
        lo, hi = -bracket, bracket
        f_lo, f_hi = residual(lo), residual(hi)
        for _ in range(MU_BRACKET_EXPANSIONS):
            if f_lo * f_hi < 0:
                break
            lo, hi = 2 * lo, 2 * hi
            f_lo, f_hi = residual(lo), residual(hi)
        if f_lo * f_hi < 0:
            with contextlib.suppress(RuntimeError):
                root_scalar(residual, bracket=(lo, hi), method="brentq", xtol=1e-12, maxiter=max_iterations)
    except _ElectronCountReached as reached:
        return reached.evaluation.mu, reached.evaluation.results, True

    best = min(evaluations.values(), key=lambda e: abs(e.n_total - n_electrons))
    logger.log(
        logging.WARNING,
        "Chemical potential fit stopped at mu=%.8f with electron error %.3e",
        best.mu,
        best.n_total - n_electrons,
    )
    return best.mu, best.results, False


def _potential_matrix(params: np.ndarray, fragments: Sequence[Sequence[int]], n_orb: int) -> np.ndarray:
    u = np.zeros((n_orb, n_orb))
    offset = 0
    for frag in fragments:
        idx = list(frag)
        rows, cols = np.triu_indices(len(idx))
        block = np.zeros((len(idx), len(idx)))
        block[rows, cols] = params[offset : offset + len(rows)]
        block = block + np.triu(block, 1).T
        u[np.ix_(idx, idx)] = block
        offset += len(rows)
    return u


def _potential_params(u: np.ndarray, fragments: Sequence[Sequence[int]]) -> np.ndarray:
    parts = []
    for frag in fragments:
        block = u[np.ix_(list(frag), list(frag))]
        parts.append(block[np.triu_indices(len(frag))])
    return np.concatenate(parts) if parts else np.zeros(0)


def _mean_field_density(fock: np.ndarray, u: np.ndarray, n_occ: int) -> np.ndarray:
    return aufbau_density(fock + u, np.eye(fock.shape[0]), n_occ)[2]


def fragment_density_mismatch(
    density: np.ndarray,
    targets: Sequence[np.ndarray],
    fragments: Sequence[Sequence[int]],
) -> float:
    """Sum over fragments of the squared difference between fragment density blocks."""
    return math.fsum(
        float(np.sum((density[np.ix_(list(frag), list(frag))] - target) ** 2))
        for frag, target in zip(fragments, targets, strict=True)
    )


def fit_correlation_potential(
    fock: np.ndarray,
    n_occ: int,
    targets: Sequence[np.ndarray],
    fragments: Sequence[Sequence[int]],
    u0: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Fit symmetric fragment-block potentials so the mean-field fragment densities match ``targets``.

    Powell minimization of :func:`fragment_density_mismatch` over the upper
    triangles of the fragment blocks; returns the potential and the mismatch.
    """
    n_orb = fock.shape[0]

    def cost(params: np.ndarray) -> float:
        density = _mean_field_density(fock, _potential_matrix(params, fragments, n_orb), n_occ)
        return fragment_density_mismatch(density, targets, fragments)

    result = minimize(cost, _potential_params(u0, fragments), method="Powell", options={"xtol": 1e-8, "ftol": 1e-12})
    return _potential_matrix(np.atleast_1d(result.x), fragments, n_orb), float(result.fun)


def dmet_scf(  # noqa: C901, PLR0913, PLR0915 - one loop over the whole DMET procedure
    integrals: MOIntegrals,
    fragments: Sequence[Sequence[int]],
    solver: SubproblemSolver,
    *,
    fitting: FittingMode | str = FittingMode.CHEMICAL_POTENTIAL,
    electron_tol: float = ELECTRON_TOL,
    cost_tol: float = 1e-6,
    max_iterations: int = 50,
    mu_bracket: float = MU_BRACKET,
    work_queue: WorkQueue | None = None,
    events: RunEventManager | None = None,
) -> DMETState:
    """Run DMET over localized-orbital integrals.

    Every outer iteration builds a bath and an embedding Hamiltonian per
    fragment from the current mean-field density, fits the chemical potential
    so the fragment electron counts add up to the total, and assembles the
    energy by democratic partitioning. With ``fragment-only`` fitting, a
    correlation potential on the fragment blocks of the mean-field Hamiltonian
    is then refit to the high-level fragment densities and the loop repeats
    until the density mismatch falls below ``cost_tol``.

    Args:
        integrals: Full Hamiltonian over orthonormal localized orbitals.
        fragments: Orbital indices per fragment, partitioning all orbitals.
        solver: Embedding solver; must return RDMs.
        fitting: ``mu`` (single shot) or ``fragment-only``.
        electron_tol: Tolerance on the total electron count.
        cost_tol: Tolerance on the fragment density mismatch.
        max_iterations: Outer-iteration cap (and root-finder cap).
        mu_bracket: Initial half-width of the chemical-potential bracket.
        work_queue: Optional pool for the per-fragment solves.
        events: Optional event manager notified per outer iteration.

    Raises:
        PlanError: ``fragments`` do not partition the orbitals.
        EmbeddingError: An embedding space has an odd electron count or the
            solver returns no RDMs.

    """
    fitting = FittingMode(fitting)
    if max_iterations < 1:
        msg = f"max_iterations must be at least 1, got {max_iterations}"
        raise ValueError(msg)
    n_orb = integrals.n_orb
    n_e = integrals.n_elec
    _check_partition(fragments, n_orb)
    rhf = run_rhf(AOIntegrals.from_orthonormal(integrals), n_e)
    if not rhf.converged:
        logger.log(logging.WARNING, "DMET continues from an unconverged mean-field density")

    u = np.zeros((n_orb, n_orb))
    state: DMETState | None = None
    trace: list[DMETTraceRecord] = []
    for iteration in range(1, max_iterations + 1):
        density = rhf.density if not u.any() else _mean_field_density(rhf.fock, u, rhf.n_occ)
        problems = [embedding_problem(integrals, density, i, frag) for i, frag in enumerate(fragments)]
        mu, results, mu_converged = fit_chemical_potential(
            problems,
            solver,
            n_e,
            electron_tol=electron_tol,
            bracket=mu_bracket,
            max_iterations=max_iterations,
            work_queue=work_queue,
        )
        records = []
        for problem, result in zip(problems, results, strict=True):
            e_frag, n_frag = fragment_energy_and_number(result.rdms, problem)  # type: ignore[arg-type]
            records.append(FragmentRecord(problem.fragment_id, e_frag, n_frag, problem.bath.n_bath, result.n_qubits))
        e_total = math.fsum(r.energy for r in records) + integrals.e_core
        n_total = math.fsum(r.n_electrons for r in records)

        if fitting is FittingMode.CHEMICAL_POTENTIAL:
            cost = (n_total - n_e) ** 2
            converged = mu_converged
            new_u = u
        else:
            targets = [
                r.rdms.one_rdm[: p.n_fragment, : p.n_fragment]  # type: ignore[union-attr]
                for p, r in zip(problems, results, strict=True)
            ]
            cost = fragment_density_mismatch(density, targets, fragments)
            new_u, _ = fit_correlation_potential(rhf.fock, rhf.n_occ, targets, fragments, u)
            converged = mu_converged and (cost < cost_tol or float(np.max(np.abs(new_u - u))) < POTENTIAL_TOL)

        record = DMETTraceRecord(iteration, mu, cost, e_total, n_total, tuple(records))
        trace.append(record)
        logger.log(
            logging.DEBUG,
            "DMET iteration %d: mu=%.8f cost=%.3e E=%.12f N=%.8f",
            iteration,
            mu,
            cost,
            e_total,
            n_total,
        )
        if events is not None:
            events.trigger_dmet_iteration(DmetIterationEvent(iteration, mu, cost, e_total, n_total))
        state = DMETState(mu, u, cost, iteration, tuple(records), e_total, n_total, converged, trace)
        if converged or fitting is FittingMode.CHEMICAL_POTENTIAL:
            break
        u = new_u

    assert state is not None  # noqa: S101 - the loop runs at least once
    if state.converged:
        logger.log(
            logging.INFO,
            "DMET converged in %d iterations: E=%.12f mu=%.8f",
            state.iteration,
            state.e_total,
            state.mu,
        )
    else:
        logger.log(
            logging.WARNING,
            "DMET not converged after %d iterations (cost %.3e)",
            state.iteration,
            state.cost,
        )
    return state


def run_dmet(
    geometry: Geometry,
    plan: FragmentationPlan,
    solver: SubproblemSolver,
    **options: object,
) -> DMETState:
    """Localize the AO basis of ``geometry`` by ``plan``'s atom fragments and run :func:`dmet_scf`.

    Keyword options are passed through to :func:`dmet_scf`.
    """
    geometry.require_closed_shell()
    plan.validate(geometry)
    ao = build_ao_integrals(geometry)
    orbitals = localize_orbitals(ao, plan.fragment_of)
    mo = localized_integrals(ao, orbitals, geometry.n_electrons)
    return dmet_scf(mo, orbitals.fragments, solver, **options)  # type: ignore[arg-type]
