"""The ADAPT-VQE outer loop: gradient screening, operator selection and re-optimization."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from fragvqe.concurrency import WorkQueue, run_all
from fragvqe.errors import AdaptPoolEmptyError, ConfigError
from fragvqe.hamiltonian.pauli import PauliSum
from fragvqe.simulator.statevector import Statevector, expectation, prepare_hf_state, variance

from .optimizer import DEFAULT_TOLERANCE, Ansatz, optimize_parameters
from .pools import OperatorPool

logger = logging.getLogger(__name__)

GRADIENT_CHUNK = 32


@dataclass(frozen=True)
class ConvergenceSpec:
    """Stopping rules of the ADAPT loop.

    Args:
        grad_norm_eps: Stop when the 2-norm of the pool gradient falls below this.
        variance_eps: Stop when <H^2> - <H>^2 (hartree^2) falls below this.
        max_iterations: Maximum number of operators added.
        optimizer_tol: Gradient infinity-norm target of the inner optimizer.

    """

    grad_norm_eps: float = 1e-3
    variance_eps: float = 0.01
    max_iterations: int = 50
    optimizer_tol: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        """Reject non-positive thresholds."""
        for name in ("grad_norm_eps", "variance_eps", "max_iterations", "optimizer_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError("must be positive", name)


@dataclass(frozen=True)
class AdaptTraceRecord:
    """State of the wave function after ``iteration`` operators were added."""

    iteration: int
    operator: str
    grad_norm: float
    energy: float
    variance: float
    note: str = ""

    def to_line(self) -> str:
        """Return a fixed-column text record."""
        line = (
            f"{self.iteration:4d} {self.energy:.12f} {self.grad_norm:.6e} "
            f"{self.variance:.6e} {self.operator or '-'}"
        )
        return f"{line} # {self.note}" if self.note else line


@dataclass(frozen=True, eq=False)
class AdaptResult:
    """Final energy, ansatz and per-iteration trace of an ADAPT run."""

    energy: float
    ansatz: Ansatz
    trace: list[AdaptTraceRecord] = field(default_factory=list)
    converged: bool = False
    reason: str = ""

    @property
    def state(self) -> Statevector:
        """The optimized ansatz state."""
        return self.ansatz.prepare()

    @property
    def n_iterations(self) -> int:
        """Number of operators in the final ansatz."""
        return len(self.ansatz)

    def write_trace(self, path: Path | str) -> None:
        """Write the trace as line-oriented records."""
        header = "# iter energy_hartree grad_norm variance operator"
        lines = [header, *(r.to_line() for r in self.trace)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def pool_gradients(
    state: Statevector,
    h: PauliSum,
    pool: OperatorPool,
    work_queue: WorkQueue | None = None,
) -> np.ndarray:
    """Return R_i = <psi|[H, tau_i]|psi> = 2 Re <H psi|tau_i psi> for every pool operator.

    With a work queue, operators are evaluated in chunks on the workers over
    the same read-only state.
    """
    psi = state.amplitudes
    h_psi = h.apply(psi)
    operators = pool.operators

    def chunk(start: int) -> np.ndarray:
        return np.array(
            [2.0 * np.vdot(h_psi, op.apply(psi)).real for op in operators[start : start + GRADIENT_CHUNK]],
        )

    starts = range(0, len(operators), GRADIENT_CHUNK)
    if work_queue is None:
        parts = [chunk(i) for i in starts]
    else:
        parts = run_all([lambda i=i: chunk(i) for i in starts], work_queue)
        for part in parts:
            if isinstance(part, Exception):
                raise part
    return np.concatenate(parts) if parts else np.zeros(0)


def _select(gradients: np.ndarray, previous: int | None, tol: float) -> int:
    """Largest |R_i|, lowest index first; the previous pick is skipped when its gradient is below tol."""
    magnitude = np.abs(gradients)
    if previous is not None and magnitude[previous] < tol:
        magnitude = magnitude.copy()
        magnitude[previous] = -1.0
    return int(np.argmax(magnitude))


def adapt_vqe(
    h: PauliSum,
    pool: OperatorPool,
    conv: ConvergenceSpec | None = None,
    *,
    reference: Statevector | None = None,
    work_queue: WorkQueue | None = None,
) -> AdaptResult:
    """Grow an ansatz one operator at a time until a stopping rule fires.

    Args:
        h: Hermitian qubit Hamiltonian.
        pool: Operator pool; its width must match h.
        conv: Stopping rules; defaults to ConvergenceSpec().
        reference: Reference state; defaults to the Hartree-Fock determinant
            with pool.n_elec electrons.
        work_queue: Optional queue for pool-gradient evaluation.

    Raises:
        AdaptPoolEmptyError: The pool has no operators.

    """
    conv = conv or ConvergenceSpec()
    if len(pool) == 0:
        raise AdaptPoolEmptyError(str(pool.kind))
    if pool.n_qubits != h.n_qubits:
        msg = f"pool acts on {pool.n_qubits} qubits, Hamiltonian on {h.n_qubits}"
        raise ValueError(msg)
    if reference is None:
        reference = prepare_hf_state(pool.n_qubits, pool.n_elec)

    ansatz = Ansatz(reference)
    state = reference
    energy = expectation(state, h)
    var = variance(state, h)
    trace: list[AdaptTraceRecord] = []
    previous: int | None = None
    note = ""
    reason = "max_iterations"
    converged = False

    for iteration in range(conv.max_iterations + 1):
        gradients = pool_gradients(state, h, pool, work_queue)
        grad_norm = float(np.linalg.norm(gradients))
        label = ansatz.operators[-1].label if len(ansatz) else ""
        trace.append(AdaptTraceRecord(iteration, label, grad_norm, energy, var, note))
        logger.log(
            logging.DEBUG,
            "ADAPT %d: E=%.12f |R|=%.3e var=%.3e %s",
            iteration,
            energy,
            grad_norm,
            var,
            label,
        )
        if grad_norm < conv.grad_norm_eps:
            reason, converged = "gradient", True
            break
        if var < conv.variance_eps:
            reason, converged = "variance", True
            break
        if iteration == conv.max_iterations:
            break

        previous = _select(gradients, previous, conv.optimizer_tol)
        ansatz = ansatz.append(pool[previous])
        result = optimize_parameters(h, ansatz, tol=conv.optimizer_tol)
        note = "" if result.converged else f"optimizer stalled: {result.message}"
        ansatz = ansatz.with_parameters(result.parameters)
        state = ansatz.prepare()
        energy = result.energy
        var = variance(state, h)

    if not converged:
        logger.log(
            logging.WARNING,
            "ADAPT stopped after %d operators without meeting its thresholds (E=%.12f)",
            len(ansatz),
            energy,
        )
    return AdaptResult(energy, ansatz, trace, converged, reason)
