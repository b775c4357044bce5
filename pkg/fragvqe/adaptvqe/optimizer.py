"""ADAPT ansatz evaluation and inner-loop parameter optimization.

Energies and gradients come from one forward sweep through the chain of
Pauli rotations and one backward sweep carrying H|psi> (adjoint
differentiation). Each pool operator contributes one rotation per Pauli
string of its generator, all sharing the operator's parameter.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from fragvqe.errors import OptimizerStalledError
from fragvqe.hamiltonian.pauli import PauliSum, pauli_action
from fragvqe.simulator.statevector import Statevector, apply_rotation

from .pools import PoolOperator

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-7
DEFAULT_MAX_ITERATIONS = 2000


@dataclass(frozen=True, eq=False)
class Ansatz:
    """Ordered pool operators with their parameters, applied to a reference state.

    The first operator acts first: psi = exp(t_k tau_k) ... exp(t_1 tau_1) |ref>.
    """

    reference: Statevector
    operators: tuple[PoolOperator, ...] = ()
    parameters: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        """Check that every operator has a parameter."""
        if len(self.operators) != len(self.parameters):
            msg = f"{len(self.operators)} operators but {len(self.parameters)} parameters"
            raise ValueError(msg)

    def __len__(self) -> int:
        """Return the number of steps."""
        return len(self.operators)

    @property
    def labels(self) -> list[str]:
        """Labels of the operators in application order."""
        return [op.label for op in self.operators]

    def append(self, operator: PoolOperator, theta: float = 0.0) -> "Ansatz":
        """Return a new ansatz with one more step."""
        return Ansatz(self.reference, (*self.operators, operator), (*self.parameters, theta))

    def with_parameters(self, parameters: np.ndarray | tuple[float, ...]) -> "Ansatz":
        """Return the same operators with new parameters."""
        return Ansatz(self.reference, self.operators, tuple(float(t) for t in parameters))

    def prepare(self, parameters: np.ndarray | None = None) -> Statevector:
        """Return the ansatz state for the given (or stored) parameters."""
        thetas = self.parameters if parameters is None else parameters
        psi = self.reference.amplitudes
        n = self.reference.n_qubits
        for op, theta in zip(self.operators, thetas, strict=True):
            for x, z, r in op.rotations:
                psi = apply_rotation(psi, n, x, z, theta * r)
        return Statevector(n, psi.copy() if psi is self.reference.amplitudes else psi)


def energy_and_gradient(h: PauliSum, ansatz: Ansatz, parameters: np.ndarray) -> tuple[float, np.ndarray]:
    """Return E(theta) and dE/dtheta by adjoint differentiation."""
    n = ansatz.reference.n_qubits
    gates = [
        (k, x, z, r, theta * r)
        for k, (op, theta) in enumerate(zip(ansatz.operators, parameters, strict=True))
        for x, z, r in op.rotations
    ]
    psi = ansatz.reference.amplitudes
    for _, x, z, _, angle in gates:
        psi = apply_rotation(psi, n, x, z, angle)
    lam = h.apply(psi)
    energy = float(np.vdot(psi, lam).real)
    grad = np.zeros(len(ansatz))
    for k, x, z, r, angle in reversed(gates):
        perm, phase = pauli_action(n, x, z)
        # dE/d(angle) = 2 Re <lam | i P psi> with psi the state after this gate
        grad[k] += r * 2.0 * float(np.vdot(lam, 1j * phase * psi[perm]).real)
        psi = apply_rotation(psi, n, x, z, -angle)
        lam = apply_rotation(lam, n, x, z, -angle)
    return energy, grad


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """Best parameters found, with the optimizer's verdict."""

    parameters: np.ndarray
    energy: float
    converged: bool
    gradient_norm: float
    n_evaluations: int
    message: str = ""
    history: list[float] = field(default_factory=list)

    def raise_if_unconverged(self) -> None:
        """Raise OptimizerStalledError when the optimizer stalled."""
        if not self.converged:
            raise OptimizerStalledError(self.message, self.gradient_norm)


class _BestPoint:
    """Objective wrapper remembering the lowest energy evaluated."""

    def __init__(self, h: PauliSum, ansatz: Ansatz) -> None:
        self.h = h
        self.ansatz = ansatz
        self.energy = np.inf
        self.parameters: np.ndarray | None = None
        self.gradient: np.ndarray | None = None
        self.history: list[float] = []

    def __call__(self, parameters: np.ndarray) -> tuple[float, np.ndarray]:
        energy, grad = energy_and_gradient(self.h, self.ansatz, parameters)
        self.history.append(energy)
        if energy < self.energy:
            self.energy = energy
            self.parameters = np.array(parameters, dtype=float)
            self.gradient = grad
        return energy, grad


def optimize_parameters(
    h: PauliSum,
    ansatz: Ansatz,
    theta0: np.ndarray | None = None,
    *,
    tol: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> OptimizationResult:
    """Minimize <psi(theta)|H|psi(theta)> with BFGS and analytic gradients.

    The returned point is the lowest energy evaluated, so it is never worse
    than theta0. When BFGS stops before the gradient infinity-norm falls below
    tol, the result is flagged unconverged and a warning is logged.

    Args:
        h: Hermitian Hamiltonian.
        ansatz: Operators to optimize; their stored parameters are the default start.
        theta0: Starting parameters.
        tol: Gradient infinity-norm target.
        max_iterations: BFGS iteration cap.

    """
    x0 = np.asarray(ansatz.parameters if theta0 is None else theta0, dtype=float)
    if x0.shape != (len(ansatz),):
        msg = f"theta0 has shape {x0.shape}, ansatz has {len(ansatz)} steps"
        raise ValueError(msg)
    if len(ansatz) == 0:
        energy, _ = energy_and_gradient(h, ansatz, x0)
        return OptimizationResult(x0, energy, True, 0.0, 1, "empty ansatz", [energy])

    objective = _BestPoint(h, ansatz)
    res = scipy.optimize.minimize(
        objective,
        x0,
        jac=True,
        method="BFGS",
        options={"gtol": tol, "maxiter": max_iterations},
    )
    gradient_norm = float(np.max(np.abs(objective.gradient)))
    converged = bool(res.success) or gradient_norm < tol
    if not converged:
        logger.log(
            logging.WARNING,
            "Parameter optimization stalled after %d evaluations: %s (|g|inf=%.3e)",
            len(objective.history),
            res.message,
            gradient_norm,
        )
    logger.log(
        logging.DEBUG,
        "BFGS over %d parameters: E=%.12f, |g|inf=%.3e, %d evaluations",
        len(ansatz),
        objective.energy,
        gradient_norm,
        len(objective.history),
    )
    return OptimizationResult(
        objective.parameters,
        objective.energy,
        converged,
        gradient_norm,
        len(objective.history),
        str(res.message),
        objective.history,
    )
