"""Exact diagonalization of qubit Hamiltonians, optionally restricted to an (N, S_z) sector."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from fragvqe.errors import DimensionTooLargeError
from fragvqe.hamiltonian.pauli import PauliSum

from .statevector import Statevector

logger = logging.getLogger(__name__)

MAX_QUBITS = 24
DENSE_LIMIT = 4096
EIGSH_TOL = 1e-12


@dataclass(frozen=True)
class Sector:
    """Particle-number and spin-projection sector; two_sz = n_alpha - n_beta."""

    n_electrons: int
    two_sz: int = 0


@dataclass(frozen=True, eq=False)
class ExactSolution:
    """Lowest eigenpair of a Hamiltonian, with the sector it was searched in."""

    energy: float
    ground_state: Statevector
    sector: Sector | None


def sector_indices(n_qubits: int, sector: Sector) -> np.ndarray:
    """Basis-state indices with the sector's electron count and spin projection.

    Even qubits are alpha spin orbitals, odd qubits beta.
    """
    index = np.arange(1 << n_qubits, dtype=np.int64)
    alpha_mask = sum(1 << q for q in range(0, n_qubits, 2))
    beta_mask = sum(1 << q for q in range(1, n_qubits, 2))
    n_alpha = np.bitwise_count(index & alpha_mask).astype(np.int64)
    n_beta = np.bitwise_count(index & beta_mask).astype(np.int64)
    keep = (n_alpha + n_beta == sector.n_electrons) & (n_alpha - n_beta == sector.two_sz)
    return index[keep]


def restricted_matrix(h: PauliSum, basis: np.ndarray) -> scipy.sparse.csr_matrix:
    """Matrix of H between the given basis states; couplings leaving the set are dropped."""
    dim = basis.size
    lookup = np.full(1 << h.n_qubits, -1, dtype=np.int64)
    lookup[basis] = np.arange(dim)
    groups: dict[int, list[tuple[int, complex]]] = {}
    for string, coef in h.terms.items():
        groups.setdefault(string.x, []).append((string.z, coef))
    rows, cols, data = [], [], []
    phases = (1, 1j, -1, -1j)
    for x, entries in groups.items():
        weights = np.zeros(dim, dtype=complex)
        for z, coef in entries:
            sign = 1 - 2 * (np.bitwise_count(basis & z).astype(np.int64) & 1)
            weights += coef * phases[(x & z).bit_count() % 4] * sign
        target = lookup[basis ^ x]
        keep = (target >= 0) & (np.abs(weights) > 0)
        rows.append(target[keep])
        cols.append(np.arange(dim)[keep])
        data.append(weights[keep])
    if not rows:
        return scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    return scipy.sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )


def lowest_eigenpair(matrix: scipy.sparse.spmatrix) -> tuple[float, np.ndarray]:
    """Dense eigh up to DENSE_LIMIT, Lanczos (eigsh) beyond."""
    dim = matrix.shape[0]
    if dim <= DENSE_LIMIT:
        dense = matrix.toarray()
        w, v = np.linalg.eigh(0.5 * (dense + dense.conj().T))
        return float(w[0]), v[:, 0]
    v0 = np.linspace(1.0, 2.0, dim).astype(complex)
    w, v = scipy.sparse.linalg.eigsh(matrix, k=1, which="SA", v0=v0, tol=EIGSH_TOL)
    return float(w[0]), v[:, 0]


def exact_ground_state(h: PauliSum, sector: Sector | None = None) -> ExactSolution:
    """Lowest eigenvalue of H, restricted to a sector when given.

    Raises:
        DimensionTooLargeError: More than 24 qubits.

    """
    n = h.n_qubits
    if n > MAX_QUBITS:
        raise DimensionTooLargeError(n, MAX_QUBITS)
    if sector is None:
        basis = np.arange(1 << n, dtype=np.int64)
    else:
        basis = sector_indices(n, sector)
        if basis.size == 0:
            msg = f"sector {sector} is empty on {n} qubits"
            raise ValueError(msg)
    energy, vec = lowest_eigenpair(restricted_matrix(h, basis))
    amps = np.zeros(1 << n, dtype=complex)
    amps[basis] = vec
    # fix the global phase so the largest amplitude is real and positive
    lead = amps[np.argmax(np.abs(amps))]
    amps *= abs(lead) / lead
    logger.log(
        logging.DEBUG,
        "Exact ground state on %d qubits (dim %d): E=%.12f",
        n,
        basis.size,
        energy,
    )
    return ExactSolution(energy, Statevector.from_unnormalized(n, amps), sector)
