"""Spin-summed one- and two-particle reduced density matrices of a statevector.

The two-particle matrix is indexed like the chemists' integrals, so that

    E = e_core + sum_pq h_pq D_pq + 1/2 sum_pqrs (pq|rs) Gamma_pqrs,
    Gamma_pqrs = sum_{sigma,tau} < a+_{p sigma} a+_{r tau} a_{s tau} a_{q sigma} >.
"""

import logging
from dataclasses import dataclass

import numpy as np

from fragvqe.integrals.mo import MOIntegrals

from .statevector import Statevector

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RDMs:
    """Spatial-orbital 1-RDM D_pq and 2-RDM Gamma_pqrs."""

    one_rdm: np.ndarray
    two_rdm: np.ndarray

    @property
    def n_orb(self) -> int:
        """Number of spatial orbitals."""
        return self.one_rdm.shape[0]

    @property
    def n_electrons(self) -> float:
        """Trace of the 1-RDM."""
        return float(np.trace(self.one_rdm))

    def rotated(self, u: np.ndarray) -> "RDMs":
        """Express the matrices in the orbital basis phi' = phi u."""
        one = u.T @ self.one_rdm @ u
        two = np.einsum("pqrs,pi,qj,rk,sl->ijkl", self.two_rdm, u, u, u, u, optimize=True)
        return RDMs(one, two)


def annihilate(psi: np.ndarray, n_qubits: int, mode: int) -> np.ndarray:
    """Return a_mode psi under the Jordan-Wigner convention (parity of lower modes)."""
    index = np.arange(1 << n_qubits, dtype=np.int64)
    bit = 1 << mode
    occupied = index[(index & bit) != 0]
    sign = 1 - 2 * (np.bitwise_count(occupied & (bit - 1)).astype(np.int64) & 1)
    out = np.zeros_like(psi)
    out[occupied ^ bit] = sign * psi[occupied]
    return out


def _pair_row(single: np.ndarray, n_qubits: int) -> np.ndarray:
    """Stack a_l (a_k psi) over every mode l, given single = a_k psi."""
    return np.stack([annihilate(single, n_qubits, mode) for mode in range(n_qubits)])


def compute_rdms(state: Statevector, n_orb: int) -> RDMs:
    """Spin-summed RDMs of a statevector over n_orb interleaved spatial orbitals.

    At most three n x 2^n blocks are held at once.

    Args:
        state: Statevector on 2 * n_orb qubits.
        n_orb: Number of spatial orbitals.

    """
    n = state.n_qubits
    if n != 2 * n_orb:
        msg = f"state has {n} qubits, expected {2 * n_orb} for {n_orb} spatial orbitals"
        raise ValueError(msg)
    psi = state.amplitudes
    singles = np.stack([annihilate(psi, n, k) for k in range(n)])
    gamma = singles.conj() @ singles.T
    one = np.einsum("pxqx->pq", gamma.reshape(n_orb, 2, n_orb, 2))

    # g[i, j, k, l] = <a_j a_i psi | a_l a_k psi> = <a+_i a+_j a_l a_k>
    g = np.empty((n, n, n, n), dtype=np.result_type(psi.dtype, np.complex128))
    for k in range(n):
        row_k = _pair_row(singles[k], n)
        g[k, :, k, :] = row_k.conj() @ row_k.T
        for i in range(k):
            block = _pair_row(singles[i], n).conj() @ row_k.T
            g[i, :, k, :] = block
            g[k, :, i, :] = block.conj().T
    two = np.einsum("pxryqxsy->pqrs", g.reshape((n_orb, 2) * 4))
    logger.log(
        logging.DEBUG,
        "RDMs on %d orbitals: trace %.10f",
        n_orb,
        float(np.trace(one).real),
    )
    return RDMs(one.real, two.real)


def rdm_energy(rdms: RDMs, mo: MOIntegrals) -> float:
    """Return e_core + sum h D + 1/2 sum v Gamma."""
    return float(
        mo.e_core
        + np.einsum("pq,pq->", mo.h, rdms.one_rdm)
        + 0.5 * np.einsum("pqrs,pqrs->", mo.v, rdms.two_rdm),
    )
