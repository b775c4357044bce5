"""Determinant-space CASCI: exact diagonalization over alpha x beta occupation strings.

This is the reference oracle for active spaces too large for the Pauli-sector
diagonalizer. The sigma vector uses single-replacement tables E_pq on each
spin string:

    sigma = sum_pq k_pq (E_pq c) + 1/2 sum_pq E_pq G_pq + e_core c,
    G_pq = sum_rs (pq|rs) E_rs c,  k_pq = h_pq - 1/2 sum_r (pr|rq).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from fragvqe.integrals.mo import MOIntegrals

from .rdm import RDMs
from .statevector import Statevector

logger = logging.getLogger(__name__)

DENSE_CI_LIMIT = 400
EIGSH_TOL = 1e-12


@lru_cache(maxsize=64)
def occupation_strings(n_orb: int, n_occ: int) -> tuple[int, ...]:
    """All n_occ-electron bitstrings over n_orb orbitals in lexicographic order."""
    return tuple(sum(1 << p for p in occ) for occ in combinations(range(n_orb), n_occ))


@lru_cache(maxsize=64)
def replacement_tables(n_orb: int, n_occ: int) -> tuple[scipy.sparse.csr_matrix, ...]:
    """Sparse matrices of a+_p a_q on one spin's strings, indexed p * n_orb + q."""
    strings = occupation_strings(n_orb, n_occ)
    position = {s: i for i, s in enumerate(strings)}
    dim = len(strings)
    tables = []
    for p in range(n_orb):
        for q in range(n_orb):
            rows, cols, vals = [], [], []
            for i, s in enumerate(strings):
                if not (s >> q) & 1:
                    continue
                removed = s ^ (1 << q)
                if (removed >> p) & 1:
                    continue
                sign = (-1) ** ((s & ((1 << q) - 1)).bit_count() + (removed & ((1 << p) - 1)).bit_count())
                rows.append(position[removed | (1 << p)])
                cols.append(i)
                vals.append(float(sign))
            tables.append(scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(dim, dim)))
    return tuple(tables)


def _spin_counts(mo: MOIntegrals) -> tuple[int, int]:
    n_alpha = (mo.n_elec + mo.ms2) // 2
    return n_alpha, mo.n_elec - n_alpha


@dataclass(frozen=True, eq=False)
class CasciSolution:
    """Ground state of an active space as a CI matrix c[alpha string, beta string]."""

    energy: float
    ci: np.ndarray
    n_orb: int
    n_elec: int
    ms2: int
    rdms: RDMs | None = None

    def to_statevector(self) -> Statevector:
        """Embed the CI vector in the interleaved Jordan-Wigner qubit register.

        A determinant a+_alpha... a+_beta... |vac> reorders into ascending mode
        order with sign (-1)^{#(p in alpha, q in beta, p > q)}.
        """
        n = self.n_orb
        n_alpha = (self.n_elec + self.ms2) // 2
        alpha = np.array(occupation_strings(n, n_alpha), dtype=np.int64)
        beta = np.array(occupation_strings(n, self.n_elec - n_alpha), dtype=np.int64)
        alpha_q = np.zeros_like(alpha)
        beta_q = np.zeros_like(beta)
        inversions = np.zeros((alpha.size, beta.size), dtype=np.int64)
        for p in range(n):
            has_a = (alpha >> p) & 1
            has_b = (beta >> p) & 1
            alpha_q |= has_a << (2 * p)
            beta_q |= has_b << (2 * p + 1)
            below = np.bitwise_count(beta & ((1 << p) - 1)).astype(np.int64)
            inversions += np.outer(has_a, below)
        index = (alpha_q[:, None] | beta_q[None, :]).ravel()
        amps = np.zeros(1 << (2 * n), dtype=complex)
        amps[index] = (self.ci * (1 - 2 * (inversions & 1))).ravel()
        return Statevector.from_unnormalized(2 * n, amps)


class _SigmaBuilder:
    """Applies the active-space Hamiltonian to CI matrices."""

    def __init__(self, mo: MOIntegrals) -> None:
        n = mo.n_orb
        n_alpha, n_beta = _spin_counts(mo)
        self.n = n
        self.shape = (len(occupation_strings(n, n_alpha)), len(occupation_strings(n, n_beta)))
        self.alpha = replacement_tables(n, n_alpha)
        self.beta = replacement_tables(n, n_beta)
        self.k = (mo.h - 0.5 * np.einsum("prrq->pq", mo.v)).ravel()
        self.v2 = mo.v.reshape(n * n, n * n)
        self.e_core = mo.e_core

    def replacements(self, c: np.ndarray) -> np.ndarray:
        """Stack of E_pq c for every pq, shape (n^2, n_alpha_str, n_beta_str)."""
        return np.stack([a @ c + (b @ c.T).T for a, b in zip(self.alpha, self.beta, strict=True)])

    def sigma(self, c: np.ndarray) -> np.ndarray:
        d = self.replacements(c)
        g = (self.v2 @ d.reshape(self.n * self.n, -1)).reshape(d.shape)
        out = self.e_core * c + np.tensordot(self.k, d, axes=1)
        for pq, (a, b) in enumerate(zip(self.alpha, self.beta, strict=True)):
            out += 0.5 * (a @ g[pq] + (b @ g[pq].T).T)
        return out


def _rdms_from_ci(builder: _SigmaBuilder, c: np.ndarray) -> RDMs:
    n = builder.n
    d = builder.replacements(c).reshape(n * n, -1)
    flat = c.ravel()
    one = (d @ flat).reshape(n, n)
    # Gamma_pqrs = <E_pq E_rs> - delta_qr D_ps, and <E_pq E_rs> = (E_qp c).(E_rs c)
    pair = (d @ d.T).reshape(n, n, n, n).transpose(1, 0, 2, 3)
    two = pair - np.einsum("qr,ps->pqrs", np.eye(n), one)
    return RDMs(0.5 * (one + one.T), two)


def casci(mo: MOIntegrals, *, want_rdms: bool = False) -> CasciSolution:
    """Exact ground state of the active-space Hamiltonian in the (n_alpha, n_beta) sector."""
    n = mo.n_orb
    if n == 0:
        rdms = RDMs(np.zeros((0, 0)), np.zeros((0, 0, 0, 0))) if want_rdms else None
        return CasciSolution(mo.e_core, np.ones((1, 1)), 0, mo.n_elec, mo.ms2, rdms)
    builder = _SigmaBuilder(mo)
    dim = builder.shape[0] * builder.shape[1]
    if dim <= DENSE_CI_LIMIT:
        eye = np.eye(dim)
        matrix = np.column_stack([builder.sigma(eye[:, i].reshape(builder.shape)).ravel() for i in range(dim)])
        w, v = np.linalg.eigh(0.5 * (matrix + matrix.T))
        energy, vec = float(w[0]), v[:, 0]
    else:
        op = scipy.sparse.linalg.LinearOperator(
            (dim, dim),
            matvec=lambda x: builder.sigma(np.asarray(x).reshape(builder.shape)).ravel(),
            dtype=float,
        )
        v0 = np.full(dim, 1e-2)
        v0[0] = 1.0
        w, v = scipy.sparse.linalg.eigsh(op, k=1, which="SA", v0=v0, tol=EIGSH_TOL)
        energy, vec = float(w[0]), v[:, 0]
    ci = vec.reshape(builder.shape)
    lead = ci.ravel()[np.argmax(np.abs(ci))]
    ci = ci * np.sign(lead) / np.linalg.norm(ci)
    logger.log(
        logging.DEBUG,
        "CASCI(%de,%do): dimension %d, E=%.12f",
        mo.n_elec,
        n,
        dim,
        energy,
    )
    rdms = _rdms_from_ci(builder, ci) if want_rdms else None
    return CasciSolution(energy, ci, n, mo.n_elec, mo.ms2, rdms)
