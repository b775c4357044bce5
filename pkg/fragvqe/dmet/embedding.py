"""Interacting-bath embedding Hamiltonians and the chemical-potential shift."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from fragvqe.integrals.mo import MOIntegrals, transform_eri
from fragvqe.integrals.scf import coulomb_exchange

from .bath import Bath, build_bath

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddingProblem:
    """One fragment's embedding problem.

    ``integrals`` is the embedding Hamiltonian without chemical potential;
    ``h_bare`` is the undressed one-electron matrix in the same basis and
    ``env_density`` the mean-field density left outside the embedding space.
    """

    fragment_id: int
    bath: Bath
    integrals: MOIntegrals
    h_bare: np.ndarray
    env_density: np.ndarray

    @property
    def n_fragment(self) -> int:
        """Number of fragment orbitals (the leading embedding orbitals)."""
        return self.bath.n_fragment

    @property
    def dressing(self) -> np.ndarray:
        """Environment Coulomb minus exchange field in the embedding basis."""
        return self.integrals.h - self.h_bare


def environment_density(density: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Project the density onto the complement of the embedding space."""
    q = np.eye(density.shape[0]) - basis @ basis.T
    return q @ density @ q


def build_embedding_hamiltonian(
    mo: MOIntegrals,
    basis: np.ndarray,
    env_density: np.ndarray,
    n_emb_elec: int,
) -> MOIntegrals:
    """Project the Hamiltonian onto the embedding space, dressed by the environment.

    ``h~ = B^T (h + J[D_env] - K[D_env]/2) B``, the two-electron integrals are
    rotated into the embedding basis, and the environment's mean-field energy
    is added to ``e_core`` so that the embedding mean-field energy equals the
    full-system one.
    """
    j, k = coulomb_exchange(mo.v, env_density)
    h_eff = mo.h + j - 0.5 * k
    e_core = mo.e_core + 0.5 * float(np.sum(env_density * (mo.h + h_eff)))
    return MOIntegrals(basis.shape[1], n_emb_elec, basis.T @ h_eff @ basis, transform_eri(mo.v, basis), e_core)


def embedding_problem(
    mo: MOIntegrals,
    density: np.ndarray,
    fragment_id: int,
    fragment_orbitals: Sequence[int],
) -> EmbeddingProblem:
    """Build bath and embedding Hamiltonian of one fragment from a mean-field density."""
    bath = build_bath(density, fragment_orbitals, fragment_id=fragment_id)
    env = environment_density(density, bath.basis)
    integrals = build_embedding_hamiltonian(mo, bath.basis, env, bath.n_emb_elec)
    return EmbeddingProblem(fragment_id, bath, integrals, bath.basis.T @ mo.h @ bath.basis, env)


def apply_chemical_potential(integrals: MOIntegrals, mu: float, orbitals: Sequence[int]) -> MOIntegrals:
    """Return integrals with ``-mu`` added to the diagonal of ``h`` on the given orbitals."""
    if mu == 0.0:
        return integrals
    h = integrals.h.copy()
    idx = list(orbitals)
    h[idx, idx] -= mu
    return integrals.with_h(h)
