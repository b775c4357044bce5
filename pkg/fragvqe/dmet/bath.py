"""Bath orbitals from the fragment-environment block of the mean-field density."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from fragvqe.errors import EmbeddingError

logger = logging.getLogger(__name__)

BATH_SINGULAR_VALUE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Bath:
    """Embedding basis of one fragment: fragment orbitals first, bath orbitals after.

    ``basis`` is an (n_orb, n_fragment + n_bath) matrix with orthonormal
    columns over the localized orbitals.
    """

    fragment_orbitals: tuple[int, ...]
    basis: np.ndarray
    singular_values: np.ndarray
    n_emb_elec: int

    @property
    def n_fragment(self) -> int:
        """Number of fragment orbitals."""
        return len(self.fragment_orbitals)

    @property
    def n_bath(self) -> int:
        """Number of bath orbitals."""
        return self.basis.shape[1] - self.n_fragment


def build_bath(
    density: np.ndarray,
    fragment_orbitals: Sequence[int],
    *,
    threshold: float = BATH_SINGULAR_VALUE_TOL,
    fragment_id: int = 0,
) -> Bath:
    """Construct the bath of a fragment from the SVD of the environment x fragment density block.

    Left singular vectors of ``D[env, frag] / 2`` whose singular value exceeds
    ``threshold`` become bath orbitals, so there are at most as many bath as
    fragment orbitals. The embedding electron count is the rounded trace of
    the density projected onto fragment plus bath.

    Args:
        density: Spin-summed mean-field 1-RDM over the localized orbitals.
        fragment_orbitals: Localized-orbital indices of the fragment.
        threshold: Singular values at or below it are dropped.
        fragment_id: Fragment id used in error messages.

    Raises:
        EmbeddingError: The embedding space would hold an odd electron count.

    """
    n = density.shape[0]
    frag = tuple(fragment_orbitals)
    env = [i for i in range(n) if i not in set(frag)]
    basis = np.zeros((n, len(frag)))
    basis[list(frag), range(len(frag))] = 1.0
    singular = np.zeros(0)
    if env and frag:
        u, singular, _ = np.linalg.svd(0.5 * density[np.ix_(env, frag)], full_matrices=False)
        keep = singular > threshold
        bath = np.zeros((n, int(keep.sum())))
        bath[env, :] = u[:, keep]
        basis = np.hstack([basis, bath])

    occupancy = float(np.trace(basis.T @ density @ basis))
    n_emb_elec = round(occupancy)
    if n_emb_elec % 2:
        msg = f"embedding space holds an odd electron count ({occupancy:.6f})"
        raise EmbeddingError(fragment_id, msg)
    logger.log(
        logging.DEBUG,
        "Fragment %d: %d orbitals, %d bath orbitals, %d embedding electrons",
        fragment_id,
        len(frag),
        basis.shape[1] - len(frag),
        n_emb_elec,
    )
    return Bath(frag, basis, singular, n_emb_elec)
