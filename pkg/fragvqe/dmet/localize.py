"""Lowdin localization of the AO basis and the localized-orbital Hamiltonian."""

import logging
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from fragvqe.errors import IllConditionedOverlapError, PlanError
from fragvqe.integrals.ao import AOIntegrals
from fragvqe.integrals.mo import MOIntegrals, transform_eri
from fragvqe.integrals.scf import symmetric_orthogonalizer

logger = logging.getLogger(__name__)

MIN_OVERLAP_EIGENVALUE = 1e-8


@dataclass(frozen=True, eq=False)
class LocalizedOrbitals:
    """Orthonormal localized orbitals ``coefficients`` (AO x LO) and their fragment ids."""

    coefficients: np.ndarray
    fragment_map: tuple[int, ...]

    @property
    def n_orb(self) -> int:
        """Number of localized orbitals."""
        return self.coefficients.shape[1]

    @property
    def fragments(self) -> tuple[tuple[int, ...], ...]:
        """Orbital indices of each fragment, ordered by fragment id."""
        n_frag = max(self.fragment_map, default=-1) + 1
        return tuple(
            tuple(i for i, f in enumerate(self.fragment_map) if f == frag) for frag in range(n_frag)
        )


def localize_orbitals(ao: AOIntegrals, fragment_of: Mapping[int, int]) -> LocalizedOrbitals:
    """Build Lowdin orbitals L = S^-1/2 and assign each to its parent atom's fragment.

    Args:
        ao: AO integrals; ``ao.ao_atoms`` gives the parent atom of each AO.
        fragment_of: Map from atom index to fragment id.

    Raises:
        IllConditionedOverlapError: The smallest overlap eigenvalue is below 1e-8.
        PlanError: An AO's atom belongs to no fragment.

    """
    x, smallest = symmetric_orthogonalizer(ao.overlap)
    if smallest < MIN_OVERLAP_EIGENVALUE:
        raise IllConditionedOverlapError(smallest)
    atoms = ao.ao_atoms or tuple(range(ao.n_ao))
    missing = sorted({a for a in atoms if a not in fragment_of})
    if missing:
        msg = f"atoms {missing} carry basis functions but belong to no fragment"
        raise PlanError(msg)
    logger.log(logging.DEBUG, "Lowdin orbitals: %d, smallest overlap eigenvalue %.3e", ao.n_ao, smallest)
    return LocalizedOrbitals(x, tuple(fragment_of[a] for a in atoms))


def localized_integrals(ao: AOIntegrals, orbitals: LocalizedOrbitals, n_elec: int) -> MOIntegrals:
    """Express the full Hamiltonian over the localized orbitals (no frozen core)."""
    c = orbitals.coefficients
    return MOIntegrals(orbitals.n_orb, n_elec, c.T @ ao.hcore @ c, transform_eri(ao.eri, c), ao.e_nuc)
