"""Atomic-orbital integral container and its builder."""

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from fragvqe.geometry import Geometry

from .basis import (
    electron_repulsion_integrals,
    nuclear_repulsion,
    one_electron_integrals,
    sto3g_basis,
)

if TYPE_CHECKING:
    from .mo import MOIntegrals

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AOIntegrals:
    """One- and two-electron integrals over a (possibly non-orthogonal) AO basis.

    ``overlap``, ``kinetic`` and ``nuclear`` are the S, T and V matrices;
    ``eri`` holds (pq|rs) in chemists' notation. All energies are in hartree.
    ``ao_atoms`` maps each basis function to the index of its parent atom.
    """

    overlap: np.ndarray
    kinetic: np.ndarray
    nuclear: np.ndarray
    eri: np.ndarray
    e_nuc: float
    ao_atoms: tuple[int, ...] = field(default=())

    @property
    def n_ao(self) -> int:
        """Number of basis functions."""
        return self.overlap.shape[0]

    @property
    def hcore(self) -> np.ndarray:
        """Core Hamiltonian T + V."""
        return self.kinetic + self.nuclear

    @classmethod
    def from_orthonormal(
        cls,
        mo: "MOIntegrals",
        orbital_atoms: tuple[int, ...] | None = None,
    ) -> "AOIntegrals":
        """Wrap orthonormal-orbital integrals so AO-level routines can run on them.

        The overlap is the identity, the whole one-electron matrix is stored as
        the kinetic part and the scalar core energy plays the nuclear repulsion.
        """
        n = mo.n_orb
        return cls(
            overlap=np.eye(n),
            kinetic=np.array(mo.h, dtype=float),
            nuclear=np.zeros((n, n)),
            eri=np.array(mo.v, dtype=float),
            e_nuc=float(mo.e_core),
            ao_atoms=tuple(range(n)) if orbital_atoms is None else tuple(orbital_atoms),
        )


def build_ao_integrals(geometry: Geometry) -> AOIntegrals:
    """Evaluate STO-3G integrals for a geometry of H and He atoms.

    Raises:
        UnsupportedElementError: An atom needs p or higher shells.

    """
    basis = sto3g_basis(geometry)
    charges = np.array([a.charge for a in geometry.atoms], dtype=float)
    nuclei = geometry.coordinates_bohr
    s, t, v = one_electron_integrals(basis, charges, nuclei)
    eri = electron_repulsion_integrals(basis)
    e_nuc = nuclear_repulsion(charges, nuclei)
    logger.log(
        logging.DEBUG,
        "Built AO integrals for %d atoms (%d functions), e_nuc=%.10f",
        len(geometry),
        len(basis),
        e_nuc,
    )
    return AOIntegrals(
        overlap=0.5 * (s + s.T),
        kinetic=0.5 * (t + t.T),
        nuclear=0.5 * (v + v.T),
        eri=eri,
        e_nuc=e_nuc,
        ao_atoms=tuple(fn.atom for fn in basis),
    )
