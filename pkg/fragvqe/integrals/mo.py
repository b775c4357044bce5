"""Molecular-orbital integrals and the AO-to-MO transformation with frozen-core folding."""

import hashlib
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from fragvqe.errors import InvalidActiveWindowError

from .ao import AOIntegrals
from .scf import RHFResult, coulomb_exchange

logger = logging.getLogger(__name__)


def transform_eri(eri: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Rotate (pq|rs) into the basis given by the columns of c."""
    return np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, c, c, c, c, optimize=True)


@dataclass(frozen=True, eq=False)
class MOIntegrals:
    """Integrals over an orthonormal spatial-orbital basis.

    ``h`` is the one-electron matrix h_pq, ``v`` the two-electron tensor (pq|rs)
    in chemists' notation and ``e_core`` the scalar nuclear-repulsion plus
    frozen-core energy. ``ms2`` is twice the spin projection of the reference.
    """

    n_orb: int
    n_elec: int
    h: np.ndarray
    v: np.ndarray
    e_core: float
    ms2: int = 0

    def __post_init__(self) -> None:
        """Coerce arrays to float and check their shapes."""
        n = self.n_orb
        h = np.asarray(self.h, dtype=float).reshape(n, n)
        v = np.asarray(self.v, dtype=float).reshape(n, n, n, n)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "e_core", float(self.e_core))

    @property
    def n_qubits(self) -> int:
        """Number of spin orbitals."""
        return 2 * self.n_orb

    def rotated(self, u: np.ndarray) -> "MOIntegrals":
        """Return integrals in the rotated orbitals phi'_i = sum_p phi_p u_pi."""
        return MOIntegrals(
            self.n_orb,
            self.n_elec,
            u.T @ self.h @ u,
            transform_eri(self.v, u),
            self.e_core,
            self.ms2,
        )

    def with_h(self, h: np.ndarray) -> "MOIntegrals":
        """Return a copy with a different one-electron matrix."""
        return MOIntegrals(self.n_orb, self.n_elec, h, self.v, self.e_core, self.ms2)

    def digest(self) -> str:
        """Return a stable hash of the integrals, rounded to 1e-10."""
        sha = hashlib.sha256()
        sha.update(f"{self.n_orb}:{self.n_elec}:{self.ms2}:".encode())
        for arr in (self.h, self.v, np.array([self.e_core])):
            sha.update(np.round(arr, 10).astype("<f8").tobytes())
        return sha.hexdigest()[:32]


def frontier_window(rhf: RHFResult, n_active: int) -> tuple[int, ...]:
    """Return the n_active orbitals nearest the HOMO-LUMO gap.

    Half (rounded down) are taken from the top of the occupied block, the rest
    from the bottom of the virtual block, clipped at either end.
    """
    n_mo = rhf.coefficients.shape[1]
    n_active = min(n_active, n_mo)
    n_occ = rhf.n_occ
    take_occ = min(n_active // 2, n_occ)
    take_virt = min(n_active - take_occ, n_mo - n_occ)
    take_occ = min(n_active - take_virt, n_occ)
    return tuple(range(n_occ - take_occ, n_occ + take_virt))


def transform_to_mo(
    ao: AOIntegrals,
    rhf: RHFResult,
    active: Sequence[int] | None = None,
) -> MOIntegrals:
    """Transform AO integrals to an active MO window, folding in the frozen core.

    Occupied orbitals outside the window become a frozen core whose Coulomb and
    exchange field dresses the active one-electron matrix; virtual orbitals
    outside the window are dropped.

    Args:
        ao: AO integrals.
        rhf: Converged reference determinant.
        active: MO indices forming the active space, or None for all orbitals.

    Raises:
        InvalidActiveWindowError: The window leaves an odd, negative or
            over-full active electron count, or names a missing orbital.

    """
    c = rhf.coefficients
    n_mo = c.shape[1]
    active_idx = tuple(range(n_mo)) if active is None else tuple(sorted(set(active)))
    if any(i < 0 or i >= n_mo for i in active_idx):
        msg = f"indices {active_idx} outside 0..{n_mo - 1}"
        raise InvalidActiveWindowError(msg)
    core_idx = tuple(i for i in range(rhf.n_occ) if i not in active_idx)
    n_act_elec = rhf.n_elec - 2 * len(core_idx)
    if n_act_elec < 0 or n_act_elec % 2 or n_act_elec > 2 * len(active_idx):
        msg = f"{n_act_elec} active electrons in {len(active_idx)} orbitals"
        raise InvalidActiveWindowError(msg)

    h_ao = ao.hcore
    c_core = c[:, list(core_idx)]
    d_core = 2.0 * c_core @ c_core.T
    j, k = coulomb_exchange(ao.eri, d_core)
    h_eff = h_ao + j - 0.5 * k
    e_core = ao.e_nuc + 0.5 * float(np.sum(d_core * (h_ao + h_eff)))

    c_act = c[:, list(active_idx)]
    logger.log(
        logging.DEBUG,
        "Active space: %d orbitals, %d electrons, %d frozen core",
        len(active_idx),
        n_act_elec,
        len(core_idx),
    )
    return MOIntegrals(
        n_orb=len(active_idx),
        n_elec=n_act_elec,
        h=c_act.T @ h_eff @ c_act,
        v=transform_eri(ao.eri, c_act),
        e_core=e_core,
    )
