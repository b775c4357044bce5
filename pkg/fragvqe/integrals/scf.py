"""Restricted Hartree-Fock with damped, level-shifted start-up and pruned DIIS extrapolation."""

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from fragvqe.errors import InvalidElectronCountError, ScfNotConvergedError

from .ao import AOIntegrals

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 200
ENERGY_TOL = 1e-10
DENSITY_TOL = 1e-8
ENERGY_RISE_TOL = 1e-6
DIIS_MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class RHFResult:
    """Outcome of a restricted Hartree-Fock calculation.

    ``coefficients`` holds the MO coefficient matrix C (AO rows, MO columns) and
    ``density`` the closed-shell AO density D = 2 C_occ C_occ^T.
    """

    coefficients: np.ndarray
    orbital_energies: np.ndarray
    density: np.ndarray
    energy: float
    converged: bool
    n_iterations: int
    n_elec: int
    fock: np.ndarray
    delta_e: float = 0.0
    delta_d: float = 0.0

    @property
    def n_occ(self) -> int:
        """Number of doubly occupied orbitals."""
        return self.n_elec // 2

    def raise_if_unconverged(self) -> "RHFResult":
        """Return self, or raise if the SCF stopped before converging."""
        if not self.converged:
            raise ScfNotConvergedError(self.n_iterations, self.delta_e, self.delta_d)
        return self


def coulomb_exchange(eri: np.ndarray, density: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return the Coulomb and exchange matrices J[D], K[D]."""
    j = np.einsum("pqrs,rs->pq", eri, density, optimize=True)
    k = np.einsum("prqs,rs->pq", eri, density, optimize=True)
    return j, k


def fock_matrix(ao: AOIntegrals, density: np.ndarray) -> np.ndarray:
    """Closed-shell Fock matrix h + J - K/2."""
    j, k = coulomb_exchange(ao.eri, density)
    return ao.hcore + j - 0.5 * k


def symmetric_orthogonalizer(overlap: np.ndarray) -> tuple[np.ndarray, float]:
    """Return S^{-1/2} and the smallest overlap eigenvalue."""
    w, u = np.linalg.eigh(overlap)
    return (u / np.sqrt(np.clip(w, 1e-300, None))) @ u.T, float(w.min())


def aufbau_density(fock: np.ndarray, x: np.ndarray, n_occ: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonalize F in the orthogonalized basis and fill the lowest n_occ orbitals."""
    eps, c_ortho = np.linalg.eigh(x.T @ fock @ x)
    c = x @ c_ortho
    c_occ = c[:, :n_occ]
    return eps, c, 2.0 * c_occ @ c_occ.T


class _Diis:
    """Pulay extrapolation of Fock matrices on the commutator FDS - SDF."""

    def __init__(self, size: int) -> None:
        self._focks: deque[np.ndarray] = deque(maxlen=size)
        self._errors: deque[np.ndarray] = deque(maxlen=size)

    def __len__(self) -> int:
        return len(self._focks)

    def push(self, fock: np.ndarray, error: np.ndarray) -> None:
        self._focks.append(fock)
        self._errors.append(error)

    def reset(self) -> None:
        self._focks.clear()
        self._errors.clear()

    def _b_matrix(self) -> np.ndarray:
        n = len(self._errors)
        b = np.empty((n + 1, n + 1))
        b[-1, :] = -1.0
        b[:, -1] = -1.0
        b[-1, -1] = 0.0
        for i, ei in enumerate(self._errors):
            for j, ej in enumerate(self._errors):
                b[i, j] = float(np.vdot(ei, ej))
        # rescaling the error block leaves the coefficients unchanged
        scale = float(np.max(np.diag(b)[:n]))
        if scale > 0.0:
            b[:n, :n] /= scale
        return b

    def extrapolate(self) -> np.ndarray:
        while len(self._focks) >= 2:  # noqa: PLR2004 - need a history to extrapolate
            b = self._b_matrix()
            if np.linalg.cond(b) <= DIIS_MAX_CONDITION:
                n = len(self._focks)
                rhs = np.zeros(n + 1)
                rhs[-1] = -1.0
                try:
                    coef = scipy.linalg.solve(b, rhs, assume_a="sym")[:n]
                except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
                    break
                return sum(c * f for c, f in zip(coef, self._focks, strict=True))
            logger.log(logging.DEBUG, "Dropping oldest of %d DIIS vectors", len(self._focks))
            self._focks.popleft()
            self._errors.popleft()
        return self._focks[-1]


def level_shifted(fock: np.ndarray, overlap: np.ndarray, density: np.ndarray, shift: float) -> np.ndarray:
    """Raise the virtual block of F by ``shift``: F + shift (S - S D S / 2)."""
    if shift == 0.0:
        return fock
    return fock + shift * (overlap - 0.5 * overlap @ density @ overlap)


def run_rhf(
    ao: AOIntegrals,
    n_elec: int,
    *,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    energy_tol: float = ENERGY_TOL,
    density_tol: float = DENSITY_TOL,
    damping: float = 0.5,
    damping_iterations: int = 4,
    level_shift: float = 0.25,
    diis_size: int = 8,
    initial_density: np.ndarray | None = None,
) -> RHFResult:
    """Run a closed-shell SCF; an unconverged run returns its last iterate flagged.

    The first ``damping_iterations`` steps mix densities and level-shift the
    virtuals. After that DIIS takes over; whenever the energy rises the DIIS
    history is dropped and the damped phase starts again.

    Args:
        ao: AO integrals.
        n_elec: Electron count (even, at most 2 * n_ao).
        max_iterations: Iteration cap; the result is flagged unconverged beyond it.
        energy_tol: Threshold on |dE| between iterations.
        density_tol: Threshold on the RMS density change.
        damping: Mixing weight of the previous density during the damped phase.
        damping_iterations: Length of each damped phase.
        level_shift: Virtual level shift (hartree) applied during damped steps.
        diis_size: DIIS subspace length.
        initial_density: Optional starting density; defaults to the core guess.

    """
    if n_elec < 0 or n_elec % 2 or n_elec > 2 * ao.n_ao:
        raise InvalidElectronCountError(n_elec, ao.n_ao)
    n_occ = n_elec // 2
    x, _ = symmetric_orthogonalizer(ao.overlap)
    s = ao.overlap
    h = ao.hcore

    if initial_density is None:
        _, _, density = aufbau_density(h, x, n_occ)
    else:
        density = np.array(initial_density, dtype=float)
    diis = _Diis(diis_size)
    energy = np.inf
    delta_e = delta_d = np.inf
    converged = False
    damped_left = damping_iterations
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        fock = fock_matrix(ao, density)
        new_energy = 0.5 * float(np.sum(density * (h + fock))) + ao.e_nuc
        if damped_left == 0 and new_energy - energy > ENERGY_RISE_TOL:
            logger.log(
                logging.DEBUG,
                "SCF energy rose by %.3e at iteration %d; restarting DIIS",
                new_energy - energy,
                iteration,
            )
            diis.reset()
            damped_left = damping_iterations
        error = x.T @ (fock @ density @ s - s @ density @ fock) @ x
        diis.push(fock, error)
        damped = damped_left > 0
        if damped:
            _, _, new_density = aufbau_density(level_shifted(fock, s, density, level_shift), x, n_occ)
            new_density = (1.0 - damping) * new_density + damping * density
            damped_left -= 1
        else:
            _, _, new_density = aufbau_density(diis.extrapolate(), x, n_occ)
        delta_e = abs(new_energy - energy)
        delta_d = float(np.sqrt(np.mean((new_density - density) ** 2)))
        energy = new_energy
        density = new_density
        logger.log(
            logging.DEBUG,
            "SCF iteration %d: E=%.12f |dE|=%.3e rms(dD)=%.3e",
            iteration,
            energy,
            delta_e,
            delta_d,
        )
        if delta_e < energy_tol and delta_d < density_tol and not damped:
            converged = True
            break

    # orbitals, energy and Fock all belong to the final density
    fock = fock_matrix(ao, density)
    eps, c, _ = aufbau_density(fock, x, n_occ)
    energy = 0.5 * float(np.sum(density * (h + fock))) + ao.e_nuc
    if not converged:
        logger.log(
            logging.WARNING,
            "SCF not converged after %d iterations (|dE|=%.3e, rms dD=%.3e)",
            iteration,
            delta_e,
            delta_d,
        )
    return RHFResult(
        coefficients=c,
        orbital_energies=eps,
        density=density,
        energy=energy,
        converged=converged,
        n_iterations=iteration,
        n_elec=n_elec,
        fock=fock,
        delta_e=float(delta_e),
        delta_d=float(delta_d),
    )
