"""Dense statevector: preparation, Pauli exponentials, expectations and variance.

Qubit k is bit k of the amplitude index (little-endian).
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from fragvqe.errors import NotAntiHermitianError
from fragvqe.hamiltonian.pauli import PauliSum, pauli_action

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10
ANTI_HERMITIAN_TOL = 1e-10
_DUMP_DTYPE = np.dtype([("index", "<u8"), ("re", "<f8"), ("im", "<f8")])


@dataclass(eq=False)
class Statevector:
    """2^n complex amplitudes of an n-qubit register, kept at unit norm."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        """Check shape and normalization."""
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            msg = f"expected {1 << self.n_qubits} amplitudes, got shape {self.amplitudes.shape}"
            raise ValueError(msg)
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > NORM_TOL:
            msg = f"statevector norm {norm} differs from 1"
            raise ValueError(msg)

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> "Statevector":
        """Return the computational basis state |index>."""
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_unnormalized(cls, n_qubits: int, amplitudes: np.ndarray) -> "Statevector":
        """Normalize arbitrary amplitudes."""
        amps = np.asarray(amplitudes, dtype=complex)
        return cls(n_qubits, amps / np.linalg.norm(amps))

    def copy(self) -> "Statevector":
        """Return an independent copy."""
        return Statevector(self.n_qubits, self.amplitudes.copy())

    def probabilities(self) -> np.ndarray:
        """Basis-state populations |c_b|^2."""
        return np.abs(self.amplitudes) ** 2

    def overlap(self, other: "Statevector") -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def dump(self, path: Path | str, threshold: float = 0.0) -> None:
        """Write (index, re, im) triples of amplitudes above threshold as little-endian binary."""
        idx = np.flatnonzero(np.abs(self.amplitudes) > threshold)
        records = np.empty(idx.size, dtype=_DUMP_DTYPE)
        records["index"] = idx
        records["re"] = self.amplitudes[idx].real
        records["im"] = self.amplitudes[idx].imag
        Path(path).write_bytes(records.tobytes())

    @classmethod
    def load(cls, path: Path | str, n_qubits: int) -> "Statevector":
        """Read a dump written by :meth:`dump`."""
        records = np.frombuffer(Path(path).read_bytes(), dtype=_DUMP_DTYPE)
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[records["index"].astype(np.int64)] = records["re"] + 1j * records["im"]
        return cls(n_qubits, amps)


def prepare_hf_state(n_qubits: int, n_electrons: int) -> Statevector:
    """Occupy the n_electrons lowest-index spin orbitals."""
    if not 0 <= n_electrons <= n_qubits:
        msg = f"cannot place {n_electrons} electrons in {n_qubits} spin orbitals"
        raise ValueError(msg)
    return Statevector.basis_state(n_qubits, (1 << n_electrons) - 1)


def exp_terms(generator: PauliSum) -> list[tuple[int, int, float]]:
    """Return (x, z, r) for each term c = i*r of an anti-Hermitian generator, in lexicographic order.

    Raises:
        NotAntiHermitianError: A coefficient has a real part above 1e-10.

    """
    residual = generator.max_real_part()
    if residual > ANTI_HERMITIAN_TOL:
        raise NotAntiHermitianError(residual)
    return [(t.string.x, t.string.z, t.coefficient.imag) for t in generator if t.coefficient.imag != 0]


def apply_rotation(psi: np.ndarray, n_qubits: int, x: int, z: int, angle: float) -> np.ndarray:
    """Return exp(i angle P) psi = cos(angle) psi + i sin(angle) P psi."""
    if angle == 0:
        return psi
    perm, phase = pauli_action(n_qubits, x, z)
    return np.cos(angle) * psi + 1j * np.sin(angle) * (phase * psi[perm])


def apply_exp(state: Statevector, tau: PauliSum, theta: float) -> Statevector:
    """Apply exp(theta tau) for anti-Hermitian tau.

    Multi-term generators are applied as a single first-order product of
    single-term exponentials, one per Pauli string in lexicographic order.
    """
    psi = state.amplitudes
    for x, z, r in exp_terms(tau):
        psi = apply_rotation(psi, state.n_qubits, x, z, theta * r)
    return Statevector(state.n_qubits, psi.copy() if psi is state.amplitudes else psi)


def expectation(state: Statevector, h: PauliSum) -> float:
    """Return <psi|H|psi>; the imaginary residue must stay below 1e-10."""
    value = complex(np.vdot(state.amplitudes, h.apply(state.amplitudes)))
    if abs(value.imag) > NORM_TOL * max(1.0, abs(value.real)):
        msg = f"expectation has imaginary part {value.imag:.3e}; operator is not Hermitian"
        raise ValueError(msg)
    return value.real


def variance(state: Statevector, h: PauliSum) -> float:
    """Return <H^2> - <H>^2 from ||H psi||^2, without expanding H^2."""
    h_psi = h.apply(state.amplitudes)
    mean = float(np.vdot(state.amplitudes, h_psi).real)
    return float(np.vdot(h_psi, h_psi).real) - mean * mean
