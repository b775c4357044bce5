"""Second-quantized Hamiltonians, Pauli algebra and the Jordan-Wigner mapping."""

from .fermion import FermionOperator, build_second_quantized, spin_orbital
from .jordan_wigner import jordan_wigner, qubit_excitation_map, qubit_hamiltonian
from .pauli import PauliString, PauliSum, PauliTerm, commutator, pauli_product

__all__ = [
    "FermionOperator",
    "PauliString",
    "PauliSum",
    "PauliTerm",
    "build_second_quantized",
    "commutator",
    "jordan_wigner",
    "pauli_product",
    "qubit_excitation_map",
    "qubit_hamiltonian",
    "spin_orbital",
]
