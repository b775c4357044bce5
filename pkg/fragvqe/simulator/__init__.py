"""Dense statevector simulation, exact-diagonalization oracles and reduced density matrices."""

from .exact import ExactSolution, Sector, exact_ground_state
from .fci import CasciSolution, casci
from .rdm import RDMs, compute_rdms, rdm_energy
from .statevector import Statevector, apply_exp, expectation, prepare_hf_state, variance

__all__ = [
    "CasciSolution",
    "ExactSolution",
    "RDMs",
    "Sector",
    "Statevector",
    "apply_exp",
    "casci",
    "compute_rdms",
    "exact_ground_state",
    "expectation",
    "prepare_hf_state",
    "rdm_energy",
    "variance",
]
