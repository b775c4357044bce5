"""Jordan-Wigner mapping of fermionic operators onto qubits.

a+_p = 1/2 (X_p - i Y_p) Z_{p-1} ... Z_0 and a_p = 1/2 (X_p + i Y_p) Z_{p-1} ... Z_0,
with the parity string on the modes of lower index. The qubit-excitation map
is the same without the parity string.
"""

import logging
from functools import lru_cache

from fragvqe.integrals.mo import MOIntegrals

from .fermion import FermionOperator, build_second_quantized
from .pauli import PauliString, PauliSum, multiply_strings

logger = logging.getLogger(__name__)

LadderImage = tuple[tuple[PauliString, complex], ...]


@lru_cache(maxsize=1024)
def _ladder_image(mode: int, *, dagger: bool, parity: bool) -> LadderImage:
    low = (1 << mode) - 1 if parity else 0
    bit = 1 << mode
    y_coef = -0.5j if dagger else 0.5j
    return ((PauliString(bit, low), 0.5 + 0j), (PauliString(bit, low | bit), y_coef))


def _map_products(f: FermionOperator, *, parity: bool) -> PauliSum:
    out: dict[PauliString, complex] = {}
    for product, coef in f.terms.items():
        partial: dict[PauliString, complex] = {PauliString(): coef}
        for mode, dagger in product:
            image = _ladder_image(mode, dagger=dagger, parity=parity)
            step: dict[PauliString, complex] = {}
            for sa, ca in partial.items():
                for sb, cb in image:
                    phase, string = multiply_strings(sa, sb)
                    step[string] = step.get(string, 0j) + ca * cb * phase
            partial = step
        for string, value in partial.items():
            out[string] = out.get(string, 0j) + value
    return PauliSum(f.n_modes, out).simplify()


def jordan_wigner(f: FermionOperator) -> PauliSum:
    """Map a fermionic operator to a simplified PauliSum on n_modes qubits."""
    mapped = _map_products(f, parity=True)
    logger.log(
        logging.DEBUG,
        "Jordan-Wigner: %d fermionic terms -> %d Pauli strings",
        len(f),
        len(mapped),
    )
    return mapped


def qubit_excitation_map(f: FermionOperator) -> PauliSum:
    """Map with qubit raising/lowering operators, dropping the parity strings."""
    return _map_products(f, parity=False)


def qubit_hamiltonian(mo: MOIntegrals) -> PauliSum:
    """Jordan-Wigner image of the second-quantized Hamiltonian of mo."""
    return jordan_wigner(build_second_quantized(mo))
