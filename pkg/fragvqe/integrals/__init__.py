"""Molecular integrals: STO-3G engine, restricted Hartree-Fock, MO transformation and FCIDUMP I/O."""

from .ao import AOIntegrals, build_ao_integrals
from .fcidump import read_fcidump, write_fcidump
from .mo import MOIntegrals, frontier_window, transform_eri, transform_to_mo
from .scf import RHFResult, run_rhf

__all__ = [
    "AOIntegrals",
    "MOIntegrals",
    "RHFResult",
    "build_ao_integrals",
    "frontier_window",
    "read_fcidump",
    "run_rhf",
    "transform_eri",
    "transform_to_mo",
    "write_fcidump",
]
