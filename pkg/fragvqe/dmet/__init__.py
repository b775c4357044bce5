"""Density-matrix embedding: localization, bath construction, embedding Hamiltonians and the DMET loop."""

from .bath import BATH_SINGULAR_VALUE_TOL, Bath, build_bath
from .driver import (
    DMETState,
    DMETTraceRecord,
    FittingMode,
    FragmentRecord,
    dmet_scf,
    fit_chemical_potential,
    fit_correlation_potential,
    fragment_density_mismatch,
    run_dmet,
)
from .embedding import (
    EmbeddingProblem,
    apply_chemical_potential,
    build_embedding_hamiltonian,
    embedding_problem,
    environment_density,
)
from .localize import LocalizedOrbitals, localize_orbitals, localized_integrals
from .partition import fragment_energy_and_number

__all__ = [
    "BATH_SINGULAR_VALUE_TOL",
    "Bath",
    "DMETState",
    "DMETTraceRecord",
    "EmbeddingProblem",
    "FittingMode",
    "FragmentRecord",
    "LocalizedOrbitals",
    "apply_chemical_potential",
    "build_bath",
    "build_embedding_hamiltonian",
    "dmet_scf",
    "embedding_problem",
    "environment_density",
    "fit_chemical_potential",
    "fit_correlation_potential",
    "fragment_density_mismatch",
    "fragment_energy_and_number",
    "localize_orbitals",
    "localized_integrals",
    "run_dmet",
]
