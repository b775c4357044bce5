"""Many-body expansion: fragmentation plans, capped n-mers, assembly and the driver."""

from .assembly import (
    assemble_mbe_energy,
    binding_energy,
    cap_balance,
    check_cap_telescoping,
    mbe_coefficient,
    mbe_increments,
    required_subsets,
)
from .driver import ActiveSpaceRule, MBEResult, full_rhf_energy, nmer_subproblem, rhf_correction, run_mbe
from .nmer import Cap, NMer, cap_severed_bonds, enumerate_nmers, outward_caps
from .plan import DEFAULT_CAP_BOND_LENGTH, FragmentationPlan, load_plan, plan_from_mapping

__all__ = [
    "DEFAULT_CAP_BOND_LENGTH",
    "ActiveSpaceRule",
    "Cap",
    "FragmentationPlan",
    "MBEResult",
    "NMer",
    "assemble_mbe_energy",
    "binding_energy",
    "cap_balance",
    "cap_severed_bonds",
    "check_cap_telescoping",
    "enumerate_nmers",
    "full_rhf_energy",
    "load_plan",
    "mbe_coefficient",
    "mbe_increments",
    "nmer_subproblem",
    "outward_caps",
    "plan_from_mapping",
    "required_subsets",
    "rhf_correction",
    "run_mbe",
]
