"""fragvqe: divide-and-conquer ADAPT-VQE for molecular ground-state energies.

Large systems are split into fragments; each fragment (or n-mer, or embedding
problem) is solved on a simulated qubit register by ADAPT-VQE and the results
are recombined by a many-body expansion or by density matrix embedding.
"""

from .config import RunConfig, load_config
from .dmet import DMETState, dmet_scf, run_dmet
from .errors import FragVqeError
from .geometry import Atom, Geometry, hydrogen_chain, read_xyz
from .integrals import MOIntegrals, build_ao_integrals, read_fcidump, run_rhf, transform_to_mo
from .mbe import FragmentationPlan, MBEResult, run_mbe
from .report import RunReport, emit_report
from .runner import run
from .solvers import AdaptVqeSolver, ExactSolver, MeanFieldSolver, Subproblem, build_solver_chain

__version__ = "0.1.0"

__all__ = [
    "AdaptVqeSolver",
    "Atom",
    "DMETState",
    "ExactSolver",
    "FragVqeError",
    "FragmentationPlan",
    "Geometry",
    "MBEResult",
    "MOIntegrals",
    "MeanFieldSolver",
    "RunConfig",
    "RunReport",
    "Subproblem",
    "__version__",
    "build_ao_integrals",
    "build_solver_chain",
    "dmet_scf",
    "emit_report",
    "hydrogen_chain",
    "load_config",
    "read_fcidump",
    "read_xyz",
    "run",
    "run_dmet",
    "run_mbe",
    "run_rhf",
    "transform_to_mo",
]
