"""Minimal demo for fragvqe.

Builds a six-atom hydrogen chain, splits it into H2 fragments and compares the
two-body many-body expansion with ADAPT-VQE fragments against the exact
ground-state energy.
"""

import logging

from fragvqe import AdaptVqeSolver, FragmentationPlan, build_solver_chain, hydrogen_chain, run_mbe
from fragvqe.runner import system_integrals
from fragvqe.simulator import casci

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger("fragvqe_minimal")


def main() -> None:
    """Run a second-order MBE on H6 at 1.0 angstrom spacing."""
    geometry = hydrogen_chain(6, 1.0)
    plan = FragmentationPlan.consecutive(6, 2)
    solver = build_solver_chain(AdaptVqeSolver())

    result = run_mbe(geometry, plan, 2, solver)
    exact = casci(system_integrals(geometry)).energy
    logger.info("MBE(2) %.8f Eh, exact %.8f Eh", result.e_total, exact)
    logger.info("deviation %.3f mEh, largest subproblem %d qubits", (result.e_total - exact) * 1000, result.max_qubits)


if __name__ == "__main__":
    main()
