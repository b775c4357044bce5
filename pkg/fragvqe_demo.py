"""Demo application for fragvqe.

Runs the many-body expansion at second and third order and density matrix
embedding on an eight-atom hydrogen chain, solving fragments with ADAPT-VQE
on a small thread pool. Subproblem energies are cached on disk in the user
cache directory, so a second run only reassembles them.
"""

import logging
from pathlib import Path

from platformdirs import user_cache_dir

from fragvqe import AdaptVqeSolver, FragmentationPlan, build_solver_chain, hydrogen_chain, run_dmet, run_mbe
from fragvqe.concurrency import WorkQueue
from fragvqe.events import DmetIterationEvent, RunEventManager, SubproblemFailedEvent, SubproblemSolvedEvent
from fragvqe.runner import system_integrals
from fragvqe.simulator import casci

logging.basicConfig(level=logging.DEBUG)
logging.getLogger("fragvqe.adaptvqe").setLevel(logging.INFO)
logger = logging.getLogger("fragvqe_demo")


def main() -> None:
    """Compare MBE(2), MBE(3) and DMET against the exact energy of H8."""
    solver = build_solver_chain(
        AdaptVqeSolver("spin_adapted"),
        cache_dir=Path(user_cache_dir("fragvqe")) / "demo_cache",
    )
    events = RunEventManager()

    def on_solved(event: SubproblemSolvedEvent) -> None:
        logger.info("solved %s: %.8f Eh on %d qubits", event.label, event.energy, event.n_qubits)

    def on_failed(event: SubproblemFailedEvent) -> None:
        logger.warning("failed %s: %s", event.label, event.error)

    def on_dmet_iteration(event: DmetIterationEvent) -> None:
        logger.info("DMET iteration %d: mu=%.6f N=%.6f", event.iteration, event.mu, event.n_total)

    events.on_subproblem_solved(on_solved)
    events.on_subproblem_failed(on_failed)
    events.on_dmet_iteration(on_dmet_iteration)

    geometry = hydrogen_chain(8, 1.2)
    plan = FragmentationPlan.consecutive(8, 2)
    exact = casci(system_integrals(geometry)).energy

    energies = {}
    with WorkQueue(4) as work_queue:
        for order in (2, 3):
            result = run_mbe(geometry, plan, order, solver, work_queue=work_queue, events=events)
            energies[f"MBE({order})"] = result.e_total
        state = run_dmet(geometry, plan, solver, work_queue=work_queue, events=events)
        energies["DMET"] = state.e_total

    logger.info("exact     %.8f Eh", exact)
    for name, energy in energies.items():
        logger.info("%-9s %.8f Eh (%+.3f mEh)", name, energy, (energy - exact) * 1000)


if __name__ == "__main__":
    main()
