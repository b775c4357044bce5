"""Execution of a RunConfig: load inputs, dispatch the task, collect a RunReport."""

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

from platformdirs import user_cache_dir

from .concurrency import WorkQueue, run_all
from .config import RunConfig, ScanMethod, Task
from .dmet.driver import DMETState, dmet_scf, run_dmet
from .errors import ConfigError, InvalidGeometryError, PlanError
from .events import RunEventManager
from .geometry import Geometry, hydrogen_chain, read_xyz
from .integrals.ao import build_ao_integrals
from .integrals.fcidump import read_fcidump
from .integrals.mo import MOIntegrals, transform_to_mo
from .integrals.scf import run_rhf
from .mbe.driver import MBEResult, run_mbe
from .mbe.plan import FragmentationPlan, load_plan
from .report import RunRecord, RunReport
from .simulator.fci import casci
from .solvers import Subproblem, SubproblemSolver, build_solver_chain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Inputs:
    """Loaded system description: a geometry or ingested integrals, plus an optional plan."""

    geometry: Geometry | None = None
    integrals: MOIntegrals | None = None
    plan: FragmentationPlan | None = None


def load_inputs(config: RunConfig) -> Inputs:
    """Read geometry, FCIDUMP and plan files, checking the plan against the system.

    Raises:
        ConfigError: A geometry or plan file is invalid or the plan does not fit.
        FcidumpParseError: The FCIDUMP file is malformed.

    """
    system = config.system
    geometry = integrals = plan = None
    if system.geometry is not None:
        try:
            geometry = read_xyz(system.geometry)
        except InvalidGeometryError as e:
            raise ConfigError(str(e), "system.geometry") from e
    if system.fcidump is not None:
        integrals = read_fcidump(system.fcidump)
    if system.plan is not None:
        try:
            plan = load_plan(system.plan)
            if geometry is not None:
                plan.validate(geometry)
        except PlanError as e:
            raise ConfigError(str(e), "system.plan") from e
        if geometry is None and plan.orbital_fragments is None:
            raise ConfigError("DMET on ingested integrals needs orbital_fragments", "system.plan")
    return Inputs(geometry, integrals, plan)


def system_integrals(geometry: Geometry) -> MOIntegrals:
    """Full-space MO integrals of a closed-shell geometry over its converged RHF orbitals."""
    geometry.require_closed_shell()
    ao = build_ao_integrals(geometry)
    return transform_to_mo(ao, run_rhf(ao, geometry.n_electrons).raise_if_unconverged())


def _timed[T](fn: Callable[[], T]) -> tuple[T, float]:
    start = time.perf_counter()
    value = fn()
    return value, (time.perf_counter() - start) * 1000


def _mbe_record(
    method: str,
    parameter: float | None,
    result: MBEResult,
    e_ref: float | None,
    wall_ms: float,
) -> RunRecord:
    return RunRecord(
        method,
        parameter,
        None if result.partial else result.e_total,
        e_ref,
        len(result.energies) + len(result.failures),
        result.max_qubits,
        wall_ms,
        "partial" if result.partial else "ok",
        "; ".join(f"{k}: {v}" for k, v in result.failures.items()) or None,
    )


def _dmet_record(parameter: float | None, state: DMETState, e_ref: float | None, wall_ms: float) -> RunRecord:
    return RunRecord(
        "dmet",
        parameter,
        state.e_total,
        e_ref,
        len(state.fragments),
        state.max_qubits,
        wall_ms,
        "ok" if state.converged else "unconverged",
    )


class Runner:
    """Executes one RunConfig with a shared solver chain and an optional work queue."""

    def __init__(self, config: RunConfig, events: RunEventManager | None = None) -> None:
        """Initialize the runner.

        Args:
            config: Validated run configuration.
            events: Optional event manager passed to the drivers.

        """
        self.config = config
        self.events = events
        self.solver: SubproblemSolver = build_solver_chain(config.solver.build(), config.cache_dir)

    def run(self) -> RunReport:
        """Execute the configured task."""
        config = self.config
        inputs = load_inputs(config)
        config.output_dir.mkdir(parents=True, exist_ok=True)
        report = RunReport(str(config.task))
        work_queue = WorkQueue(config.threads) if config.threads > 1 else None
        try:
            if config.task is Task.SCAN:
                records = self._scan(work_queue)
            elif config.task is Task.MBE:
                records = [self._mbe(inputs, work_queue)]
            elif config.task is Task.DMET:
                records = [self._dmet(inputs, work_queue)]
            elif config.task is Task.ADAPT:
                records = [self._adapt(inputs)]
            else:
                records = [self._fci(inputs)]
        finally:
            if work_queue is not None:
                work_queue.shutdown()
        for record in records:
            report.add(record)
        return report

    def _reference(self, mo: MOIntegrals) -> float | None:
        return casci(mo).energy if self.config.oracle else None

    def _integrals(self, inputs: Inputs) -> MOIntegrals:
        if inputs.integrals is not None:
            return inputs.integrals
        return system_integrals(inputs.geometry)  # type: ignore[arg-type]

    def _fci(self, inputs: Inputs) -> RunRecord:
        mo = self._integrals(inputs)
        solution, wall_ms = _timed(lambda: casci(mo))
        e_ref = solution.energy if self.config.oracle else None
        return RunRecord("fci", None, solution.energy, e_ref, 1, mo.n_qubits, wall_ms)

    def _adapt(self, inputs: Inputs) -> RunRecord:
        mo = self._integrals(inputs)
        result, wall_ms = _timed(lambda: self.solver.solve(Subproblem("system", mo)))
        trace = result.metadata.get("trace")
        if isinstance(trace, list):
            path = self.config.output_dir / "adapt-trace.txt"
            header = "# iter energy_hartree grad_norm variance operator"
            path.write_text("\n".join([header, *trace]) + "\n", encoding="utf-8")
        status = "ok" if result.converged else "unconverged"
        return RunRecord(
            str(self.config.solver.kind),
            None,
            result.energy,
            self._reference(mo),
            1,
            result.n_qubits,
            wall_ms,
            status,
        )

    def _mbe(self, inputs: Inputs, work_queue: WorkQueue | None) -> RunRecord:
        geometry, plan = inputs.geometry, inputs.plan
        mbe = self.config.mbe
        result, wall_ms = _timed(
            lambda: run_mbe(
                geometry,  # type: ignore[arg-type]
                plan,  # type: ignore[arg-type]
                mbe.order,
                self.solver,
                active_space=mbe.active_space,
                correction=mbe.correction,
                work_queue=work_queue,
                events=self.events,
            ),
        )
        method = f"mbe{result.order}" + ("+corr" if mbe.correction else "")
        e_ref = self._reference(system_integrals(geometry)) if self.config.oracle else None  # type: ignore[arg-type]
        return _mbe_record(method, None, result, e_ref, wall_ms)

    def _dmet_options(self, work_queue: WorkQueue | None) -> dict[str, object]:
        d = self.config.dmet
        return {
            "fitting": d.fitting,
            "electron_tol": d.electron_tol,
            "cost_tol": d.cost_tol,
            "max_iterations": d.max_iterations,
            "mu_bracket": d.mu_bracket,
            "work_queue": work_queue,
            "events": self.events,
        }

    def _dmet(self, inputs: Inputs, work_queue: WorkQueue | None) -> RunRecord:
        options = self._dmet_options(work_queue)
        if inputs.geometry is not None:
            geometry, plan = inputs.geometry, inputs.plan
            state, wall_ms = _timed(lambda: run_dmet(geometry, plan, self.solver, **options))  # type: ignore[arg-type]
            reference = system_integrals(inputs.geometry) if self.config.oracle else None
        else:
            mo = inputs.integrals
            fragments = inputs.plan.orbital_fragments  # type: ignore[union-attr]
            state, wall_ms = _timed(lambda: dmet_scf(mo, fragments, self.solver, **options))  # type: ignore[arg-type]
            reference = mo
        state.write_trace(self.config.output_dir / "dmet-trace.txt")
        e_ref = self._reference(reference) if reference is not None else None
        return _dmet_record(None, state, e_ref, wall_ms)

    def _scan_point(self, spacing: float) -> list[RunRecord]:
        scan = self.config.scan
        geometry = hydrogen_chain(scan.n_atoms, spacing)
        plan = FragmentationPlan.consecutive(scan.n_atoms, scan.fragment_size)
        e_ref = None
        if self.config.oracle:
            try:
                e_ref = casci(system_integrals(geometry)).energy
            except Exception as e:  # noqa: BLE001 - the methods still run without a reference
                logger.log(logging.ERROR, "Oracle failed at R=%.4f: %s", spacing, e)
        records = []
        for method in scan.methods:
            try:
                records.append(self._scan_method(method, geometry, plan, spacing, e_ref))
            except Exception as e:  # noqa: BLE001 - one failing method must not blank the grid point
                logger.log(logging.ERROR, "%s failed at R=%.4f: %s", method, spacing, e)
                records.append(RunRecord(str(method), spacing, None, e_ref, status="failed", error=str(e)))
        return records

    def _scan_method(
        self,
        method: ScanMethod,
        geometry: Geometry,
        plan: FragmentationPlan,
        spacing: float,
        e_ref: float | None,
    ) -> RunRecord:
        rule = self.config.mbe.active_space
        if method is ScanMethod.DMET:
            state, wall_ms = _timed(lambda: run_dmet(geometry, plan, self.solver, **self._dmet_options(None)))
            return _dmet_record(spacing, state, e_ref, wall_ms)
        if method is ScanMethod.ADAPT:
            mo = system_integrals(geometry)
            result, wall_ms = _timed(lambda: self.solver.solve(Subproblem(f"chain-{spacing:.4f}", mo)))
            return RunRecord("adapt", spacing, result.energy, e_ref, 1, result.n_qubits, wall_ms)
        order = 3 if method is ScanMethod.MBE3 else 2
        correction = method is ScanMethod.MBE2_CORR
        result, wall_ms = _timed(
            lambda: run_mbe(geometry, plan, order, self.solver, active_space=rule, correction=correction),
        )
        return _mbe_record(str(method), spacing, result, e_ref, wall_ms)

    def _scan(self, work_queue: WorkQueue | None) -> list[RunRecord]:
        grid = self.config.scan.grid()
        logger.log(logging.INFO, "Scanning %d grid points: %s", len(grid), ", ".join(f"{r:g}" for r in grid))
        outcomes = run_all([lambda r=r: self._scan_point(r) for r in grid], work_queue)
        records: list[RunRecord] = []
        for spacing, outcome in zip(grid, outcomes, strict=True):
            if isinstance(outcome, Exception):
                logger.log(logging.ERROR, "Grid point R=%.4f failed: %s", spacing, outcome)
                records.extend(
                    RunRecord(str(m), spacing, None, status="failed", error=str(outcome))
                    for m in self.config.scan.methods
                )
            else:
                records.extend(outcome)
        # method-major, then by spacing
        order = {str(m): i for i, m in enumerate(self.config.scan.methods)}
        records.sort(key=lambda r: (order.get(r.method, len(order)), r.parameter or 0.0))
        return records


def run(config: RunConfig, events: RunEventManager | None = None) -> RunReport:
    """Execute ``config`` and return its report."""
    return Runner(config, events).run()


def default_cache_dir() -> Path:
    """Per-user subproblem cache directory."""
    return Path(user_cache_dir("fragvqe")) / "subproblems"
