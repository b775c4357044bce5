"""Command-line interface: ``fragvqe {run,scan,mbe,dmet,adapt,fci}``.

Exit codes: 0 on success, 1 on configuration or input errors, 2 when some
subproblem or grid point failed and the report is partial.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from .adaptvqe.pools import PoolKind
from .config import (
    DmetConfig,
    MbeConfig,
    RunConfig,
    ScanConfig,
    SolverConfig,
    SolverKind,
    SystemConfig,
    Task,
    load_config,
    parse_methods,
    with_overrides,
)
from .dmet.driver import FittingMode
from .errors import ConfigError, FragVqeError
from .events import RunEventManager, SubproblemFailedEvent, SubproblemSolvedEvent
from .report import emit_report
from .runner import default_cache_dir, run

logger = logging.getLogger(__name__)

_SOLVER = SolverConfig()
_MBE = MbeConfig()
_DMET = DmetConfig()
_SCAN = ScanConfig()


def _common_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--threads", type=int, default=None, help="parallel subproblem workers (default: 1)")
    parser.add_argument("--output-dir", type=Path, default=None, help="report directory (default: fragvqe-out)")
    parser.add_argument(
        "--oracle",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="also run the exact CASCI reference (default: on)",
    )
    cache = parser.add_mutually_exclusive_group()
    cache.add_argument("--cache-dir", type=Path, default=None, help="disk cache for subproblem energies")
    cache.add_argument("--cache", action="store_true", help="use the per-user default cache directory")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    return parser


def _solver_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("subproblem solver")
    group.add_argument(
        "--solver",
        type=SolverKind,
        choices=list(SolverKind),
        default=_SOLVER.kind,
        help="subproblem solver (default: %(default)s)",
    )
    group.add_argument(
        "--pool",
        type=PoolKind,
        choices=list(PoolKind),
        default=_SOLVER.pool,
        help="ADAPT operator pool (default: %(default)s)",
    )
    group.add_argument(
        "--grad-eps",
        type=float,
        default=_SOLVER.grad_norm_eps,
        help="ADAPT gradient-norm threshold (default: %(default)s)",
    )
    group.add_argument(
        "--variance-eps",
        type=float,
        default=_SOLVER.variance_eps,
        help="ADAPT energy-variance threshold in hartree^2 (default: %(default)s)",
    )
    group.add_argument(
        "--max-iter",
        type=int,
        default=_SOLVER.max_iterations,
        help="ADAPT iteration cap (default: %(default)s)",
    )
    group.add_argument(
        "--no-canonicalize",
        dest="canonicalize",
        action="store_false",
        help="start ADAPT in the given orbitals instead of the subproblem's RHF orbitals",
    )
    return parser


def _system_options(*, plan: bool, fcidump: bool = True) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("system")
    source = group.add_mutually_exclusive_group(required=True)
    source.add_argument("--geometry", type=Path, help="XYZ file (angstrom)")
    if fcidump:
        source.add_argument("--fcidump", type=Path, help="FCIDUMP integral file")
    if plan:
        group.add_argument("--plan", type=Path, required=True, help="fragmentation plan (TOML)")
    return parser


def _active_window(text: str) -> tuple[int, int]:
    order, _, size = text.partition("=")
    try:
        return int(order), int(size)
    except ValueError as e:
        msg = f"expected ORDER=N_ORBITALS, got {text!r}"
        raise argparse.ArgumentTypeError(msg) from e


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser with one subcommand per task."""
    parser = argparse.ArgumentParser(
        prog="fragvqe",
        description="Divide-and-conquer ADAPT-VQE: many-body expansion and density matrix embedding.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    solver = _solver_options()

    p = sub.add_parser("run", parents=[common], help="run a TOML configuration")
    p.add_argument("config", type=Path, help="run configuration (TOML)")

    p = sub.add_parser(
        "scan",
        parents=[common, solver],
        help="hydrogen-chain bond-length scan",
    )
    p.add_argument("--atoms", type=int, default=_SCAN.n_atoms, help="chain length (default: %(default)s)")
    p.add_argument(
        "--fragment-size",
        type=int,
        default=_SCAN.fragment_size,
        help="atoms per fragment (default: %(default)s)",
    )
    p.add_argument("--start", type=float, default=_SCAN.start, help="first spacing in angstrom (default: %(default)s)")
    p.add_argument("--stop", type=float, default=_SCAN.stop, help="last spacing in angstrom (default: %(default)s)")
    p.add_argument("--step", type=float, default=_SCAN.step, help="spacing step in angstrom (default: %(default)s)")
    p.add_argument(
        "--methods",
        type=parse_methods,
        default=_SCAN.methods,
        help="comma-separated subset of mbe2, mbe3, mbe2+corr, dmet, adapt (default: mbe2,mbe3,dmet)",
    )

    p = sub.add_parser(
        "mbe",
        parents=[common, solver, _system_options(plan=True, fcidump=False)],
        help="many-body expansion",
    )
    p.add_argument("--order", type=int, default=_MBE.order, help="truncation order (default: %(default)s)")
    p.add_argument("--correction", action="store_true", help="add the RHF long-range correction")
    p.add_argument(
        "--active-window",
        type=_active_window,
        action="append",
        default=[],
        metavar="ORDER=N",
        help="frontier active orbitals for n-mers of ORDER (repeatable; default: all orbitals)",
    )

    p = sub.add_parser(
        "dmet",
        parents=[common, solver, _system_options(plan=True)],
        help="density matrix embedding",
    )
    p.add_argument(
        "--fitting",
        type=FittingMode,
        choices=list(FittingMode),
        default=_DMET.fitting,
        help="what the outer loop fits (default: %(default)s)",
    )
    p.add_argument(
        "--electron-tol",
        type=float,
        default=_DMET.electron_tol,
        help="electron-count tolerance (default: %(default)s)",
    )
    p.add_argument(
        "--cost-tol",
        type=float,
        default=_DMET.cost_tol,
        help="density-mismatch tolerance (default: %(default)s)",
    )
    p.add_argument(
        "--max-outer",
        type=int,
        default=_DMET.max_iterations,
        help="outer-iteration cap (default: %(default)s)",
    )
    p.add_argument(
        "--mu-bracket",
        type=float,
        default=_DMET.mu_bracket,
        help="initial |mu| bracket in hartree (default: %(default)s)",
    )

    sub.add_parser(
        "adapt",
        parents=[common, solver, _system_options(plan=False)],
        help="ADAPT-VQE on the whole system",
    )
    sub.add_parser(
        "fci",
        parents=[common, _system_options(plan=False)],
        help="exact CASCI of the whole system",
    )
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Build a validated RunConfig from parsed arguments."""
    cache_dir = default_cache_dir() if args.cache else args.cache_dir
    overrides = {
        "threads": args.threads,
        "output_dir": args.output_dir,
        "oracle": args.oracle,
        "cache_dir": cache_dir,
    }
    if args.command == "run":
        return with_overrides(load_config(args.config), **overrides)

    task = Task(args.command)
    solver = SolverConfig()
    if hasattr(args, "solver"):
        solver = SolverConfig(
            args.solver,
            args.pool,
            args.grad_eps,
            args.variance_eps,
            args.max_iter,
            _SOLVER.optimizer_tol,
            args.canonicalize,
        )
    system = SystemConfig(
        getattr(args, "geometry", None),
        getattr(args, "fcidump", None),
        getattr(args, "plan", None),
    )
    mbe, dmet, scan = MbeConfig(), DmetConfig(), ScanConfig()
    if task is Task.MBE:
        mbe = MbeConfig(args.order, args.correction, tuple(sorted(args.active_window)))
    elif task is Task.DMET:
        dmet = DmetConfig(args.fitting, args.electron_tol, args.cost_tol, args.max_outer, args.mu_bracket)
    elif task is Task.SCAN:
        scan = ScanConfig(args.atoms, args.fragment_size, args.start, args.stop, args.step, tuple(args.methods))
    config = RunConfig(task, system, solver, mbe, dmet, scan)
    return with_overrides(config, **overrides)


def _log_events() -> RunEventManager:
    events = RunEventManager()

    def solved(event: SubproblemSolvedEvent) -> None:
        logger.log(logging.DEBUG, "%r", event)

    def failed(event: SubproblemFailedEvent) -> None:
        logger.log(logging.WARNING, "%r", event)

    events.on_subproblem_solved(solved)
    events.on_subproblem_failed(failed)
    return events


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``fragvqe`` console script."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        report = run(config, _log_events())
        emit_report(report, config.output_dir)
    except ConfigError as e:
        logger.log(logging.ERROR, "Configuration error in %s: %s", e.field, e.message)
        return 1
    except FragVqeError as e:
        logger.log(logging.ERROR, "%s", e)
        return 1
    for summary in report.summary():
        logger.log(
            logging.INFO,
            "%s: %d points, mean |dE| %.3f mEh, max |dE| %.3f mEh",
            summary.method,
            summary.n_points,
            summary.mean_abs_mhartree,
            summary.max_abs_mhartree,
        )
    if report.partial:
        logger.log(logging.WARNING, "Report is partial: some subproblems or grid points failed")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
