"""Run configuration: TOML files mapped onto frozen dataclasses.

A configuration file looks like::

    task = "mbe"            # adapt | mbe | dmet | scan | fci
    output_dir = "results"
    threads = 4
    oracle = true

    [system]
    geometry = "h10.xyz"    # or fcidump = "c18.fcidump"
    plan = "h10-plan.toml"

    [solver]
    kind = "adapt"          # adapt | exact | rhf
    pool = "spin_adapted"

    [mbe]
    order = 2
    correction = false
    active_windows = { 1 = 4, 2 = 8 }

Relative paths are resolved against the directory of the configuration file.
"""

import logging
import tomllib
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field, fields, replace
from enum import StrEnum
from pathlib import Path
from typing import Any

from .adaptvqe.driver import ConvergenceSpec
from .adaptvqe.pools import PoolKind
from .dmet.driver import ELECTRON_TOL, MU_BRACKET, FittingMode
from .errors import ConfigError
from .mbe.driver import ActiveSpaceRule
from .solvers import AdaptVqeSolver, ExactSolver, MeanFieldSolver, SubproblemSolver

logger = logging.getLogger(__name__)


class Task(StrEnum):
    """What a run computes."""

    ADAPT = "adapt"
    MBE = "mbe"
    DMET = "dmet"
    SCAN = "scan"
    FCI = "fci"


class SolverKind(StrEnum):
    """Subproblem solver families."""

    ADAPT = "adapt"
    EXACT = "exact"
    RHF = "rhf"


class ScanMethod(StrEnum):
    """Methods a bond-length scan can run at every grid point."""

    MBE2 = "mbe2"
    MBE3 = "mbe3"
    MBE2_CORR = "mbe2+corr"
    DMET = "dmet"
    ADAPT = "adapt"


@dataclass(frozen=True)
class SystemConfig:
    """Where the Hamiltonian comes from."""

    geometry: Path | None = None
    fcidump: Path | None = None
    plan: Path | None = None


@dataclass(frozen=True)
class SolverConfig:
    """Subproblem solver settings."""

    kind: SolverKind = SolverKind.ADAPT
    pool: PoolKind = PoolKind.SPIN_ADAPTED
    grad_norm_eps: float = 1e-3
    variance_eps: float = 0.01
    max_iterations: int = 50
    optimizer_tol: float = 1e-7
    canonicalize: bool = True

    def convergence(self) -> ConvergenceSpec:
        """ADAPT stopping rules."""
        return ConvergenceSpec(self.grad_norm_eps, self.variance_eps, self.max_iterations, self.optimizer_tol)

    def build(self) -> SubproblemSolver:
        """Instantiate the concrete solver (without cache layers)."""
        if self.kind is SolverKind.EXACT:
            return ExactSolver()
        if self.kind is SolverKind.RHF:
            return MeanFieldSolver()
        return AdaptVqeSolver(self.pool, self.convergence(), canonicalize=self.canonicalize)


@dataclass(frozen=True)
class MbeConfig:
    """Many-body-expansion settings; ``active_windows`` maps n-mer order to orbital count."""

    order: int = 2
    correction: bool = False
    active_windows: tuple[tuple[int, int], ...] = ()

    @property
    def active_space(self) -> ActiveSpaceRule:
        """The per-order active-space rule."""
        return ActiveSpaceRule(self.active_windows)


@dataclass(frozen=True)
class DmetConfig:
    """DMET loop settings."""

    fitting: FittingMode = FittingMode.CHEMICAL_POTENTIAL
    electron_tol: float = ELECTRON_TOL
    cost_tol: float = 1e-6
    max_iterations: int = 50
    mu_bracket: float = MU_BRACKET


@dataclass(frozen=True)
class ScanConfig:
    """Hydrogen-chain bond-length scan: grid in angstrom, fragment size in atoms."""

    n_atoms: int = 10
    fragment_size: int = 2
    start: float = 0.75
    stop: float = 3.0
    step: float = 0.25
    methods: tuple[ScanMethod, ...] = (ScanMethod.MBE2, ScanMethod.MBE3, ScanMethod.DMET)

    def grid(self) -> tuple[float, ...]:
        """Grid points from ``start`` to ``stop`` inclusive."""
        n = round((self.stop - self.start) / self.step)
        return tuple(round(self.start + i * self.step, 10) for i in range(n + 1))


@dataclass(frozen=True)
class RunConfig:
    """A complete run description."""

    task: Task
    system: SystemConfig = field(default_factory=SystemConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    mbe: MbeConfig = field(default_factory=MbeConfig)
    dmet: DmetConfig = field(default_factory=DmetConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    output_dir: Path = Path("fragvqe-out")
    cache_dir: Path | None = None
    threads: int = 1
    oracle: bool = True

    def validate(self) -> "RunConfig":  # noqa: C901 - one check per documented invariant
        """Return self, or raise ConfigError naming the first offending field."""
        if self.threads < 1:
            raise ConfigError("must be at least 1", "threads")
        sources = [p for p in (self.system.geometry, self.system.fcidump) if p is not None]
        if self.task is Task.SCAN:
            if sources:
                raise ConfigError("a scan generates its own geometries", "system")
        elif len(sources) != 1:
            raise ConfigError("exactly one of geometry and fcidump is required", "system")
        needs_plan = self.task in {Task.MBE, Task.DMET}
        if needs_plan and self.system.plan is None:
            raise ConfigError(f"task {self.task} needs a fragmentation plan", "system.plan")
        if not needs_plan and self.system.plan is not None:
            raise ConfigError(f"task {self.task} takes no fragmentation plan", "system.plan")
        if self.task is Task.MBE and self.system.fcidump is not None:
            raise ConfigError("the many-body expansion needs a geometry", "system.fcidump")
        for path, name in ((self.system.geometry, "geometry"), (self.system.fcidump, "fcidump")):
            if path is not None and not path.is_file():
                raise ConfigError(f"no such file: {path}", f"system.{name}")
        if self.system.plan is not None and not self.system.plan.is_file():
            raise ConfigError(f"no such file: {self.system.plan}", "system.plan")
        if self.mbe.order < 1:
            raise ConfigError("must be at least 1", "mbe.order")
        if self.dmet.electron_tol <= 0 or self.dmet.cost_tol <= 0:
            raise ConfigError("tolerances must be positive", "dmet")
        if self.dmet.max_iterations < 1:
            raise ConfigError("must be at least 1", "dmet.max_iterations")
        scan = self.scan
        if scan.step <= 0 or scan.start <= 0 or scan.stop < scan.start:
            raise ConfigError("needs 0 < start <= stop and step > 0", "scan")
        if scan.n_atoms < 1 or scan.fragment_size < 1 or scan.n_atoms % scan.fragment_size:
            raise ConfigError("n_atoms must be a positive multiple of fragment_size", "scan")
        if not scan.methods:
            raise ConfigError("no methods selected", "scan.methods")
        self.solver.convergence()
        return self


def _windows(value: object) -> tuple[tuple[int, int], ...]:
    if not isinstance(value, Mapping):
        msg = "expected a table of order = orbital count"
        raise TypeError(msg)
    return tuple(sorted((int(k), int(v)) for k, v in value.items()))


def parse_methods(value: object) -> tuple[ScanMethod, ...]:
    """Parse a comma-separated string or a list of scan method names."""
    if isinstance(value, str):
        value = [v.strip() for v in value.split(",") if v.strip()]
    if not isinstance(value, list | tuple):
        msg = "expected a list of method names"
        raise TypeError(msg)
    return tuple(ScanMethod(v) for v in value)


def _int(value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        msg = f"expected an integer, got {value!r}"
        raise TypeError(msg)
    return value


def _bool(value: object) -> bool:
    if not isinstance(value, bool):
        msg = f"expected true or false, got {value!r}"
        raise TypeError(msg)
    return value


@dataclass(frozen=True)
class _TopLevel:
    task: Task = Task.FCI
    output_dir: Path = Path("fragvqe-out")
    cache_dir: Path | None = None
    threads: int = 1
    oracle: bool = True


_CONVERTERS: dict[str, Callable[[Any], Any]] = {
    "task": Task,
    "kind": SolverKind,
    "pool": PoolKind,
    "fitting": FittingMode,
    "active_windows": _windows,
    "methods": parse_methods,
    "correction": _bool,
    "canonicalize": _bool,
    "oracle": _bool,
}


def _build[T](cls: type[T], table: Mapping[str, Any], prefix: str, base: Path) -> T:
    """Instantiate a config dataclass from a TOML table, converting and checking every key."""
    known = {f.name: f for f in fields(cls)}  # type: ignore[arg-type]
    values: dict[str, Any] = {}
    for key, raw in table.items():
        name = f"{prefix}{key}"
        if key not in known:
            raise ConfigError("unknown key", name)
        default = getattr(cls(), key)
        try:
            if key in _CONVERTERS:
                value = _CONVERTERS[key](raw)
            elif key in {"geometry", "fcidump", "plan", "output_dir", "cache_dir"}:
                value = Path(raw) if Path(raw).is_absolute() else base / raw
            elif isinstance(default, bool):
                value = _bool(raw)
            elif isinstance(default, int):
                value = _int(raw)
            elif isinstance(default, float):
                value = float(raw)
            else:
                value = raw
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e), name) from e
        values[key] = value
    return cls(**values)


def config_from_mapping(data: Mapping[str, Any], base: Path | None = None) -> RunConfig:
    """Build and validate a RunConfig from a parsed TOML document.

    Raises:
        ConfigError: A key is unknown, has the wrong type or breaks an invariant.

    """
    base = base or Path()
    if "task" not in data:
        raise ConfigError("missing", "task")
    sections = {
        "system": SystemConfig,
        "solver": SolverConfig,
        "mbe": MbeConfig,
        "dmet": DmetConfig,
        "scan": ScanConfig,
    }
    top = {k: v for k, v in data.items() if k not in sections}
    config = _build(_TopLevel, top, "", base)
    parts = {}
    for name, cls in sections.items():
        table = data.get(name, {})
        if not isinstance(table, Mapping):
            raise ConfigError("expected a table", name)
        parts[name] = _build(cls, table, f"{name}.", base)
    return RunConfig(
        config.task,
        output_dir=config.output_dir,
        cache_dir=config.cache_dir,
        threads=config.threads,
        oracle=config.oracle,
        **parts,
    ).validate()


def load_config(path: Path | str) -> RunConfig:
    """Read and validate a TOML run configuration."""
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(str(e), "config") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(str(e), "config") from e
    config = config_from_mapping(data, path.parent)
    logger.log(logging.DEBUG, "Loaded %s configuration from %s", config.task, path)
    return config


def with_overrides(config: RunConfig, **overrides: object) -> RunConfig:
    """Return a validated copy with top-level fields replaced (None values are ignored)."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **changes).validate()  # type: ignore[arg-type]
