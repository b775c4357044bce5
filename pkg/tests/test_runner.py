# ruff: noqa: D100,D101,D102,D103,D107,S101,PLR2004,SLF001
import csv
import tempfile
from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest

from fragvqe.adaptvqe import PoolKind
from fragvqe.cli import build_parser, config_from_args, main
from fragvqe.config import (
    DmetConfig,
    MbeConfig,
    RunConfig,
    ScanConfig,
    ScanMethod,
    SolverConfig,
    SolverKind,
    SystemConfig,
    Task,
)
from fragvqe.dmet import localize_orbitals, localized_integrals
from fragvqe.errors import ConfigError
from fragvqe.events import RunEventManager, SubproblemSolvedEvent
from fragvqe.geometry import hydrogen_chain, write_xyz
from fragvqe.integrals import build_ao_integrals, write_fcidump
from fragvqe.mbe import FragmentationPlan
from fragvqe.report import RunReport
from fragvqe.runner import Runner, default_cache_dir, load_inputs, run, system_integrals
from fragvqe.simulator import casci

EXACT = SolverConfig(SolverKind.EXACT)
CAPPED_PLAN = FragmentationPlan(((0, 1), (2, 3), (4, 5)), ((1, 2), (3, 4)))


@pytest.fixture
def workdir() -> Iterator[Path]:
    with tempfile.TemporaryDirectory() as tmpdir:
        path = Path(tmpdir)
        write_xyz(hydrogen_chain(2, 0.7414), path / "h2.xyz")
        write_xyz(hydrogen_chain(4, 1.0), path / "h4.xyz")
        write_xyz(hydrogen_chain(6, 1.0), path / "h6.xyz")
        (path / "h4-plan.toml").write_text(FragmentationPlan.consecutive(4, 2).to_toml(), encoding="utf-8")
        (path / "h6-capped.toml").write_text(CAPPED_PLAN.to_toml(), encoding="utf-8")
        yield path


@pytest.fixture(scope="module")
def h4_reference() -> float:
    return casci(system_integrals(hydrogen_chain(4, 1.0))).energy


class TestLoadInputs:
    def test_plan_must_fit_geometry(self, workdir: Path) -> None:
        config = RunConfig(Task.MBE, SystemConfig(workdir / "h2.xyz", plan=workdir / "h4-plan.toml"))
        with pytest.raises(ConfigError) as info:
            load_inputs(config)
        assert info.value.field == "system.plan"

    def test_integrals_need_orbital_fragments(self, workdir: Path) -> None:
        write_fcidump(system_integrals(hydrogen_chain(4, 1.0)), workdir / "h4.fcidump")
        config = RunConfig(Task.DMET, SystemConfig(fcidump=workdir / "h4.fcidump", plan=workdir / "h4-plan.toml"))
        with pytest.raises(ConfigError, match="orbital_fragments"):
            load_inputs(config)


class TestRunner:
    def test_fci(self, workdir: Path, h4_reference: float) -> None:
        config = RunConfig(Task.FCI, SystemConfig(workdir / "h4.xyz"), output_dir=workdir / "out").validate()
        report = run(config)
        assert report.task == "fci"
        (record,) = report.records
        assert record.method == "fci"
        assert record.e_total == pytest.approx(h4_reference, abs=1e-10)
        assert record.deviation == 0.0
        assert record.max_qubits == 8

    def test_adapt_writes_trace(self, workdir: Path) -> None:
        solver = SolverConfig(SolverKind.ADAPT, PoolKind.FERMIONIC_GENERAL, 1e-6, 1e-10, 8)
        out = workdir / "out"
        config = RunConfig(Task.ADAPT, SystemConfig(workdir / "h2.xyz"), solver, output_dir=out).validate()
        (record,) = run(config).records
        assert record.method == "adapt"
        assert record.ok
        assert abs(record.deviation) < 1e-6
        lines = (out / "adapt-trace.txt").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# iter energy_hartree grad_norm variance operator"
        assert len(lines) >= 3

    def test_mbe_with_events(self, workdir: Path, h4_reference: float) -> None:
        system = SystemConfig(workdir / "h4.xyz", plan=workdir / "h4-plan.toml")
        config = RunConfig(Task.MBE, system, EXACT, output_dir=workdir / "out").validate()
        events = RunEventManager()
        solved: list[SubproblemSolvedEvent] = []
        events.on_subproblem_solved(solved.append)
        (record,) = Runner(config, events).run().records
        assert record.method == "mbe2"
        assert record.e_total == pytest.approx(h4_reference, abs=1e-8)
        assert record.n_subproblems == 3
        assert record.max_qubits == 8
        assert len(solved) == 3

    def test_mbe_correction_is_named(self, workdir: Path) -> None:
        system = SystemConfig(workdir / "h4.xyz", plan=workdir / "h4-plan.toml")
        config = RunConfig(Task.MBE, system, EXACT, MbeConfig(correction=True), output_dir=workdir / "out")
        (record,) = run(config.validate()).records
        assert record.method == "mbe2+corr"

    def test_partial_mbe(self, workdir: Path) -> None:
        system = SystemConfig(workdir / "h6.xyz", plan=workdir / "h6-capped.toml")
        config = RunConfig(Task.MBE, system, EXACT, output_dir=workdir / "out").validate()
        report = run(config)
        (record,) = report.records
        assert report.partial
        assert record.status == "partial"
        assert record.e_total is None
        assert record.e_ref is not None
        assert record.error

    def test_dmet_on_geometry(self, workdir: Path, h4_reference: float) -> None:
        out = workdir / "out"
        system = SystemConfig(workdir / "h4.xyz", plan=workdir / "h4-plan.toml")
        config = RunConfig(Task.DMET, system, EXACT, output_dir=out).validate()
        (record,) = run(config).records
        assert record.method == "dmet"
        assert record.ok
        assert record.e_total == pytest.approx(h4_reference, abs=1e-6)
        assert (out / "dmet-trace.txt").read_text(encoding="utf-8").startswith("# iter mu cost")

    def test_dmet_on_ingested_integrals(self, workdir: Path) -> None:
        chain = hydrogen_chain(4, 1.0)
        ao = build_ao_integrals(chain)
        orbitals = localize_orbitals(ao, FragmentationPlan.consecutive(4, 2).fragment_of)
        write_fcidump(localized_integrals(ao, orbitals, 4), workdir / "h4-local.fcidump")
        plan = FragmentationPlan((), orbital_fragments=((0, 1), (2, 3)))
        (workdir / "orbital-plan.toml").write_text(plan.to_toml(), encoding="utf-8")
        system = SystemConfig(fcidump=workdir / "h4-local.fcidump", plan=workdir / "orbital-plan.toml")
        config = RunConfig(Task.DMET, system, EXACT, dmet=DmetConfig(), output_dir=workdir / "out").validate()
        (record,) = run(config).records
        assert record.ok
        assert abs(record.deviation) < 1e-6

    def test_oracle_off(self, workdir: Path) -> None:
        config = RunConfig(Task.FCI, SystemConfig(workdir / "h2.xyz"), output_dir=workdir / "out", oracle=False)
        (record,) = run(config.validate()).records
        assert record.e_ref is None
        assert record.deviation is None

    @pytest.mark.parametrize("threads", [1, 2])
    def test_small_scan(self, threads: int) -> None:
        scan = ScanConfig(4, 2, 0.75, 1.0, 0.25, (ScanMethod.MBE2, ScanMethod.DMET))
        with tempfile.TemporaryDirectory() as tmpdir:
            config = RunConfig(Task.SCAN, solver=EXACT, scan=scan, output_dir=Path(tmpdir), threads=threads)
            report = run(config.validate())
        assert [(r.method, r.parameter) for r in report.records] == [
            ("mbe2", 0.75),
            ("mbe2", 1.0),
            ("dmet", 0.75),
            ("dmet", 1.0),
        ]
        assert all(abs(r.deviation) < 1e-6 for r in report.records)
        assert [s.method for s in report.summary()] == ["mbe2", "dmet"]

    def test_failing_scan_method_keeps_the_others(self, monkeypatch: pytest.MonkeyPatch) -> None:
        def singular(*_args: object, **_kwargs: object) -> None:
            msg = "singular matrix"
            raise np.linalg.LinAlgError(msg)

        monkeypatch.setattr("fragvqe.runner.run_dmet", singular)
        scan = ScanConfig(4, 2, 1.0, 1.0, 0.25, (ScanMethod.MBE2, ScanMethod.DMET))
        with tempfile.TemporaryDirectory() as tmpdir:
            config = RunConfig(Task.SCAN, solver=EXACT, scan=scan, output_dir=Path(tmpdir))
            report = run(config.validate())
        mbe2, dmet = report.records
        assert mbe2.ok
        assert abs(mbe2.deviation) < 1e-6
        assert dmet.status == "failed"
        assert dmet.error == "singular matrix"
        assert dmet.e_ref == mbe2.e_ref
        assert report.partial

    def test_disk_cache_is_reused(self, workdir: Path) -> None:
        system = SystemConfig(workdir / "h4.xyz", plan=workdir / "h4-plan.toml")
        config = RunConfig(Task.MBE, system, EXACT, output_dir=workdir / "out", cache_dir=workdir / "cache")
        first = run(config.validate()).records[0]
        assert list((workdir / "cache" / "exact").glob("*.rec"))
        second = run(config.validate()).records[0]
        assert second.e_total == pytest.approx(first.e_total, abs=1e-9)


def test_default_cache_dir() -> None:
    assert default_cache_dir().name == "subproblems"
    assert "fragvqe" in default_cache_dir().parts


class TestCli:
    def test_parser_builds_config(self, workdir: Path) -> None:
        args = build_parser().parse_args(
            [
                "mbe",
                "--geometry",
                str(workdir / "h4.xyz"),
                "--plan",
                str(workdir / "h4-plan.toml"),
                "--order",
                "2",
                "--active-window",
                "2=4",
                "--solver",
                "exact",
                "--threads",
                "3",
            ],
        )
        config = config_from_args(args)
        assert config.task is Task.MBE
        assert config.solver.kind is SolverKind.EXACT
        assert config.mbe.active_windows == ((2, 4),)
        assert config.threads == 3
        assert config.cache_dir is None

    def test_bad_active_window(self, workdir: Path) -> None:
        with pytest.raises(SystemExit):
            build_parser().parse_args(["mbe", "--geometry", "x.xyz", "--plan", "p.toml", "--active-window", "two"])

    def test_fci_succeeds(self, workdir: Path) -> None:
        out = workdir / "out"
        assert main(["fci", "--geometry", str(workdir / "h2.xyz"), "--output-dir", str(out)]) == 0
        rows = list(csv.reader((out / "report.csv").read_text(encoding="utf-8").splitlines()))
        assert rows[1][0] == "fci"
        assert rows[1][4] == "0.000000000"
        assert (out / "report.json").is_file()

    def test_config_error_exits_with_one(self, workdir: Path) -> None:
        argv = ["fci", "--geometry", str(workdir / "absent.xyz"), "--output-dir", str(workdir / "out")]
        assert main(argv) == 1

    def test_partial_report_exits_with_two(self, workdir: Path) -> None:
        argv = [
            "mbe",
            "--geometry",
            str(workdir / "h6.xyz"),
            "--plan",
            str(workdir / "h6-capped.toml"),
            "--solver",
            "exact",
            "--output-dir",
            str(workdir / "out"),
        ]
        assert main(argv) == 2
        rows = list(csv.reader((workdir / "out" / "report.csv").read_text(encoding="utf-8").splitlines()))
        assert rows[1][2] == ""

    def test_run_configuration_file(self, workdir: Path) -> None:
        (workdir / "run.toml").write_text(
            'task = "dmet"\noutput_dir = "dmet-out"\n\n'
            '[system]\ngeometry = "h4.xyz"\nplan = "h4-plan.toml"\n\n'
            '[solver]\nkind = "exact"\n',
            encoding="utf-8",
        )
        assert main(["run", str(workdir / "run.toml"), "--threads", "2"]) == 0
        assert (workdir / "dmet-out" / "dmet-trace.txt").is_file()
        assert (workdir / "dmet-out" / "report.csv").is_file()


@pytest.fixture(scope="module")
def default_scan() -> RunReport:
    with tempfile.TemporaryDirectory() as tmpdir:
        return run(RunConfig(Task.SCAN, output_dir=Path(tmpdir), threads=4).validate())


@pytest.mark.slow
class TestDefaultHydrogenChainScan:
    def test_every_point_succeeds(self, default_scan: RunReport) -> None:
        assert not default_scan.partial
        assert default_scan.methods() == ["mbe2", "mbe3", "dmet"]
        assert len(default_scan) == 3 * len(ScanConfig().grid())

    def test_mean_deviations(self, default_scan: RunReport) -> None:
        summary = {s.method: s.mean_abs_mhartree for s in default_scan.summary()}
        assert abs(summary["mbe2"] - 5.46) <= 3.0
        assert abs(summary["dmet"] - 9.00) <= 4.0
        assert summary["mbe3"] < summary["mbe2"]

    def test_max_qubits(self, default_scan: RunReport) -> None:
        widest = {m: max(r.max_qubits for r in default_scan.records if r.method == m) for m in default_scan.methods()}
        assert widest == {"mbe2": 8, "mbe3": 12, "dmet": 8}

    def test_long_range_points_are_within_a_millihartree(self, default_scan: RunReport) -> None:
        stretched = [r for r in default_scan.records if r.parameter >= 2.5 and r.method in {"mbe2", "dmet"}]
        assert len(stretched) == 6
        assert all(abs(r.deviation) < 1e-3 for r in stretched)


@pytest.mark.slow
def test_exact_scan_from_half_an_angstrom() -> None:
    with tempfile.TemporaryDirectory() as tmpdir:
        out = Path(tmpdir)
        code = main(["scan", "--solver", "exact", "--start", "0.5", "--threads", "4", "--output-dir", str(out)])
        rows = list(csv.reader((out / "report.csv").read_text(encoding="utf-8").splitlines()))
    assert code == 0
    assert len(rows) == 1 + 3 * 11
    assert {row[0] for row in rows[1:]} == {"mbe2", "mbe3", "dmet"}
    assert all(row[2] for row in rows[1:])
