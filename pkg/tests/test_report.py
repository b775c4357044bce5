# ruff: noqa: D100,D101,D102,D103,D107,S101,PLR2004,SLF001
import csv
import json
import tempfile
from pathlib import Path

import pytest

from fragvqe.report import CSV_COLUMNS, RunRecord, RunReport, emit_report, read_report, report_to_csv


def sample_report() -> RunReport:
    report = RunReport("scan")
    report.add(RunRecord("mbe2", 1.0, -1.5, -1.501, 3, 4, 12.34))
    report.add(RunRecord("mbe2", 1.25, -1.4, -1.403, 3, 4, 10.0))
    report.add(RunRecord("dmet", 1.0, -1.5005, -1.501, 2, 8, 40.0))
    return report


class TestRunRecord:
    def test_deviation(self) -> None:
        record = RunRecord("fci", None, -1.2, -1.25)
        assert record.deviation == pytest.approx(0.05)
        assert record.ok
        assert RunRecord("fci", None, -1.2).deviation is None
        assert RunRecord("fci", None, None, -1.25).deviation is None

    def test_failed_record(self) -> None:
        record = RunRecord("mbe3", 2.0, None, -1.0, status="failed", error="boom")
        assert not record.ok
        assert record.deviation is None


class TestRunReport:
    def test_methods_keep_first_appearance(self) -> None:
        assert sample_report().methods() == ["mbe2", "dmet"]

    def test_summary(self) -> None:
        summary = {s.method: s for s in sample_report().summary()}
        assert summary["mbe2"].n_points == 2
        assert summary["mbe2"].mean_abs_mhartree == pytest.approx(2.0)
        assert summary["mbe2"].max_abs_mhartree == pytest.approx(3.0)
        assert summary["dmet"].max_abs_mhartree == pytest.approx(0.5)

    def test_summary_skips_records_without_reference(self) -> None:
        report = RunReport("fci", [RunRecord("fci", None, -1.0)])
        assert report.summary() == []

    def test_partial(self) -> None:
        report = sample_report()
        assert not report.partial
        report.add(RunRecord("dmet", 1.25, -1.4, status="unconverged"))
        assert report.partial
        assert len(report) == 4

    def test_toolchain_stamp(self) -> None:
        toolchain = RunReport("fci").toolchain
        assert set(toolchain) == {"fragvqe", "python", "numpy", "scipy"}


class TestCsv:
    def test_columns_and_formatting(self) -> None:
        rows = list(csv.reader(report_to_csv(sample_report()).splitlines()))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert rows[1] == ["mbe2", "1.0000", "-1.500000000000", "-1.501000000000", "1.000000000", "4", "12.3"]
        assert len(rows) == 4

    def test_failed_record_keeps_empty_cells(self) -> None:
        report = RunReport("mbe", [RunRecord("mbe2", None, None, -1.0, status="partial")])
        row = list(csv.reader(report_to_csv(report).splitlines()))[1]
        assert row[:5] == ["mbe2", "", "", "-1.000000000000", ""]

    def test_nan_energy_is_empty(self) -> None:
        report = RunReport("mbe", [RunRecord("mbe2", None, float("nan"))])
        row = list(csv.reader(report_to_csv(report).splitlines()))[1]
        assert row[2] == ""


class TestEmitReport:
    def test_writes_csv_and_json(self) -> None:
        report = sample_report()
        with tempfile.TemporaryDirectory() as tmpdir:
            out = Path(tmpdir) / "nested" / "out"
            csv_path, json_path = emit_report(report, out, stem="h4")
            assert csv_path == out / "h4.csv"
            assert csv_path.read_text(encoding="utf-8") == report_to_csv(report)
            data = json.loads(json_path.read_text(encoding="utf-8"))
            assert data["task"] == "scan"
            assert len(data["records"]) == 3
            loaded = read_report(json_path)
        assert loaded.records == report.records
        assert loaded.toolchain == report.toolchain

    def test_empty_report_is_refused(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir, pytest.raises(ValueError, match="empty"):
            emit_report(RunReport("fci"), tmpdir)
