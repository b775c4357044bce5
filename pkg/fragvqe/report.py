"""Run reports: per-geometry records, deviation statistics, CSV and JSON output."""

import csv
import io
import json
import logging
import math
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "method",
    "parameter",
    "E_total_hartree",
    "E_ref_hartree",
    "deviation_mhartree",
    "max_qubits",
    "wall_ms",
)


@dataclass(frozen=True)
class RunRecord:
    """One method at one geometry. ``parameter`` is the scanned value (angstrom) if any."""

    method: str
    parameter: float | None
    e_total: float | None
    e_ref: float | None = None
    n_subproblems: int = 0
    max_qubits: int = 0
    wall_ms: float = 0.0
    status: str = "ok"
    error: str | None = None

    @property
    def deviation(self) -> float | None:
        """E_total - E_ref in hartree when both are known."""
        if self.e_total is None or self.e_ref is None:
            return None
        return self.e_total - self.e_ref

    @property
    def ok(self) -> bool:
        """True unless the record stands for a failed or partial computation."""
        return self.status == "ok"


@dataclass(frozen=True)
class DeviationSummary:
    """Mean and maximum absolute deviation of one method, in millihartree."""

    method: str
    n_points: int
    mean_abs_mhartree: float
    max_abs_mhartree: float


def toolchain_stamp() -> dict[str, str]:
    """Versions of the interpreter and numerical libraries."""
    from fragvqe import __version__  # noqa: PLC0415 - the package imports this module

    return {
        "fragvqe": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


@dataclass
class RunReport:
    """All records of one run plus the toolchain that produced them."""

    task: str
    records: list[RunRecord] = field(default_factory=list)
    toolchain: dict[str, str] = field(default_factory=toolchain_stamp)

    def __len__(self) -> int:
        """Return the number of records."""
        return len(self.records)

    def add(self, record: RunRecord) -> None:
        """Append a record."""
        self.records.append(record)

    @property
    def partial(self) -> bool:
        """True when any record failed or is partial."""
        return any(not r.ok for r in self.records)

    def methods(self) -> list[str]:
        """Methods in order of first appearance."""
        return list(dict.fromkeys(r.method for r in self.records))

    def summary(self) -> list[DeviationSummary]:
        """Deviation statistics per method over records that have a reference."""
        out = []
        for method in self.methods():
            devs = [abs(d) * 1000 for r in self.records if r.method == method and (d := r.deviation) is not None]
            if devs:
                out.append(DeviationSummary(method, len(devs), math.fsum(devs) / len(devs), max(devs)))
        return out

    def to_dict(self) -> dict[str, object]:
        """Lossless plain-data form."""
        return {"task": self.task, "toolchain": dict(self.toolchain), "records": [asdict(r) for r in self.records]}

    @classmethod
    def from_dict(cls, data: dict[str, object]) -> "RunReport":
        """Inverse of :meth:`to_dict`."""
        records = [RunRecord(**r) for r in data["records"]]  # type: ignore[union-attr,arg-type]
        return cls(str(data["task"]), records, dict(data["toolchain"]))  # type: ignore[arg-type]


def _number(value: float | None, digits: int) -> str:
    if value is None or not math.isfinite(value):
        return ""
    return f"{value:.{digits}f}"


def report_to_csv(report: RunReport) -> str:
    """Render the report with the fixed CSV columns; failed records keep empty energies."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.records:
        deviation = None if r.deviation is None else r.deviation * 1000
        writer.writerow(
            [
                r.method,
                "" if r.parameter is None else f"{r.parameter:.4f}",
                _number(r.e_total, 12),
                _number(r.e_ref, 12),
                _number(deviation, 9),
                r.max_qubits,
                f"{r.wall_ms:.1f}",
            ],
        )
    return buffer.getvalue()


def emit_report(report: RunReport, output_dir: Path | str, stem: str = "report") -> tuple[Path, Path]:
    """Write ``<stem>.csv`` and ``<stem>.json`` into ``output_dir`` and return both paths.

    Raises:
        ValueError: The report has no records.
        OSError: A file could not be written.

    """
    if not report.records:
        msg = "refusing to write an empty report"
        raise ValueError(msg)
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    csv_path = output_dir / f"{stem}.csv"
    json_path = output_dir / f"{stem}.json"
    csv_path.write_text(report_to_csv(report), encoding="utf-8")
    json_path.write_text(json.dumps(report.to_dict(), indent=2, allow_nan=True) + "\n", encoding="utf-8")
    logger.log(logging.INFO, "Wrote %d records to %s and %s", len(report), csv_path, json_path)
    return csv_path, json_path


def read_report(path: Path | str) -> RunReport:
    """Read a structured report written by :func:`emit_report`."""
    return RunReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
