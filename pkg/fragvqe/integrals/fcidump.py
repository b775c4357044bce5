"""FCIDUMP reader and writer.

The header is a Fortran namelist ``&FCI NORB=..,NELEC=..,MS2=..,ORBSYM=..,ISYM=.. &END``
followed by records ``value i j k l`` with 1-based orbital indices:

* ``i j k l`` all non-zero: two-electron integral (ij|kl)
* ``i j 0 0``: one-electron integral h_ij
* ``i 0 0 0``: orbital energy (ignored)
* ``0 0 0 0``: core energy
"""

import logging
import re
from pathlib import Path

import numpy as np

from fragvqe.errors import FcidumpParseError, SymmetryViolationError

from .mo import MOIntegrals

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9
WRITE_THRESHOLD = 1e-14
_HEADER_KEY = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=")
_INTEGER_KEYS = frozenset({"NORB", "NELEC", "MS2", "ORBSYM", "ISYM"})


def _parse_header(text: str, path: Path) -> dict[str, list[int]]:
    body = re.sub(r"^\s*&FCI", "", text, flags=re.IGNORECASE)
    body = re.sub(r"(&END|/)\s*$", "", body.strip(), flags=re.IGNORECASE)
    parts = _HEADER_KEY.split(body)
    values: dict[str, list[int]] = {}
    for key, raw in zip(parts[1::2], parts[2::2], strict=True):
        tokens = [t for t in re.split(r"[,\s]+", raw) if t]
        try:
            values[key.upper()] = [int(t) for t in tokens]
        except ValueError as e:
            # flags such as UHF=.FALSE. are tolerated, the integer keys are not
            if key.upper() in _INTEGER_KEYS:
                raise FcidumpParseError(path, 1, f"bad value for {key}: {raw.strip()!r}") from e
    return values


def read_fcidump(path: Path | str) -> MOIntegrals:
    """Read an FCIDUMP file into MOIntegrals, filling all symmetry-equivalent entries.

    Raises:
        FcidumpParseError: Malformed header or record (with its line number).
        SymmetryViolationError: Equivalent entries disagree beyond 1e-9.

    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    header_lines: list[str] = []
    body_start = None
    for lineno, line in enumerate(lines):
        header_lines.append(line)
        stripped = line.strip().upper()
        if stripped.endswith(("&END", "/")) or stripped == "&END":
            body_start = lineno + 1
            break
    if body_start is None or not header_lines[0].strip().upper().startswith("&FCI"):
        raise FcidumpParseError(path, 1, "missing &FCI ... &END header")
    header = _parse_header(" ".join(header_lines), path)
    if "NORB" not in header or "NELEC" not in header:
        raise FcidumpParseError(path, 1, "header lacks NORB or NELEC")
    n = header["NORB"][0]
    n_elec = header["NELEC"][0]
    ms2 = header.get("MS2", [0])[0]

    h = np.zeros((n, n))
    v = np.zeros((n, n, n, n))
    h_seen = np.zeros((n, n), dtype=bool)
    v_seen = np.zeros((n, n, n, n), dtype=bool)
    e_core = 0.0
    core_seen = False

    def store(
        target: np.ndarray,
        seen: np.ndarray,
        positions: list[tuple[int, ...]],
        value: float,
        label: tuple[int, ...],
    ) -> None:
        for pos in positions:
            if seen[pos] and abs(target[pos] - value) > SYMMETRY_TOL:
                raise SymmetryViolationError(label, float(target[pos]), value)
            target[pos] = value
            seen[pos] = True

    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 5:  # noqa: PLR2004 - value plus four indices
            raise FcidumpParseError(path, lineno, f"expected 5 fields, got {len(tokens)}")
        try:
            value = float(tokens[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(t) for t in tokens[1:])  # noqa: E741 - FCIDUMP index names
        except ValueError as e:
            raise FcidumpParseError(path, lineno, f"bad record {line.strip()!r}") from e
        if not all(0 <= x <= n for x in (i, j, k, l)):
            raise FcidumpParseError(path, lineno, f"index out of range 0..{n}")
        label = (i, j, k, l)
        if i == j == k == l == 0:
            if core_seen and abs(e_core - value) > SYMMETRY_TOL:
                raise SymmetryViolationError(label, e_core, value)
            e_core, core_seen = value, True
        elif i and j and k and l:
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            positions = [
                (p, q, r, s),
                (q, p, r, s),
                (p, q, s, r),
                (q, p, s, r),
                (r, s, p, q),
                (s, r, p, q),
                (r, s, q, p),
                (s, r, q, p),
            ]
            store(v, v_seen, positions, value, label)
        elif i and j and not k and not l:
            store(h, h_seen, [(i - 1, j - 1), (j - 1, i - 1)], value, label)
        elif i and not j and not k and not l:
            continue
        else:
            raise FcidumpParseError(path, lineno, f"unrecognised index pattern {label}")

    logger.log(logging.INFO, "Read FCIDUMP %s: NORB=%d NELEC=%d MS2=%d", path, n, n_elec, ms2)
    return MOIntegrals(n_orb=n, n_elec=n_elec, h=h, v=v, e_core=e_core, ms2=ms2)


def write_fcidump(mo: MOIntegrals, path: Path | str) -> None:
    """Write MOIntegrals as FCIDUMP, one record per symmetry-unique entry."""
    n = mo.n_orb
    out = [
        f" &FCI NORB={n:4d},NELEC={mo.n_elec:2d},MS2={mo.ms2},",
        "  ORBSYM=" + "1," * n,
        "  ISYM=1,",
        " &END",
    ]
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):  # noqa: E741 - FCIDUMP index names
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    value = mo.v[i, j, k, l]
                    if abs(value) > WRITE_THRESHOLD:
                        out.append(f"{value:25.17e} {i + 1:4d} {j + 1:4d} {k + 1:4d} {l + 1:4d}")
    for i in range(n):
        for j in range(i + 1):
            value = mo.h[i, j]
            if abs(value) > WRITE_THRESHOLD:
                out.append(f"{value:25.17e} {i + 1:4d} {j + 1:4d}    0    0")
    out.append(f"{mo.e_core:25.17e}    0    0    0    0")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
    logger.log(logging.DEBUG, "Wrote FCIDUMP %s (%d records)", path, len(out) - 4)
