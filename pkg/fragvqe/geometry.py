"""Molecular geometry models, XYZ input/output and built-in structure generators."""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidGeometryError, UnsupportedMultiplicityError

logger = logging.getLogger(__name__)

ANGSTROM_TO_BOHR = 1.8897259886
COINCIDENT_ATOMS_TOL = 1e-8

ELEMENTS: dict[str, int] = {
    "H": 1,
    "He": 2,
    "Li": 3,
    "Be": 4,
    "B": 5,
    "C": 6,
    "N": 7,
    "O": 8,
    "F": 9,
    "Ne": 10,
    "Na": 11,
    "Mg": 12,
    "Al": 13,
    "Si": 14,
    "P": 15,
    "S": 16,
    "Cl": 17,
    "Ar": 18,
}


def atomic_number(symbol: str) -> int:
    """Return the nuclear charge for an element symbol (case-insensitive)."""
    key = symbol.strip().capitalize()
    if key not in ELEMENTS:
        msg = f"unknown element symbol {symbol!r}"
        raise InvalidGeometryError(msg)
    return ELEMENTS[key]


@dataclass(frozen=True)
class Atom:
    """A nucleus: element symbol, integer charge and position in angstrom."""

    symbol: str
    charge: int
    position: tuple[float, float, float]

    @classmethod
    def of(cls, symbol: str, x: float, y: float, z: float) -> "Atom":
        """Create an atom from its symbol, looking up the nuclear charge."""
        return cls(symbol.capitalize(), atomic_number(symbol), (x, y, z))

    @property
    def position_bohr(self) -> np.ndarray:
        """Position converted to bohr."""
        return np.asarray(self.position, dtype=float) * ANGSTROM_TO_BOHR


@dataclass(frozen=True)
class Geometry:
    """A molecule: atoms plus total charge and spin multiplicity."""

    atoms: tuple[Atom, ...]
    total_charge: int = 0
    spin_multiplicity: int = 1

    def __post_init__(self) -> None:
        """Validate nuclear charges, coordinates and multiplicity."""
        object.__setattr__(self, "atoms", tuple(self.atoms))
        for atom in self.atoms:
            if atom.charge < 1:
                msg = f"atom {atom.symbol} has nuclear charge {atom.charge}"
                raise InvalidGeometryError(msg)
            if not all(math.isfinite(c) for c in atom.position):
                msg = f"atom {atom.symbol} has non-finite position {atom.position}"
                raise InvalidGeometryError(msg)
        if self.spin_multiplicity < 1:
            msg = f"spin multiplicity {self.spin_multiplicity} < 1"
            raise InvalidGeometryError(msg)
        if len(self.atoms) > 1:
            xyz = self.coordinates
            dist = np.linalg.norm(xyz[:, None, :] - xyz[None, :, :], axis=-1)
            i, j = np.triu_indices(len(self.atoms), k=1)
            close = dist[i, j] < COINCIDENT_ATOMS_TOL
            if close.any():
                a, b = int(i[close][0]), int(j[close][0])
                msg = f"atoms {a} and {b} share the same coordinates"
                raise InvalidGeometryError(msg)

    def __len__(self) -> int:
        """Return the number of atoms."""
        return len(self.atoms)

    @property
    def n_electrons(self) -> int:
        """Electron count: sum of nuclear charges minus total charge."""
        return sum(a.charge for a in self.atoms) - self.total_charge

    @property
    def coordinates(self) -> np.ndarray:
        """Positions as an (n_atoms, 3) array in angstrom."""
        return np.array([a.position for a in self.atoms], dtype=float).reshape(-1, 3)

    @property
    def coordinates_bohr(self) -> np.ndarray:
        """Positions as an (n_atoms, 3) array in bohr."""
        return self.coordinates * ANGSTROM_TO_BOHR

    def require_closed_shell(self) -> None:
        """Raise unless the geometry is a singlet with an even electron count."""
        n = self.n_electrons
        if self.spin_multiplicity != 1 or n % 2 or n < 0:
            raise UnsupportedMultiplicityError(self.spin_multiplicity, n)

    def translated(self, shift: Sequence[float]) -> "Geometry":
        """Return a rigidly translated copy."""
        dx, dy, dz = (float(s) for s in shift)
        atoms = tuple(
            Atom(a.symbol, a.charge, (a.position[0] + dx, a.position[1] + dy, a.position[2] + dz))
            for a in self.atoms
        )
        return Geometry(atoms, self.total_charge, self.spin_multiplicity)

    def subset(self, indices: Iterable[int], total_charge: int = 0) -> "Geometry":
        """Return the geometry made of the given atoms (in the given order)."""
        return Geometry(tuple(self.atoms[i] for i in indices), total_charge, 1)

    def with_atoms(self, extra: Iterable[Atom]) -> "Geometry":
        """Return a copy with extra atoms appended."""
        return Geometry(
            (*self.atoms, *extra),
            self.total_charge,
            self.spin_multiplicity,
        )


def read_xyz(path: Path | str) -> Geometry:
    """Read an XYZ file (count line, comment line, ``El x y z`` in angstrom).

    The comment line may carry ``charge=<int>`` and ``multiplicity=<int>`` tokens.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if len(lines) < 2:  # noqa: PLR2004 - count line + comment line
        msg = f"{path}: XYZ file needs a count line and a comment line"
        raise InvalidGeometryError(msg)
    try:
        count = int(lines[0].split()[0])
    except (IndexError, ValueError) as e:
        msg = f"{path}:1: expected an atom count"
        raise InvalidGeometryError(msg) from e
    charge, multiplicity = 0, 1
    for token in lines[1].split():
        key, _, value = token.partition("=")
        if key.lower() == "charge" and value:
            charge = int(value)
        elif key.lower() == "multiplicity" and value:
            multiplicity = int(value)
    atoms = []
    for lineno, line in enumerate(lines[2 : 2 + count], start=3):
        parts = line.split()
        if len(parts) < 4:  # noqa: PLR2004 - symbol + three coordinates
            msg = f"{path}:{lineno}: expected 'El x y z'"
            raise InvalidGeometryError(msg)
        try:
            x, y, z = (float(p) for p in parts[1:4])
        except ValueError as e:
            msg = f"{path}:{lineno}: bad coordinate"
            raise InvalidGeometryError(msg) from e
        atoms.append(Atom.of(parts[0], x, y, z))
    if len(atoms) != count:
        msg = f"{path}: header says {count} atoms, found {len(atoms)}"
        raise InvalidGeometryError(msg)
    logger.log(logging.DEBUG, "Read %d atoms from %s", count, path)
    return Geometry(tuple(atoms), charge, multiplicity)


def write_xyz(geometry: Geometry, path: Path | str, comment: str = "") -> None:
    """Write a geometry as an XYZ file."""
    header = f"charge={geometry.total_charge} multiplicity={geometry.spin_multiplicity}"
    lines = [str(len(geometry)), f"{header} {comment}".strip()]
    lines.extend(
        f"{a.symbol:<2s} {a.position[0]:16.10f} {a.position[1]:16.10f} {a.position[2]:16.10f}"
        for a in geometry.atoms
    )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def hydrogen_chain(n_atoms: int, spacing: float) -> Geometry:
    """Return an equispaced linear chain of hydrogen atoms along z (spacing in angstrom)."""
    if n_atoms < 1 or spacing <= 0:
        msg = f"hydrogen chain needs n >= 1 and spacing > 0, got {n_atoms}, {spacing}"
        raise InvalidGeometryError(msg)
    return Geometry(tuple(Atom("H", 1, (0.0, 0.0, i * spacing)) for i in range(n_atoms)))


def carbon_ring(n_atoms: int, diameter: float, bla: float, symbol: str = "C") -> Geometry:
    """Return an even-membered planar ring with fixed diameter and bond-length alternation.

    Bonds alternate between a short and a long chord whose difference is ``bla``
    (angstrom); all atoms stay on the circle of the given diameter.
    """
    if n_atoms < 4 or n_atoms % 2:  # noqa: PLR2004 - smallest alternating ring
        msg = f"alternating ring needs an even atom count >= 4, got {n_atoms}"
        raise InvalidGeometryError(msg)
    radius = diameter / 2
    half_sum = math.pi / n_atoms
    ratio = bla / (4 * radius * math.cos(half_sum))
    if abs(ratio) >= 1:
        msg = f"BLA {bla} is not realisable on a ring of diameter {diameter}"
        raise InvalidGeometryError(msg)
    half_diff = math.asin(ratio)
    short_angle = 2 * (half_sum - half_diff)
    long_angle = 2 * (half_sum + half_diff)
    z = atomic_number(symbol)
    atoms = []
    angle = 0.0
    for i in range(n_atoms):
        atoms.append(Atom(symbol, z, (radius * math.cos(angle), radius * math.sin(angle), 0.0)))
        angle += short_angle if i % 2 == 0 else long_angle
    return Geometry(tuple(atoms))
