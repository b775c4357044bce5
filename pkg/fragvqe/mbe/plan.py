"""Fragmentation plans: atom partitions plus the bonds cut between fragments."""

import logging
import tomllib
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from fragvqe.errors import PlanError
from fragvqe.geometry import Geometry

logger = logging.getLogger(__name__)

DEFAULT_CAP_BOND_LENGTH = 1.061


@dataclass(frozen=True)
class FragmentationPlan:
    """Disjoint atom fragments, the severed bonds between them and the cap bond length.

    ``orbital_fragments`` optionally partitions orbital indices instead of atoms;
    it is used when DMET runs on integrals ingested from an FCIDUMP file, which
    carry no geometry.
    """

    fragments: tuple[tuple[int, ...], ...]
    severed_bonds: tuple[tuple[int, int], ...] = ()
    cap_bond_length: float = DEFAULT_CAP_BOND_LENGTH
    orbital_fragments: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        """Normalize nested sequences to sorted tuples and check internal consistency."""
        fragments = tuple(tuple(sorted(int(i) for i in f)) for f in self.fragments)
        object.__setattr__(self, "fragments", fragments)
        bonds = tuple((int(a), int(b)) for a, b in self.severed_bonds)
        object.__setattr__(self, "severed_bonds", bonds)
        if self.orbital_fragments is not None:
            orbital = tuple(tuple(sorted(int(i) for i in f)) for f in self.orbital_fragments)
            object.__setattr__(self, "orbital_fragments", orbital)
            _check_disjoint(orbital, "orbital fragment")

        if not fragments and self.orbital_fragments is None:
            msg = "plan lists no fragments"
            raise PlanError(msg)
        if any(not f for f in fragments):
            msg = "empty fragment"
            raise PlanError(msg)
        if self.cap_bond_length <= 0:
            msg = f"cap bond length must be positive, got {self.cap_bond_length}"
            raise PlanError(msg)
        _check_disjoint(fragments, "fragment")
        owner = self.fragment_of
        for a, b in bonds:
            if a not in owner or b not in owner:
                msg = f"severed bond ({a}, {b}) names an atom outside every fragment"
                raise PlanError(msg)
            if owner[a] == owner[b]:
                msg = f"severed bond ({a}, {b}) lies inside fragment {owner[a]}"
                raise PlanError(msg)

    @property
    def n_fragments(self) -> int:
        """Number of fragments."""
        return len(self.fragments)

    @property
    def fragment_of(self) -> dict[int, int]:
        """Map from atom index to the index of the fragment holding it."""
        return {atom: i for i, fragment in enumerate(self.fragments) for atom in fragment}

    def validate(self, geometry: Geometry) -> None:
        """Check that the fragments cover exactly the atoms of ``geometry``.

        Raises:
            PlanError: An atom is missing, unknown or the plan is atom-less.

        """
        covered = set(self.fragment_of)
        expected = set(range(len(geometry)))
        if covered != expected:
            missing = sorted(expected - covered)
            unknown = sorted(covered - expected)
            msg = f"fragments do not cover the geometry (missing {missing}, unknown {unknown})"
            raise PlanError(msg)

    @classmethod
    def consecutive(
        cls,
        n_atoms: int,
        size: int,
        cap_bond_length: float = DEFAULT_CAP_BOND_LENGTH,
    ) -> "FragmentationPlan":
        """Split atoms 0..n_atoms-1 into consecutive blocks of ``size`` (no bonds severed)."""
        if size < 1 or n_atoms % size:
            msg = f"cannot split {n_atoms} atoms into blocks of {size}"
            raise PlanError(msg)
        fragments = tuple(tuple(range(i, i + size)) for i in range(0, n_atoms, size))
        return cls(fragments, (), cap_bond_length)

    def to_toml(self) -> str:
        """Render the plan in the plan-file format read by :func:`load_plan`."""
        lines = [f"fragments = {_int_lists(self.fragments)}"]
        lines.append(f"severed_bonds = {_int_lists(self.severed_bonds)}")
        lines.append(f"cap_bond_length = {self.cap_bond_length!r}")
        if self.orbital_fragments is not None:
            lines.append(f"orbital_fragments = {_int_lists(self.orbital_fragments)}")
        return "\n".join(lines) + "\n"


def _int_lists(groups: Sequence[Sequence[int]]) -> str:
    return "[" + ", ".join("[" + ", ".join(str(i) for i in g) + "]" for g in groups) + "]"


def _check_disjoint(groups: tuple[tuple[int, ...], ...], what: str) -> None:
    seen: dict[int, int] = {}
    for i, group in enumerate(groups):
        for index in group:
            if index < 0:
                msg = f"{what} {i} holds negative index {index}"
                raise PlanError(msg)
            if index in seen:
                msg = f"index {index} appears in {what}s {seen[index]} and {i}"
                raise PlanError(msg)
            seen[index] = i


def plan_from_mapping(data: dict[str, object]) -> FragmentationPlan:
    """Build a plan from a parsed TOML table.

    Raises:
        PlanError: A key is missing or has the wrong shape.

    """
    unknown = set(data) - {"fragments", "severed_bonds", "cap_bond_length", "orbital_fragments"}
    if unknown:
        msg = f"unknown keys {sorted(unknown)}"
        raise PlanError(msg)
    try:
        fragments = [list(f) for f in data.get("fragments", [])]  # type: ignore[union-attr]
        bonds = [tuple(b) for b in data.get("severed_bonds", [])]  # type: ignore[union-attr]
        cap = float(data.get("cap_bond_length", DEFAULT_CAP_BOND_LENGTH))  # type: ignore[arg-type]
        orbital = data.get("orbital_fragments")
        orbital_fragments = None if orbital is None else [list(f) for f in orbital]  # type: ignore[union-attr]
    except (TypeError, ValueError) as e:
        msg = f"malformed plan table: {e}"
        raise PlanError(msg) from e
    if any(len(b) != 2 for b in bonds):  # noqa: PLR2004 - a bond joins two atoms
        msg = "each severed bond must be an [a, b] pair"
        raise PlanError(msg)
    return FragmentationPlan(
        tuple(tuple(f) for f in fragments),
        tuple((b[0], b[1]) for b in bonds),
        cap,
        None if orbital_fragments is None else tuple(tuple(f) for f in orbital_fragments),
    )


def load_plan(path: Path | str) -> FragmentationPlan:
    """Read a plan file (TOML with ``fragments``, ``severed_bonds``, ``cap_bond_length``)."""
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        msg = f"{path}: {e}"
        raise PlanError(msg) from e
    plan = plan_from_mapping(data)
    logger.log(logging.DEBUG, "Loaded plan with %d fragments from %s", plan.n_fragments, path)
    return plan
