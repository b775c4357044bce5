"""N-mer enumeration and hydrogen capping of severed bonds."""

import itertools
import logging
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from fragvqe.errors import DegenerateBondError, PlanError
from fragvqe.geometry import Atom, Geometry

from .plan import DEFAULT_CAP_BOND_LENGTH, FragmentationPlan

logger = logging.getLogger(__name__)

DEGENERATE_BOND_TOL = 1e-6


@dataclass(frozen=True)
class Cap:
    """A capping hydrogen on the severed bond from ``inside`` (kept) to ``outside`` (dropped)."""

    inside: int
    outside: int
    position: tuple[float, float, float]


@dataclass(frozen=True)
class NMer:
    """A union of ``order`` fragments with its capped geometry.

    The first atoms of ``geometry`` are the member atoms in ascending index
    order; caps follow in severed-bond order.
    """

    members: tuple[int, ...]
    atoms: tuple[int, ...]
    geometry: Geometry
    caps: tuple[Cap, ...] = ()

    @property
    def order(self) -> int:
        """Number of member fragments."""
        return len(self.members)

    @property
    def label(self) -> str:
        """Stable label, e.g. ``nmer-0.2``."""
        return "nmer-" + ".".join(str(i) for i in self.members)


def outward_caps(
    geometry: Geometry,
    member_atoms: Iterable[int],
    severed_bonds: Iterable[tuple[int, int]],
    r_ch: float = DEFAULT_CAP_BOND_LENGTH,
) -> tuple[Cap, ...]:
    """Return one cap per severed bond with exactly one endpoint among ``member_atoms``.

    The cap sits on the bond axis at ``r1 + (r2 - r1) / |r2 - r1| * r_ch``
    where ``r1`` is the kept endpoint.

    Raises:
        DegenerateBondError: A severed bond is shorter than 1e-6 angstrom.

    """
    members = set(member_atoms)
    xyz = geometry.coordinates
    caps = []
    for a, b in severed_bonds:
        if (a in members) == (b in members):
            continue
        inside, outside = (a, b) if a in members else (b, a)
        bond = xyz[outside] - xyz[inside]
        length = float(np.linalg.norm(bond))
        if length < DEGENERATE_BOND_TOL:
            raise DegenerateBondError((inside, outside), length)
        position = xyz[inside] + bond / length * r_ch
        caps.append(Cap(inside, outside, (float(position[0]), float(position[1]), float(position[2]))))
    return tuple(caps)


def cap_severed_bonds(
    geometry: Geometry,
    member_atoms: Iterable[int],
    severed_bonds: Iterable[tuple[int, int]],
    r_ch: float = DEFAULT_CAP_BOND_LENGTH,
) -> Geometry:
    """Return the geometry of ``member_atoms`` with hydrogens capping every outward severed bond."""
    atoms = sorted(set(member_atoms))
    caps = outward_caps(geometry, atoms, severed_bonds, r_ch)
    return geometry.subset(atoms).with_atoms(Atom("H", 1, cap.position) for cap in caps)


def enumerate_nmers(plan: FragmentationPlan, geometry: Geometry, order: int) -> list[NMer]:
    """Return every union of ``order`` fragments in lexicographic order, capped.

    Raises:
        PlanError: ``order`` lies outside 1..n_fragments.

    """
    n = plan.n_fragments
    if not 1 <= order <= n:
        msg = f"n-mer order {order} outside 1..{n}"
        raise PlanError(msg)
    nmers = []
    for members in itertools.combinations(range(n), order):
        atoms = tuple(sorted(a for i in members for a in plan.fragments[i]))
        caps = outward_caps(geometry, atoms, plan.severed_bonds, plan.cap_bond_length)
        capped = geometry.subset(atoms).with_atoms(Atom("H", 1, cap.position) for cap in caps)
        nmers.append(NMer(members, atoms, capped, caps))
    logger.log(logging.DEBUG, "Enumerated %d n-mers of order %d", len(nmers), order)
    return nmers
