# ruff: noqa: D100,D101,D102,D103,D107,S101,PLR2004,SLF001
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest

from fragvqe.errors import InvalidGeometryError, UnsupportedMultiplicityError
from fragvqe.geometry import (
    ANGSTROM_TO_BOHR,
    Atom,
    Geometry,
    atomic_number,
    carbon_ring,
    hydrogen_chain,
    read_xyz,
    write_xyz,
)


def test_atom_of_normalizes_symbol() -> None:
    atom = Atom.of("he", 0.0, 0.0, 1.0)
    assert atom.symbol == "He"
    assert atom.charge == 2
    assert atom.position_bohr[2] == pytest.approx(ANGSTROM_TO_BOHR)


def test_unknown_element() -> None:
    with pytest.raises(InvalidGeometryError):
        atomic_number("Xx")


def test_hydrogen_chain() -> None:
    chain = hydrogen_chain(4, 0.75)
    assert len(chain) == 4
    assert chain.n_electrons == 4
    assert np.allclose(chain.coordinates[:, 2], [0.0, 0.75, 1.5, 2.25])
    assert np.allclose(chain.coordinates[:, :2], 0.0)
    chain.require_closed_shell()


@pytest.mark.parametrize(("n", "spacing"), [(0, 1.0), (2, 0.0), (2, -1.0)])
def test_hydrogen_chain_rejects_bad_input(n: int, spacing: float) -> None:
    with pytest.raises(InvalidGeometryError):
        hydrogen_chain(n, spacing)


def test_coincident_atoms_rejected() -> None:
    with pytest.raises(InvalidGeometryError):
        Geometry((Atom("H", 1, (0.0, 0.0, 0.0)), Atom("H", 1, (0.0, 0.0, 0.0))))


def test_non_finite_position_rejected() -> None:
    with pytest.raises(InvalidGeometryError):
        Geometry((Atom("H", 1, (0.0, math.nan, 0.0)),))


def test_odd_electron_count_is_open_shell() -> None:
    with pytest.raises(UnsupportedMultiplicityError) as info:
        hydrogen_chain(3, 1.0).require_closed_shell()
    assert info.value.n_electrons == 3


def test_charge_changes_electron_count() -> None:
    cation = Geometry(hydrogen_chain(3, 1.0).atoms, total_charge=1)
    assert cation.n_electrons == 2
    cation.require_closed_shell()


def test_subset_and_with_atoms() -> None:
    chain = hydrogen_chain(4, 1.0)
    pair = chain.subset([2, 1])
    assert [a.position[2] for a in pair.atoms] == [2.0, 1.0]
    capped = pair.with_atoms([Atom("H", 1, (0.0, 0.0, 5.0))])
    assert len(capped) == 3
    assert capped.n_electrons == 3


def test_translation_keeps_distances() -> None:
    chain = hydrogen_chain(3, 0.9)
    moved = chain.translated((1.0, -2.0, 0.5))
    d0 = np.linalg.norm(chain.coordinates[0] - chain.coordinates[2])
    d1 = np.linalg.norm(moved.coordinates[0] - moved.coordinates[2])
    assert d1 == pytest.approx(d0)
    assert moved.coordinates[0] == pytest.approx([1.0, -2.0, 0.5])


class TestXyz:
    def test_write_then_read(self) -> None:
        geometry = Geometry(
            (Atom.of("H", 0.0, 0.0, 0.0), Atom.of("He", 0.0, 0.0, 1.25), Atom.of("H", 0.1, 0.2, 2.5)),
            total_charge=1,
            spin_multiplicity=2,
        )
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "mol.xyz"
            write_xyz(geometry, path, comment="test")
            loaded = read_xyz(path)
        assert [a.symbol for a in loaded.atoms] == ["H", "He", "H"]
        assert loaded.total_charge == 1
        assert loaded.spin_multiplicity == 2
        assert np.allclose(loaded.coordinates, geometry.coordinates)

    def test_count_mismatch(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "bad.xyz"
            path.write_text("3\n\nH 0 0 0\nH 0 0 1\n", encoding="utf-8")
            with pytest.raises(InvalidGeometryError):
                read_xyz(path)

    def test_bad_coordinate(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "bad.xyz"
            path.write_text("1\n\nH 0 zero 0\n", encoding="utf-8")
            with pytest.raises(InvalidGeometryError, match="bad coordinate"):
                read_xyz(path)


class TestCarbonRing:
    def test_atoms_on_circle(self) -> None:
        ring = carbon_ring(18, 7.3, 0.1)
        radii = np.linalg.norm(ring.coordinates[:, :2], axis=1)
        assert np.allclose(radii, 3.65)
        assert np.allclose(ring.coordinates[:, 2], 0.0)
        assert ring.n_electrons == 108

    def test_bond_length_alternation(self) -> None:
        ring = carbon_ring(10, 5.0, 0.12)
        xyz = ring.coordinates
        bonds = [float(np.linalg.norm(xyz[i] - xyz[(i + 1) % 10])) for i in range(10)]
        short, long = bonds[0::2], bonds[1::2]
        assert np.allclose(short, short[0])
        assert np.allclose(long, long[0])
        assert long[0] - short[0] == pytest.approx(0.12)

    def test_zero_alternation_is_regular(self) -> None:
        ring = carbon_ring(6, 2.8, 0.0, symbol="H")
        xyz = ring.coordinates
        bonds = [float(np.linalg.norm(xyz[i] - xyz[(i + 1) % 6])) for i in range(6)]
        assert np.allclose(bonds, 1.4)

    @pytest.mark.parametrize(("n", "bla"), [(5, 0.1), (2, 0.1), (6, 10.0)])
    def test_rejects_bad_input(self, n: int, bla: float) -> None:
        with pytest.raises(InvalidGeometryError):
            carbon_ring(n, 3.0, bla)
