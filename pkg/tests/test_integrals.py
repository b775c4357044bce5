# ruff: noqa: D100,D101,D102,D103,D107,S101,PLR2004,SLF001
import tempfile
from pathlib import Path

import numpy as np
import pytest

from fragvqe.errors import (
    FcidumpParseError,
    InvalidActiveWindowError,
    InvalidElectronCountError,
    SymmetryViolationError,
    UnsupportedElementError,
)
from fragvqe.geometry import ANGSTROM_TO_BOHR, Atom, Geometry, hydrogen_chain
from fragvqe.integrals import (
    AOIntegrals,
    MOIntegrals,
    build_ao_integrals,
    frontier_window,
    read_fcidump,
    run_rhf,
    transform_to_mo,
    write_fcidump,
)
from fragvqe.integrals.basis import boys_f0, sto3g_basis
from fragvqe.integrals.scf import _Diis, coulomb_exchange, symmetric_orthogonalizer

# H2 at R = 1.4 bohr in STO-3G
H2_SPACING = 1.4 / ANGSTROM_TO_BOHR


@pytest.fixture(scope="module")
def h2_ao() -> AOIntegrals:
    return build_ao_integrals(hydrogen_chain(2, H2_SPACING))


@pytest.fixture(scope="module")
def h4() -> tuple[AOIntegrals, object]:
    ao = build_ao_integrals(hydrogen_chain(4, 1.0))
    return ao, run_rhf(ao, 4).raise_if_unconverged()


class TestStoThreeG:
    def test_overlap(self, h2_ao: AOIntegrals) -> None:
        assert np.allclose(np.diag(h2_ao.overlap), 1.0)
        assert h2_ao.overlap[0, 1] == pytest.approx(0.6593, abs=1e-4)

    def test_core_hamiltonian(self, h2_ao: AOIntegrals) -> None:
        assert h2_ao.hcore[0, 0] == pytest.approx(-1.1204, abs=1e-4)
        assert h2_ao.hcore[0, 1] == pytest.approx(-0.9584, abs=1e-4)

    def test_electron_repulsion(self, h2_ao: AOIntegrals) -> None:
        eri = h2_ao.eri
        assert eri[0, 0, 0, 0] == pytest.approx(0.7746, abs=1e-4)
        assert eri[0, 0, 1, 1] == pytest.approx(0.5697, abs=1e-4)
        assert eri[1, 0, 0, 0] == pytest.approx(0.4441, abs=1e-4)
        assert eri[1, 0, 1, 0] == pytest.approx(0.2970, abs=1e-4)

    def test_eri_permutational_symmetry(self) -> None:
        eri = build_ao_integrals(hydrogen_chain(3, 0.9)).eri
        assert np.allclose(eri, eri.transpose(1, 0, 2, 3))
        assert np.allclose(eri, eri.transpose(0, 1, 3, 2))
        assert np.allclose(eri, eri.transpose(2, 3, 0, 1))

    def test_nuclear_repulsion(self, h2_ao: AOIntegrals) -> None:
        assert h2_ao.e_nuc == pytest.approx(1 / 1.4)

    def test_ao_atoms(self, h2_ao: AOIntegrals) -> None:
        assert h2_ao.ao_atoms == (0, 1)

    def test_unsupported_element(self) -> None:
        with pytest.raises(UnsupportedElementError) as info:
            sto3g_basis(Geometry((Atom.of("Li", 0.0, 0.0, 0.0),)))
        assert info.value.symbol == "Li"

    def test_boys_function(self) -> None:
        assert boys_f0(np.array([0.0]))[0] == 1.0
        t = np.array([1e-11, 1e-9, 1.0, 30.0])
        values = boys_f0(t)
        assert values[0] == pytest.approx(1.0)
        assert values[1] == pytest.approx(1.0 - 1e-9 / 3, rel=1e-12)
        assert values[2] == pytest.approx(0.746824132812427, rel=1e-10)
        assert values[3] == pytest.approx(0.5 * np.sqrt(np.pi / 30.0), rel=1e-10)


class TestRhf:
    def test_h2_energy(self, h2_ao: AOIntegrals) -> None:
        rhf = run_rhf(h2_ao, 2)
        assert rhf.converged
        assert rhf.energy == pytest.approx(-1.1167, abs=2e-4)
        assert np.trace(rhf.density @ h2_ao.overlap) == pytest.approx(2.0)

    def test_orbitals_are_orthonormal(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, rhf = h4
        c = rhf.coefficients
        assert np.allclose(c.T @ ao.overlap @ c, np.eye(4), atol=1e-10)
        assert np.all(np.diff(rhf.orbital_energies) >= 0)

    def test_density_is_self_consistent(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, rhf = h4
        j, k = coulomb_exchange(ao.eri, rhf.density)
        fock = ao.hcore + j - 0.5 * k
        commutator = fock @ rhf.density @ ao.overlap - ao.overlap @ rhf.density @ fock
        assert np.max(np.abs(commutator)) < 1e-6

    @pytest.mark.parametrize("n_elec", [3, -2, 10])
    def test_invalid_electron_count(self, h4: tuple[AOIntegrals, object], n_elec: int) -> None:
        ao, _ = h4
        with pytest.raises(InvalidElectronCountError):
            run_rhf(ao, n_elec)

    def test_unconverged_run_is_flagged(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, _ = h4
        rhf = run_rhf(ao, 4, max_iterations=2)
        assert not rhf.converged
        with pytest.raises(Exception, match="not converged"):
            rhf.raise_if_unconverged()

    def test_unconverged_orbitals_diagonalize_returned_fock(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, _ = h4
        rhf = run_rhf(ao, 4, max_iterations=2)
        c = rhf.coefficients
        assert np.allclose(c.T @ rhf.fock @ c, np.diag(rhf.orbital_energies), atol=1e-10)
        assert np.allclose(c.T @ ao.overlap @ c, np.eye(4), atol=1e-10)

    @pytest.mark.parametrize("first_atom", [0, 2, 4, 6])
    def test_stretched_block_converges_anywhere_in_chain(self, first_atom: int) -> None:
        block = hydrogen_chain(10, 3.0).subset(range(first_atom, first_atom + 4))
        rhf = run_rhf(build_ao_integrals(block), 4)
        assert rhf.converged
        assert rhf.energy == pytest.approx(-1.31331182, abs=1e-6)

    def test_symmetric_orthogonalizer(self, h2_ao: AOIntegrals) -> None:
        x, smallest = symmetric_orthogonalizer(h2_ao.overlap)
        assert np.allclose(x.T @ h2_ao.overlap @ x, np.eye(2))
        assert smallest == pytest.approx(1 - 0.6593, abs=1e-4)


class TestDiis:
    def test_extrapolates_between_independent_errors(self) -> None:
        diis = _Diis(4)
        diis.push(np.eye(2), np.array([[1.0, 0.0], [0.0, 0.0]]))
        diis.push(3.0 * np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert np.allclose(diis.extrapolate(), 2.0 * np.eye(2))
        assert len(diis) == 2

    def test_dependent_history_is_pruned(self) -> None:
        diis = _Diis(4)
        error = np.array([[0.0, 1e-3], [-1e-3, 0.0]])
        diis.push(np.eye(2), error)
        diis.push(2.0 * np.eye(2), error)
        assert np.array_equal(diis.extrapolate(), 2.0 * np.eye(2))
        assert len(diis) == 1

    def test_reset(self) -> None:
        diis = _Diis(2)
        diis.push(np.eye(2), np.zeros((2, 2)))
        diis.reset()
        assert len(diis) == 0


class TestMoTransform:
    def test_fock_is_diagonal(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, rhf = h4
        mo = transform_to_mo(ao, rhf)
        occ = range(rhf.n_occ)
        fock = mo.h + sum(2 * mo.v[:, :, i, i] - mo.v[:, i, i, :] for i in occ)
        assert np.allclose(fock, np.diag(rhf.orbital_energies), atol=1e-6)
        assert mo.e_core == pytest.approx(ao.e_nuc)

    def test_frozen_core_keeps_reference_energy(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, rhf = h4
        mo = transform_to_mo(ao, rhf, (1, 2))
        assert mo.n_orb == 2
        assert mo.n_elec == 2
        determinant = mo.e_core + 2 * mo.h[0, 0] + mo.v[0, 0, 0, 0]
        assert determinant == pytest.approx(rhf.energy, abs=1e-8)

    def test_frontier_window(self, h4: tuple[AOIntegrals, object]) -> None:
        _, rhf = h4
        assert frontier_window(rhf, 2) == (1, 2)
        assert frontier_window(rhf, 3) == (1, 2, 3)
        assert frontier_window(rhf, 10) == (0, 1, 2, 3)

    @pytest.mark.parametrize("window", [(5,), (-1, 0)])
    def test_invalid_window(self, h4: tuple[AOIntegrals, object], window: tuple[int, ...]) -> None:
        ao, rhf = h4
        with pytest.raises(InvalidActiveWindowError):
            transform_to_mo(ao, rhf, window)

    def test_virtual_only_window(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, rhf = h4
        mo = transform_to_mo(ao, rhf, (2, 3))
        assert mo.n_elec == 0
        assert mo.e_core == pytest.approx(rhf.energy, abs=1e-8)

    def test_digest(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, rhf = h4
        mo = transform_to_mo(ao, rhf)
        same = MOIntegrals(mo.n_orb, mo.n_elec, mo.h.copy(), mo.v.copy(), mo.e_core)
        assert mo.digest() == same.digest()
        shifted = mo.with_h(mo.h + 1e-6 * np.eye(4))
        assert mo.digest() != shifted.digest()

    def test_rotation_preserves_determinant_energy(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, rhf = h4
        mo = transform_to_mo(ao, rhf)
        theta = 0.3
        u = np.eye(4)
        u[0, 0] = u[1, 1] = np.cos(theta)
        u[0, 1], u[1, 0] = -np.sin(theta), np.sin(theta)
        rotated = mo.rotated(u)
        h_occ = np.trace(rotated.h[:2, :2])
        assert h_occ == pytest.approx(mo.h[0, 0] + mo.h[1, 1])


class TestFcidump:
    def test_write_then_read(self, h4: tuple[AOIntegrals, object]) -> None:
        ao, rhf = h4
        mo = transform_to_mo(ao, rhf)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "h4.fcidump"
            write_fcidump(mo, path)
            loaded = read_fcidump(path)
        assert loaded.n_orb == 4
        assert loaded.n_elec == 4
        assert loaded.ms2 == 0
        assert np.allclose(loaded.h, mo.h, atol=1e-13)
        assert np.allclose(loaded.v, mo.v, atol=1e-13)
        assert loaded.e_core == pytest.approx(mo.e_core, abs=1e-14)

    def test_missing_header(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "bad.fcidump"
            path.write_text("1.0 1 1 0 0\n", encoding="utf-8")
            with pytest.raises(FcidumpParseError):
                read_fcidump(path)

    def test_bad_record_reports_line(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "bad.fcidump"
            path.write_text(" &FCI NORB=2,NELEC=2,MS2=0,\n &END\n 0.5 1 1 0\n", encoding="utf-8")
            with pytest.raises(FcidumpParseError) as info:
                read_fcidump(path)
        assert info.value.line == 3

    def test_symmetry_violation(self) -> None:
        text = " &FCI NORB=2,NELEC=2,MS2=0,\n &END\n 0.5 1 2 0 0\n 0.6 2 1 0 0\n"
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "asym.fcidump"
            path.write_text(text, encoding="utf-8")
            with pytest.raises(SymmetryViolationError):
                read_fcidump(path)

    def test_fortran_exponents_and_symmetric_fill(self) -> None:
        text = (
            " &FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n"
            " 0.25D+00 2 1 1 1\n -1.0D0 1 1 0 0\n -0.5 2 2 0 0\n 0.1 2 1 0 0\n 0.7 0 0 0 0\n"
        )
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "small.fcidump"
            path.write_text(text, encoding="utf-8")
            mo = read_fcidump(path)
        assert mo.h[0, 1] == mo.h[1, 0] == pytest.approx(0.1)
        assert mo.h[0, 0] == pytest.approx(-1.0)
        for index in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]:
            assert mo.v[index] == pytest.approx(0.25)
        assert mo.e_core == pytest.approx(0.7)
