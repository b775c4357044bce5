# ruff: noqa: D100,D101,D102,D103,D107,S101,PLR2004,SLF001
import itertools
import logging
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest

from fragvqe.concurrency import WorkQueue
from fragvqe.errors import DegenerateBondError, MissingSubproblemError, PlanError
from fragvqe.events import RunEventManager, SubproblemFailedEvent, SubproblemSolvedEvent
from fragvqe.geometry import Atom, Geometry, hydrogen_chain
from fragvqe.mbe import (
    ActiveSpaceRule,
    Cap,
    FragmentationPlan,
    NMer,
    assemble_mbe_energy,
    binding_energy,
    cap_balance,
    cap_severed_bonds,
    check_cap_telescoping,
    enumerate_nmers,
    full_rhf_energy,
    load_plan,
    mbe_coefficient,
    mbe_increments,
    outward_caps,
    plan_from_mapping,
    required_subsets,
    rhf_correction,
    run_mbe,
)
from fragvqe.runner import system_integrals
from fragvqe.simulator import casci
from fragvqe.solvers import ExactSolver, MeanFieldSolver

CAPPED_PLAN = FragmentationPlan(((0, 1), (2, 3), (4, 5)), ((1, 2), (3, 4)))


def pairwise_energies(n: int, max_order: int) -> dict[tuple[int, ...], float]:
    rng = np.random.default_rng(11)
    single = rng.normal(size=n)
    pair = rng.normal(size=(n, n))
    return {
        subset: float(sum(single[i] for i in subset) + sum(pair[i, j] for i, j in itertools.combinations(subset, 2)))
        for k in range(1, max_order + 1)
        for subset in itertools.combinations(range(n), k)
    }


class TestAssembly:
    @pytest.mark.parametrize(
        ("n", "order", "k", "expected"),
        [
            (4, 2, 2, 1),
            (4, 2, 1, -2),
            (4, 3, 3, 1),
            (4, 3, 2, -1),
            (4, 3, 1, 1),
            (4, 4, 3, 0),
            (4, 4, 4, 1),
            (4, 2, 3, 0),
            (3, 2, 1, -1),
        ],
    )
    def test_coefficient(self, n: int, order: int, k: int, expected: int) -> None:
        assert mbe_coefficient(n, order, k) == expected

    def test_required_subsets(self) -> None:
        assert required_subsets(4, 4) == [(0, 1, 2, 3)]
        assert required_subsets(3, 2) == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
        assert len(required_subsets(5, 3)) == 5 + 10 + 10

    @pytest.mark.parametrize("order", [0, 5])
    def test_order_out_of_range(self, order: int) -> None:
        with pytest.raises(PlanError, match="outside"):
            required_subsets(4, order)

    def test_missing_energy(self) -> None:
        energies = pairwise_energies(3, 2)
        del energies[(0, 2)]
        with pytest.raises(MissingSubproblemError) as info:
            assemble_mbe_energy(energies, 3, 2)
        assert info.value.fragments == (0, 2)

    @pytest.mark.parametrize("order", [2, 3, 4])
    def test_pairwise_additive_energy_is_exact_from_second_order(self, order: int) -> None:
        energies = pairwise_energies(5, 5)
        assert assemble_mbe_energy(energies, 5, order) == pytest.approx(energies[(0, 1, 2, 3, 4)])

    def test_increments_sum_to_expansion(self) -> None:
        energies = pairwise_energies(4, 3)
        increments = mbe_increments(energies, 4, 3)
        assert sorted(increments) == [1, 2, 3]
        assert increments[3] == pytest.approx(0.0, abs=1e-12)
        assert math.fsum(increments.values()) == pytest.approx(assemble_mbe_energy(energies, 4, 3))

    def test_binding_energy(self) -> None:
        assert binding_energy(-3.0, [-1.0, -1.5]) == pytest.approx(-0.5)


class TestCaps:
    def test_outward_cap_position(self) -> None:
        chain = hydrogen_chain(4, 1.0)
        caps = outward_caps(chain, [0, 1], [(1, 2)], r_ch=0.5)
        assert caps == (Cap(1, 2, (0.0, 0.0, 1.5)),)
        assert outward_caps(chain, [0, 1, 2, 3], [(1, 2)]) == ()

    def test_capped_geometry(self) -> None:
        chain = hydrogen_chain(4, 1.0)
        capped = cap_severed_bonds(chain, [2, 3], [(1, 2)])
        assert len(capped) == 3
        assert capped.atoms[-1].symbol == "H"
        assert capped.coordinates[-1] == pytest.approx([0.0, 0.0, 2.0 - 1.061])

    def test_degenerate_bond(self) -> None:
        geometry = Geometry((Atom("C", 6, (0.0, 0.0, 0.0)), Atom("C", 6, (0.0, 0.0, 1e-7))))
        with pytest.raises(DegenerateBondError):
            outward_caps(geometry, [0], [(0, 1)])

    def test_caps_cancel_from_second_order(self) -> None:
        chain = hydrogen_chain(6, 1.0)
        nmers = [nmer for k in (1, 2) for nmer in enumerate_nmers(CAPPED_PLAN, chain, k)]
        assert cap_balance(nmers, 3, 2) == {}
        check_cap_telescoping(nmers, 3, 2)

    def test_first_order_keeps_caps(self, caplog: pytest.LogCaptureFixture) -> None:
        chain = hydrogen_chain(6, 1.0)
        nmers = enumerate_nmers(CAPPED_PLAN, chain, 1)
        assert cap_balance(nmers, 3, 1) == {(1, 2): 1, (2, 1): 1, (3, 4): 1, (4, 3): 1}
        with caplog.at_level(logging.WARNING, logger="fragvqe.mbe.assembly"):
            check_cap_telescoping(nmers, 3, 1)
        assert "capping hydrogens" in caplog.text

    def test_uncancelled_cap_is_rejected(self) -> None:
        chain = hydrogen_chain(2, 1.0)
        lone = NMer((0,), (0,), chain.subset([0]), (Cap(0, 1, (0.0, 0.0, 1.0)),))
        with pytest.raises(PlanError, match="do not cancel"):
            check_cap_telescoping([lone], 3, 2)

    def test_enumerate_nmers(self) -> None:
        chain = hydrogen_chain(6, 1.0)
        dimers = enumerate_nmers(CAPPED_PLAN, chain, 2)
        assert [d.label for d in dimers] == ["nmer-0.1", "nmer-0.2", "nmer-1.2"]
        assert dimers[1].atoms == (0, 1, 4, 5)
        assert len(dimers[1].caps) == 2
        assert len(dimers[1].geometry) == 6
        assert dimers[0].order == 2
        with pytest.raises(PlanError):
            enumerate_nmers(CAPPED_PLAN, chain, 4)


class TestFragmentationPlan:
    @pytest.mark.parametrize(
        ("fragments", "bonds", "cap", "match"),
        [
            ((), (), 1.0, "no fragments"),
            (((0,), ()), (), 1.0, "empty fragment"),
            (((0,), (1,)), (), 0.0, "positive"),
            (((0, 1), (1, 2)), (), 1.0, "appears in"),
            (((-1,), (1,)), (), 1.0, "negative"),
            (((0,), (1,)), ((0, 7),), 1.0, "outside every fragment"),
            (((0, 1), (2,)), ((0, 1),), 1.0, "inside fragment"),
        ],
    )
    def test_invalid_plans(
        self,
        fragments: tuple,
        bonds: tuple,
        cap: float,
        match: str,
    ) -> None:
        with pytest.raises(PlanError, match=match):
            FragmentationPlan(fragments, bonds, cap)

    def test_fragment_of_and_validate(self) -> None:
        plan = FragmentationPlan(([3, 2], [0, 1]))
        assert plan.fragments == ((2, 3), (0, 1))
        assert plan.fragment_of == {2: 0, 3: 0, 0: 1, 1: 1}
        plan.validate(hydrogen_chain(4, 1.0))
        with pytest.raises(PlanError, match="missing"):
            plan.validate(hydrogen_chain(6, 1.0))

    def test_consecutive(self) -> None:
        plan = FragmentationPlan.consecutive(6, 2)
        assert plan.fragments == ((0, 1), (2, 3), (4, 5))
        assert plan.n_fragments == 3
        with pytest.raises(PlanError):
            FragmentationPlan.consecutive(5, 2)

    def test_toml_file(self) -> None:
        plan = FragmentationPlan(((0, 1), (2, 3), (4, 5)), ((1, 2), (3, 4)), 1.1, ((0,), (1, 2)))
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "plan.toml"
            path.write_text(plan.to_toml(), encoding="utf-8")
            assert load_plan(path) == plan

    def test_unknown_key(self) -> None:
        with pytest.raises(PlanError, match="unknown keys"):
            plan_from_mapping({"fragments": [[0]], "caps": 2})

    def test_bond_must_be_a_pair(self) -> None:
        with pytest.raises(PlanError, match="pair"):
            plan_from_mapping({"fragments": [[0], [1]], "severed_bonds": [[0, 1, 2]]})

    def test_bad_toml(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "plan.toml"
            path.write_text("fragments = [[0, 1]\n", encoding="utf-8")
            with pytest.raises(PlanError):
                load_plan(path)


class TestActiveSpaceRule:
    def test_frontier(self) -> None:
        rule = ActiveSpaceRule.frontier({2: 8, 1: 4})
        assert rule.windows == ((1, 4), (2, 8))
        assert rule.n_active(2) == 8
        assert rule.n_active(3) is None
        assert ActiveSpaceRule.full().n_active(1) is None

    def test_non_positive_window(self) -> None:
        with pytest.raises(PlanError):
            ActiveSpaceRule.frontier({1: 0})


class TestRunMbe:
    def test_full_order_equals_casci(self) -> None:
        chain = hydrogen_chain(6, 1.0)
        result = run_mbe(chain, FragmentationPlan.consecutive(6, 2), 3, ExactSolver())
        assert not result.partial
        assert result.order == 3
        assert result.e_total == pytest.approx(casci(system_integrals(chain)).energy, abs=1e-8)
        assert result.max_qubits == 12

    def test_order_is_clipped(self) -> None:
        chain = hydrogen_chain(4, 1.0)
        result = run_mbe(chain, FragmentationPlan.consecutive(4, 2), 5, ExactSolver())
        assert result.order == 2
        assert sorted(result.energies) == [(0,), (0, 1), (1,)]
        assert result.e_total == pytest.approx(casci(system_integrals(chain)).energy, abs=1e-8)

    def test_mean_field_with_correction_gives_full_rhf(self) -> None:
        chain = hydrogen_chain(8, 1.0)
        result = run_mbe(chain, FragmentationPlan.consecutive(8, 2), 2, MeanFieldSolver(), correction=True)
        assert result.e_corr != 0.0
        assert result.e_total == pytest.approx(full_rhf_energy(chain), abs=1e-7)
        assert math.fsum(result.increments.values()) == pytest.approx(result.e_mbe)
        assert result.rhf_energies == pytest.approx(result.energies)

    def test_rhf_correction(self) -> None:
        chain = hydrogen_chain(6, 1.0)
        plan = FragmentationPlan.consecutive(6, 2)
        e_mbe = run_mbe(chain, plan, 2, MeanFieldSolver()).e_mbe
        assert rhf_correction(chain, plan) == pytest.approx(full_rhf_energy(chain) - e_mbe)

    def test_work_queue_gives_same_energies(self) -> None:
        chain = hydrogen_chain(6, 1.0)
        plan = FragmentationPlan.consecutive(6, 2)
        serial = run_mbe(chain, plan, 2, ExactSolver())
        with WorkQueue(3) as wq:
            threaded = run_mbe(chain, plan, 2, ExactSolver(), work_queue=wq)
        assert threaded.energies == pytest.approx(serial.energies)
        assert threaded.e_mbe == pytest.approx(serial.e_mbe)

    def test_active_space_rule_limits_qubits(self) -> None:
        chain = hydrogen_chain(6, 1.0)
        plan = FragmentationPlan.consecutive(6, 2)
        full = run_mbe(chain, plan, 2, ExactSolver())
        reduced = run_mbe(chain, plan, 2, ExactSolver(), active_space=ActiveSpaceRule.frontier({2: 2}))
        assert full.max_qubits == 8
        assert reduced.max_qubits == 4
        assert reduced.energies[(0,)] == pytest.approx(full.energies[(0,)])
        assert reduced.energies[(0, 1)] > full.energies[(0, 1)] - 1e-10

    def test_failed_nmers_make_a_partial_result(self) -> None:
        # a single capped end fragment holds three electrons
        chain = hydrogen_chain(6, 1.0)
        events = RunEventManager()
        solved: list[SubproblemSolvedEvent] = []
        failed: list[SubproblemFailedEvent] = []
        events.on_subproblem_solved(solved.append)
        events.on_subproblem_failed(failed.append)
        result = run_mbe(chain, CAPPED_PLAN, 2, ExactSolver(), events=events)
        assert result.partial
        assert math.isnan(result.e_mbe)
        assert math.isnan(result.e_total)
        assert (0,) in result.failures
        assert {e.label for e in failed} == {"nmer-" + ".".join(map(str, k)) for k in result.failures}
        assert len(solved) + len(failed) == 6

    def test_order_must_be_positive(self) -> None:
        with pytest.raises(PlanError):
            run_mbe(hydrogen_chain(4, 1.0), FragmentationPlan.consecutive(4, 2), 0, ExactSolver())

    def test_plan_must_cover_geometry(self) -> None:
        with pytest.raises(PlanError):
            run_mbe(hydrogen_chain(6, 1.0), FragmentationPlan.consecutive(4, 2), 2, ExactSolver())
