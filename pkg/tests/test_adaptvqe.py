# ruff: noqa: D100,D101,D102,D103,D107,S101,PLR2004,SLF001
import tempfile
from pathlib import Path

import numpy as np
import pytest

from fragvqe.adaptvqe import (
    Ansatz,
    ConvergenceSpec,
    PoolKind,
    adapt_vqe,
    build_pool,
    energy_and_gradient,
    optimize_parameters,
    pool_gradients,
)
from fragvqe.concurrency import WorkQueue
from fragvqe.dmet import embedding_problem, localize_orbitals, localized_integrals
from fragvqe.errors import AdaptPoolEmptyError, ConfigError
from fragvqe.geometry import hydrogen_chain
from fragvqe.hamiltonian import PauliString, PauliSum, commutator, qubit_hamiltonian
from fragvqe.integrals import AOIntegrals, MOIntegrals, build_ao_integrals, run_rhf
from fragvqe.mbe import FragmentationPlan
from fragvqe.runner import system_integrals
from fragvqe.simulator import casci, expectation, prepare_hf_state
from fragvqe.solvers import AdaptVqeSolver, Subproblem

TIGHT = ConvergenceSpec(grad_norm_eps=1e-6, variance_eps=1e-10, max_iterations=6)


def number_operator(n_qubits: int) -> PauliSum:
    terms = {PauliString.from_letters({k: "Z"}): -0.5 for k in range(n_qubits)}
    return PauliSum(n_qubits, terms) + PauliSum.identity(n_qubits, n_qubits / 2)


@pytest.fixture(scope="module")
def h2_mo() -> MOIntegrals:
    return system_integrals(hydrogen_chain(2, 0.7414))


@pytest.fixture(scope="module")
def h4_mo() -> MOIntegrals:
    return system_integrals(hydrogen_chain(4, 1.0))


class TestPools:
    def test_fermionic_general_size(self) -> None:
        pool = build_pool(2, 2, PoolKind.FERMIONIC_GENERAL)
        assert len(pool) == 4
        assert pool.n_qubits == 4
        assert pool.n_elec == 2

    @pytest.mark.parametrize("kind", list(PoolKind))
    def test_generators_are_anti_hermitian(self, kind: PoolKind) -> None:
        pool = build_pool(3, 2, kind)
        assert len(pool) > 0
        for op in pool:
            assert op.generator.max_real_part() < 1e-12
            assert len(op.rotations) > 0

    @pytest.mark.parametrize("kind", [k for k in PoolKind if k.is_fermionic])
    def test_fermionic_pools_conserve_particle_number(self, kind: PoolKind) -> None:
        pool = build_pool(3, 2, kind)
        n_op = number_operator(pool.n_qubits)
        for op in pool:
            assert len(commutator(n_op, op.generator).simplify()) == 0

    def test_multi_qubit_pool_has_single_strings(self) -> None:
        pool = build_pool(2, 2, "multi_qubit")
        assert not PoolKind.MULTI_QUBIT.is_fermionic
        assert all(len(op.generator) == 1 for op in pool)
        assert all(string.weight <= 4 for op in pool for string in op.generator.terms)

    def test_qeb_generators_have_no_parity_strings(self) -> None:
        pool = build_pool(2, 2, PoolKind.QEB)
        for op in pool:
            assert all(string.z & ~string.x == 0 for string in op.generator.terms)

    @pytest.mark.parametrize("kind", [PoolKind.FERMIONIC_GENERAL, PoolKind.MULTI_QUBIT])
    def test_single_orbital_pool_is_empty(self, kind: PoolKind) -> None:
        with pytest.raises(AdaptPoolEmptyError):
            build_pool(1, 2, kind)

    @pytest.mark.parametrize(("n_orb", "n_elec"), [(0, 0), (2, 5), (2, -1)])
    def test_invalid_sizes(self, n_orb: int, n_elec: int) -> None:
        with pytest.raises(ValueError, match="orbital"):
            build_pool(n_orb, n_elec, PoolKind.FERMIONIC_GENERAL)

    def test_unknown_kind(self) -> None:
        with pytest.raises(ValueError, match="singlet"):
            build_pool(2, 2, "singlet")


class TestOptimizer:
    def test_gradient_matches_finite_differences(self, h2_mo: MOIntegrals) -> None:
        h = qubit_hamiltonian(h2_mo)
        pool = build_pool(2, 2, PoolKind.FERMIONIC_GENERAL)
        ansatz = Ansatz(prepare_hf_state(4, 2)).append(pool[0]).append(pool[3])
        theta = np.array([0.1, -0.2])
        energy, grad = energy_and_gradient(h, ansatz, theta)
        assert energy == pytest.approx(expectation(ansatz.prepare(theta), h))
        step = 1e-6
        for k in range(2):
            shift = np.zeros(2)
            shift[k] = step
            plus, _ = energy_and_gradient(h, ansatz, theta + shift)
            minus, _ = energy_and_gradient(h, ansatz, theta - shift)
            assert grad[k] == pytest.approx((plus - minus) / (2 * step), abs=1e-6)

    def test_empty_ansatz(self, h2_mo: MOIntegrals) -> None:
        h = qubit_hamiltonian(h2_mo)
        result = optimize_parameters(h, Ansatz(prepare_hf_state(4, 2)))
        assert result.converged
        assert result.message == "empty ansatz"
        assert result.energy == pytest.approx(expectation(prepare_hf_state(4, 2), h))

    def test_bad_start_shape(self, h2_mo: MOIntegrals) -> None:
        pool = build_pool(2, 2, PoolKind.FERMIONIC_GENERAL)
        ansatz = Ansatz(prepare_hf_state(4, 2)).append(pool[0])
        with pytest.raises(ValueError, match="theta0"):
            optimize_parameters(qubit_hamiltonian(h2_mo), ansatz, np.zeros(3))

    def test_operator_parameter_mismatch(self) -> None:
        pool = build_pool(2, 2, PoolKind.FERMIONIC_GENERAL)
        with pytest.raises(ValueError, match="parameters"):
            Ansatz(prepare_hf_state(4, 2), (pool[0],), ())

    def test_optimization_never_rises(self, h4_mo: MOIntegrals) -> None:
        h = qubit_hamiltonian(h4_mo)
        pool = build_pool(4, 4, PoolKind.FERMIONIC_GENERAL)
        ansatz = Ansatz(prepare_hf_state(8, 4)).append(pool[0]).append(pool[-1])
        start, _ = energy_and_gradient(h, ansatz, np.zeros(2))
        result = optimize_parameters(h, ansatz)
        assert result.energy <= start + 1e-12
        assert result.n_evaluations >= 1
        assert result.history[0] == pytest.approx(start)


class TestAdaptVqe:
    def test_h2_reaches_casci(self, h2_mo: MOIntegrals) -> None:
        h = qubit_hamiltonian(h2_mo)
        result = adapt_vqe(h, build_pool(2, 2, PoolKind.FERMIONIC_GENERAL), TIGHT)
        assert result.energy == pytest.approx(casci(h2_mo).energy, abs=1e-6)
        assert result.converged
        assert result.reason in {"gradient", "variance"}
        assert expectation(result.state, h) == pytest.approx(result.energy, abs=1e-9)

    def test_trace(self, h2_mo: MOIntegrals) -> None:
        h = qubit_hamiltonian(h2_mo)
        result = adapt_vqe(h, build_pool(2, 2, PoolKind.FERMIONIC_GENERAL), TIGHT)
        assert len(result.trace) == result.n_iterations + 1
        first = result.trace[0]
        assert first.iteration == 0
        assert first.operator == ""
        assert first.energy == pytest.approx(expectation(prepare_hf_state(4, 2), h))
        assert result.trace[-1].energy == pytest.approx(result.energy)
        energies = [record.energy for record in result.trace]
        assert all(b <= a + 1e-10 for a, b in zip(energies, energies[1:], strict=False))

    def test_write_trace(self, h2_mo: MOIntegrals) -> None:
        result = adapt_vqe(qubit_hamiltonian(h2_mo), build_pool(2, 2, PoolKind.FERMIONIC_GENERAL), TIGHT)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "adapt-trace.txt"
            result.write_trace(path)
            lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# iter energy_hartree grad_norm variance operator"
        assert len(lines) == len(result.trace) + 1
        assert lines[1].split()[0] == "0"
        assert lines[1].split()[4] == "-"

    def test_iteration_cap(self, h4_mo: MOIntegrals) -> None:
        h = qubit_hamiltonian(h4_mo)
        conv = ConvergenceSpec(grad_norm_eps=1e-9, variance_eps=1e-9, max_iterations=1)
        result = adapt_vqe(h, build_pool(4, 4, PoolKind.FERMIONIC_GENERAL), conv)
        assert not result.converged
        assert result.reason == "max_iterations"
        assert result.n_iterations == 1
        assert len(result.trace) == 2
        assert result.energy < result.trace[0].energy

    def test_pool_width_must_match(self, h4_mo: MOIntegrals) -> None:
        with pytest.raises(ValueError, match="qubits"):
            adapt_vqe(qubit_hamiltonian(h4_mo), build_pool(2, 2, PoolKind.FERMIONIC_GENERAL))

    def test_pool_gradients_on_work_queue(self, h4_mo: MOIntegrals) -> None:
        h = qubit_hamiltonian(h4_mo)
        pool = build_pool(4, 4, PoolKind.FERMIONIC_GENERAL)
        state = prepare_hf_state(8, 4)
        serial = pool_gradients(state, h, pool)
        with WorkQueue(3) as wq:
            threaded = pool_gradients(state, h, pool, wq)
        assert serial.shape == (len(pool),)
        assert np.allclose(serial, threaded)
        assert np.max(np.abs(serial)) > 1e-3

    @pytest.mark.parametrize(
        ("field", "kwargs"),
        [
            ("grad_norm_eps", {"grad_norm_eps": 0.0}),
            ("variance_eps", {"variance_eps": -1.0}),
            ("max_iterations", {"max_iterations": 0}),
        ],
    )
    def test_convergence_spec_rejects_non_positive(self, field: str, kwargs: dict) -> None:
        with pytest.raises(ConfigError) as info:
            ConvergenceSpec(**kwargs)
        assert info.value.field == field

    @pytest.mark.parametrize("kind", list(PoolKind))
    def test_pool_gradients_match_finite_differences(self, h4_mo: MOIntegrals, kind: PoolKind) -> None:
        h = qubit_hamiltonian(h4_mo)
        pool = build_pool(4, 4, kind)
        state = Ansatz(prepare_hf_state(8, 4)).append(pool[0], 0.2).append(pool[-1], -0.15).prepare()
        gradients = pool_gradients(state, h, pool)
        step = 1e-5
        for op, gradient in zip(pool, gradients, strict=True):
            ansatz = Ansatz(state).append(op)
            plus, _ = energy_and_gradient(h, ansatz, np.array([step]))
            minus, _ = energy_and_gradient(h, ansatz, np.array([-step]))
            assert gradient == pytest.approx((plus - minus) / (2 * step), abs=1e-7)

    def test_h4_spin_adapted_reaches_casci(self, h4_mo: MOIntegrals) -> None:
        h = qubit_hamiltonian(h4_mo)
        conv = ConvergenceSpec(grad_norm_eps=1e-6, variance_eps=1e-10, max_iterations=60)
        result = adapt_vqe(h, build_pool(4, 4, PoolKind.SPIN_ADAPTED), conv)
        assert result.converged
        assert result.energy == pytest.approx(casci(h4_mo).energy, abs=1e-6)


@pytest.mark.slow
def test_fermionic_pools_converge_faster_on_h8_embedding() -> None:
    chain = hydrogen_chain(8, 1.0)
    ao = build_ao_integrals(chain)
    orbitals = localize_orbitals(ao, FragmentationPlan.consecutive(8, 2).fragment_of)
    mo = localized_integrals(ao, orbitals, 8)
    density = run_rhf(AOIntegrals.from_orthonormal(mo), 8).raise_if_unconverged().density
    problem = embedding_problem(mo, density, 0, orbitals.fragments[0])
    assert problem.integrals.n_qubits == 8

    conv = ConvergenceSpec(grad_norm_eps=1e-12, variance_eps=0.01, max_iterations=60)
    iterations = {}
    for kind in PoolKind:
        result = AdaptVqeSolver(kind, conv).solve(Subproblem("frag-0", problem.integrals))
        if kind.is_fermionic:
            assert result.metadata["reason"] == "variance"
        iterations[kind] = result.iterations
    fermionic = [n for kind, n in iterations.items() if kind.is_fermionic]
    assert max(fermionic) < iterations[PoolKind.MULTI_QUBIT]
