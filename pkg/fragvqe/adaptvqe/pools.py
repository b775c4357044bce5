"""Operator pools for ADAPT-VQE.

Every pool operator is an anti-Hermitian qubit generator tau = T - T^dagger.
Spin orbitals are interleaved (mode 2p is p-alpha, 2p+1 is p-beta).

Pool kinds:

* ``fermionic_general``: generalized spin-orbital singles a+_p a_q and
  doubles a+_p a+_q a_r a_s (all indices distinct) that conserve S_z,
  Jordan-Wigner mapped.
* ``spin_complete``: spatial-orbital excitations summed over the spin
  channel and its spin-flipped partner, so each generator commutes with
  spin flip. Singles E_pq^a + E_pq^b; doubles, with
  e(r p s q) = a+_r a_p a+_s a_q,

      e(ra pa sa qa) + e(rb pb sb qb)
      e(ra pa sb qb) + e(rb pb sa qa)
      e(ra pb sb qa) + e(rb pa sa qb)

* ``spin_adapted``: singlet combinations. Singles (E_pq^a + E_pq^b)/sqrt(2);
  doubles

      T1 = 2/sqrt(12) [e(ra pa sa qa) + e(rb pb sb qb)]
           + 1/sqrt(12) [e(ra pa sb qb) + e(rb pb sa qa) + e(ra pb sb qa) + e(rb pa sa qb)]
      T2 = 1/2 [e(ra pa sb qb) + e(rb pb sa qa) - e(ra pb sb qa) - e(rb pa sa qb)]

* ``multi_qubit``: single Pauli strings i*P of weight <= 4 taken from the
  Jordan-Wigner images of the ``fermionic_general`` generators with the Z
  letters removed.
* ``qeb``: the ``fermionic_general`` excitations mapped with qubit
  raising/lowering operators, i.e. without Jordan-Wigner Z strings.

Generators that vanish identically are dropped, as are duplicates (equal up
to sign).
"""

import itertools
import logging
from collections.abc import Iterator
from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property

import numpy as np

from fragvqe.errors import AdaptPoolEmptyError
from fragvqe.hamiltonian.fermion import FermionOperator, Product, spin_orbital
from fragvqe.hamiltonian.jordan_wigner import jordan_wigner, qubit_excitation_map
from fragvqe.hamiltonian.pauli import PauliString, PauliSum
from fragvqe.simulator.statevector import exp_terms

logger = logging.getLogger(__name__)

MAX_PAULI_WEIGHT = 4
_KEY_DIGITS = 10


class PoolKind(StrEnum):
    """Operator pool families."""

    FERMIONIC_GENERAL = "fermionic_general"
    SPIN_COMPLETE = "spin_complete"
    SPIN_ADAPTED = "spin_adapted"
    MULTI_QUBIT = "multi_qubit"
    QEB = "qeb"

    @property
    def is_fermionic(self) -> bool:
        """True for pools whose generators conserve particle number."""
        return self in {PoolKind.FERMIONIC_GENERAL, PoolKind.SPIN_COMPLETE, PoolKind.SPIN_ADAPTED}


@dataclass(frozen=True, eq=False)
class PoolOperator:
    """An anti-Hermitian generator with a provenance label and orbital indices."""

    label: str
    indices: tuple[int, ...]
    generator: PauliSum

    @cached_property
    def rotations(self) -> list[tuple[int, int, float]]:
        """(x, z, r) factors applied by the exponential, in lexicographic order."""
        return exp_terms(self.generator)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Return tau @ psi."""
        return self.generator.apply(psi)


@dataclass(frozen=True, eq=False)
class OperatorPool:
    """The candidate generators ADAPT selects from."""

    kind: PoolKind
    n_qubits: int
    n_elec: int
    operators: tuple[PoolOperator, ...]

    def __len__(self) -> int:
        """Return the number of operators."""
        return len(self.operators)

    def __iter__(self) -> Iterator[PoolOperator]:
        """Iterate the operators in pool order."""
        return iter(self.operators)

    def __getitem__(self, index: int) -> PoolOperator:
        """Return the operator at index."""
        return self.operators[index]

    @property
    def labels(self) -> list[str]:
        """Operator labels in pool order."""
        return [op.label for op in self.operators]


def _product(*ladders: tuple[int, bool]) -> Product:
    return tuple(ladders)


def _anti_hermitian(n_modes: int, terms: dict[Product, float]) -> FermionOperator:
    t = FermionOperator(n_modes, terms)
    return t - t.dagger()


def _spin(mode: int) -> int:
    return mode % 2


def _general_excitations(n_modes: int) -> Iterator[tuple[str, tuple[int, ...], FermionOperator]]:
    """S_z-conserving generalized singles and doubles over spin orbitals."""
    for p, q in itertools.combinations(range(n_modes), 2):
        if _spin(p) != _spin(q):
            continue
        t = {_product((q, True), (p, False)): 1.0}
        yield f"{q}^ {p}", (q, p), _anti_hermitian(n_modes, t)
    pairs = list(itertools.combinations(range(n_modes), 2))
    for (s, r), (q, p) in itertools.combinations(pairs, 2):
        if {p, q} & {r, s}:
            continue
        if _spin(p) + _spin(q) != _spin(r) + _spin(s):
            continue
        t = {_product((p, True), (q, True), (r, False), (s, False)): 1.0}
        yield f"{p}^ {q}^ {r} {s}", (p, q, r, s), _anti_hermitian(n_modes, t)


def _spatial_quadruples(n_orb: int) -> Iterator[tuple[int, int, int, int]]:
    """(p, q, r, s) with p <= q, r <= s and pair(pq) < pair(rs)."""
    pairs = [(p, q) for p in range(n_orb) for q in range(p, n_orb)]
    for i, (p, q) in enumerate(pairs):
        for r, s in pairs[i + 1 :]:
            yield p, q, r, s


def _e(r: tuple[int, int], p: tuple[int, int], s: tuple[int, int], q: tuple[int, int]) -> Product:
    """a+_r a_p a+_s a_q for (orbital, spin) pairs."""
    return _product(
        (spin_orbital(*r), True),
        (spin_orbital(*p), False),
        (spin_orbital(*s), True),
        (spin_orbital(*q), False),
    )


def _spin_complete_excitations(n_orb: int) -> Iterator[tuple[str, tuple[int, ...], FermionOperator]]:
    n_modes = 2 * n_orb
    a, b = 0, 1
    for p, q in itertools.combinations(range(n_orb), 2):
        t = {
            _product((spin_orbital(q, a), True), (spin_orbital(p, a), False)): 1.0,
            _product((spin_orbital(q, b), True), (spin_orbital(p, b), False)): 1.0,
        }
        yield f"E({q},{p})", (q, p), _anti_hermitian(n_modes, t)
    for p, q, r, s in _spatial_quadruples(n_orb):
        channels = (
            {_e((r, a), (p, a), (s, a), (q, a)): 1.0, _e((r, b), (p, b), (s, b), (q, b)): 1.0},
            {_e((r, a), (p, a), (s, b), (q, b)): 1.0, _e((r, b), (p, b), (s, a), (q, a)): 1.0},
            {_e((r, a), (p, b), (s, b), (q, a)): 1.0, _e((r, b), (p, a), (s, a), (q, b)): 1.0},
        )
        for channel, t in enumerate(channels):
            yield f"E({r},{p};{s},{q})#{channel}", (r, p, s, q), _anti_hermitian(n_modes, t)


def _spin_adapted_excitations(n_orb: int) -> Iterator[tuple[str, tuple[int, ...], FermionOperator]]:
    n_modes = 2 * n_orb
    a, b = 0, 1
    half = 1 / np.sqrt(2)
    for p, q in itertools.combinations(range(n_orb), 2):
        t = {
            _product((spin_orbital(q, a), True), (spin_orbital(p, a), False)): half,
            _product((spin_orbital(q, b), True), (spin_orbital(p, b), False)): half,
        }
        yield f"S({q},{p})", (q, p), _anti_hermitian(n_modes, t)
    c2, c1 = 2 / np.sqrt(12), 1 / np.sqrt(12)
    for p, q, r, s in _spatial_quadruples(n_orb):
        t1: dict[Product, float] = {}
        t2: dict[Product, float] = {}
        for key, coef in (
            (_e((r, a), (p, a), (s, a), (q, a)), c2),
            (_e((r, b), (p, b), (s, b), (q, b)), c2),
            (_e((r, a), (p, a), (s, b), (q, b)), c1),
            (_e((r, b), (p, b), (s, a), (q, a)), c1),
            (_e((r, a), (p, b), (s, b), (q, a)), c1),
            (_e((r, b), (p, a), (s, a), (q, b)), c1),
        ):
            t1[key] = t1.get(key, 0.0) + coef
        for key, coef in (
            (_e((r, a), (p, a), (s, b), (q, b)), 0.5),
            (_e((r, b), (p, b), (s, a), (q, a)), 0.5),
            (_e((r, a), (p, b), (s, b), (q, a)), -0.5),
            (_e((r, b), (p, a), (s, a), (q, b)), -0.5),
        ):
            t2[key] = t2.get(key, 0.0) + coef
        yield f"S({r},{p};{s},{q})#1", (r, p, s, q), _anti_hermitian(n_modes, t1)
        yield f"S({r},{p};{s},{q})#2", (r, p, s, q), _anti_hermitian(n_modes, t2)


def _strip_z(generator: PauliSum) -> Iterator[PauliString]:
    for string in generator.terms:
        yield PauliString(string.x, string.z & string.x)


def _sum_key(generator: PauliSum) -> tuple:
    return tuple(
        sorted(
            (s.x, s.z, round(c.real, _KEY_DIGITS), round(c.imag, _KEY_DIGITS))
            for s, c in generator.terms.items()
        ),
    )


class _PoolBuilder:
    """Collects generators, dropping empty ones and duplicates up to sign."""

    def __init__(self) -> None:
        self.operators: list[PoolOperator] = []
        self._seen: set[tuple] = set()

    def add(self, label: str, indices: tuple[int, ...], generator: PauliSum) -> None:
        generator = generator.simplify()
        if len(generator) == 0:
            return
        key, negated = _sum_key(generator), _sum_key(-generator)
        if key in self._seen or negated in self._seen:
            return
        self._seen.add(key)
        self.operators.append(PoolOperator(label, indices, generator))


def build_pool(n_orb: int, n_elec: int, kind: PoolKind | str) -> OperatorPool:
    """Build an operator pool over n_orb spatial orbitals.

    Args:
        n_orb: Number of spatial orbitals (2 * n_orb qubits).
        n_elec: Number of electrons of the reference state.
        kind: Pool family.

    Raises:
        AdaptPoolEmptyError: The pool has no non-trivial operator.

    """
    kind = PoolKind(kind)
    if n_orb < 1:
        msg = f"an operator pool needs at least one orbital, got {n_orb}"
        raise ValueError(msg)
    if not 0 <= n_elec <= 2 * n_orb:
        msg = f"{n_elec} electrons do not fit in {n_orb} spatial orbitals"
        raise ValueError(msg)
    n_modes = 2 * n_orb
    builder = _PoolBuilder()
    match kind:
        case PoolKind.FERMIONIC_GENERAL:
            for label, indices, f in _general_excitations(n_modes):
                builder.add(label, indices, jordan_wigner(f))
        case PoolKind.SPIN_COMPLETE:
            for label, indices, f in _spin_complete_excitations(n_orb):
                builder.add(label, indices, jordan_wigner(f))
        case PoolKind.SPIN_ADAPTED:
            for label, indices, f in _spin_adapted_excitations(n_orb):
                builder.add(label, indices, jordan_wigner(f))
        case PoolKind.QEB:
            for label, indices, f in _general_excitations(n_modes):
                builder.add(f"q[{label}]", indices, qubit_excitation_map(f))
        case PoolKind.MULTI_QUBIT:
            for _, indices, f in _general_excitations(n_modes):
                for string in _strip_z(jordan_wigner(f)):
                    if string.is_identity or string.weight > MAX_PAULI_WEIGHT:
                        continue
                    builder.add(f"i {string.text()}", indices, PauliSum(n_modes, {string: 1j}))
    if not builder.operators:
        raise AdaptPoolEmptyError(str(kind))
    logger.log(
        logging.DEBUG,
        "Built %s pool: %d operators on %d qubits",
        kind,
        len(builder.operators),
        n_modes,
    )
    return OperatorPool(kind, n_modes, n_elec, tuple(builder.operators))
