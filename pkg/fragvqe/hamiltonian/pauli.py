"""Pauli strings and weighted Pauli sums.

A Pauli string is stored as two bitmasks ``(x, z)`` over qubits: X where only
x is set, Z where only z is set and Y where both are. Qubit k is bit k of a
basis-state index. The canonical operator is P = i^{|x&z|} X^x Z^z, so a
string acts on a basis state as P|b> = i^{|x&z|} (-1)^{|b&z|} |b xor x>.
"""

import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import cached_property, lru_cache
from numbers import Number

import numpy as np
import scipy.sparse

logger = logging.getLogger(__name__)

PRUNE_TOL = 1e-12
_PHASES = (1, 1j, -1, -1j)
_LETTER_ORDER = {"I": 0, "X": 1, "Y": 2, "Z": 3}


def _popcount(value: int) -> int:
    return value.bit_count()


@dataclass(frozen=True, order=True)
class PauliString:
    """A tensor product of single-qubit Paulis, identity elsewhere."""

    x: int = 0
    z: int = 0

    @classmethod
    def from_letters(cls, letters: Mapping[int, str]) -> "PauliString":
        """Build from a map qubit -> 'X' | 'Y' | 'Z'."""
        x = z = 0
        for qubit, letter in letters.items():
            upper = letter.upper()
            if upper not in {"X", "Y", "Z"}:
                msg = f"unknown Pauli letter {letter!r}"
                raise ValueError(msg)
            if upper in {"X", "Y"}:
                x |= 1 << qubit
            if upper in {"Z", "Y"}:
                z |= 1 << qubit
        return cls(x, z)

    @property
    def letters(self) -> dict[int, str]:
        """Map of qubit -> letter for the non-identity positions."""
        out = {}
        support = self.x | self.z
        qubit = 0
        while support >> qubit:
            if (support >> qubit) & 1:
                bx = (self.x >> qubit) & 1
                bz = (self.z >> qubit) & 1
                out[qubit] = "Y" if bx and bz else ("X" if bx else "Z")
            qubit += 1
        return out

    @property
    def weight(self) -> int:
        """Number of non-identity positions."""
        return _popcount(self.x | self.z)

    @property
    def is_identity(self) -> bool:
        """True for the identity string."""
        return self.x == 0 and self.z == 0

    def label(self, n_qubits: int) -> str:
        """Dense label with qubit 0 first, e.g. 'XIZ'."""
        letters = self.letters
        return "".join(letters.get(q, "I") for q in range(n_qubits))

    def sort_key(self, n_qubits: int) -> tuple[int, ...]:
        """Lexicographic key over the dense label (I < X < Y < Z)."""
        return tuple(_LETTER_ORDER[c] for c in self.label(n_qubits))

    def text(self) -> str:
        """Sparse label such as 'X0 Z3 Y5', or 'I' for the identity."""
        letters = self.letters
        return " ".join(f"{letters[q]}{q}" for q in sorted(letters)) or "I"

    def commutes_with(self, other: "PauliString") -> bool:
        """True if the two strings commute."""
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0


def multiply_strings(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Return (phase, string) with a * b = phase * string."""
    x3 = a.x ^ b.x
    z3 = a.z ^ b.z
    power = (
        _popcount(a.x & a.z) + _popcount(b.x & b.z) + 2 * _popcount(a.z & b.x) - _popcount(x3 & z3)
    ) % 4
    return _PHASES[power], PauliString(x3, z3)


@dataclass(frozen=True)
class PauliTerm:
    """A coefficient times a Pauli string on n_qubits qubits."""

    coefficient: complex
    string: PauliString
    n_qubits: int

    def __post_init__(self) -> None:
        """Check the string fits in n_qubits."""
        if (self.string.x | self.string.z) >> self.n_qubits:
            msg = f"Pauli string {self.string.text()} exceeds {self.n_qubits} qubits"
            raise ValueError(msg)

    @classmethod
    def from_letters(cls, coefficient: complex, letters: Mapping[int, str], n_qubits: int) -> "PauliTerm":
        """Build a term from a coefficient and a map qubit -> letter."""
        return cls(complex(coefficient), PauliString.from_letters(letters), n_qubits)

    @property
    def letters(self) -> dict[int, str]:
        """Map of qubit -> letter for the non-identity positions."""
        return self.string.letters


def pauli_product(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Multiply two Pauli terms, tracking the phase of the single-qubit table."""
    if a.n_qubits != b.n_qubits:
        msg = f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}"
        raise ValueError(msg)
    phase, string = multiply_strings(a.string, b.string)
    return PauliTerm(a.coefficient * b.coefficient * phase, string, a.n_qubits)


@lru_cache(maxsize=4096)
def pauli_action(n_qubits: int, x: int, z: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (perm, phase) such that (P psi)[c] = phase[c] * psi[perm[c]]."""
    index = np.arange(1 << n_qubits, dtype=np.int64)
    perm = index ^ x
    signs = 1 - 2 * (np.bitwise_count(perm & z) & 1).astype(np.int64)
    phase = _PHASES[_popcount(x & z) % 4] * signs.astype(complex)
    perm.setflags(write=False)
    phase.setflags(write=False)
    return perm, phase


def _clean(value: complex, tol: float) -> complex:
    re = value.real if abs(value.real) >= tol else 0.0
    im = value.imag if abs(value.imag) >= tol else 0.0
    return complex(re, im)


class PauliSum:
    """A weighted sum of Pauli strings with unique strings.

    Instances are treated as immutable: arithmetic returns new sums and the
    sparse matrix is cached on first use.
    """

    def __init__(
        self,
        n_qubits: int,
        terms: Mapping[PauliString, complex] | Iterable[tuple[PauliString, complex]] = (),
    ) -> None:
        """Initialize from (string, coefficient) pairs, merging duplicates.

        Args:
            n_qubits: Register width.
            terms: Mapping or iterable of (PauliString, coefficient).

        """
        self.n_qubits = n_qubits
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[PauliString, complex] = {}
        limit = 1 << n_qubits
        for string, coef in items:
            if (string.x | string.z) >= limit:
                msg = f"Pauli string {string.text()} exceeds {n_qubits} qubits"
                raise ValueError(msg)
            merged[string] = merged.get(string, 0j) + complex(coef)
        self._terms = merged

    @classmethod
    def identity(cls, n_qubits: int, coefficient: complex = 1.0) -> "PauliSum":
        """Return coefficient * I."""
        return cls(n_qubits, {PauliString(): coefficient})

    @classmethod
    def from_terms(cls, terms: Iterable[PauliTerm], n_qubits: int) -> "PauliSum":
        """Collect PauliTerm objects into a sum."""
        return cls(n_qubits, ((t.string, t.coefficient) for t in terms))

    @property
    def terms(self) -> dict[PauliString, complex]:
        """Read-only view of the string -> coefficient map."""
        return dict(self._terms)

    def __len__(self) -> int:
        """Return the number of stored strings."""
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        """Iterate terms in lexicographic string order."""
        for string in sorted(self._terms, key=lambda s: s.sort_key(self.n_qubits)):
            yield PauliTerm(self._terms[string], string, self.n_qubits)

    def __repr__(self) -> str:
        """Return a short description."""
        return f"PauliSum(n_qubits={self.n_qubits}, terms={len(self)})"

    def coefficient(self, string: PauliString) -> complex:
        """Coefficient of a string (0 if absent)."""
        return self._terms.get(string, 0j)

    def simplify(self, tol: float = PRUNE_TOL) -> "PauliSum":
        """Drop coefficient parts below tol and the resulting empty terms."""
        kept = {}
        for string, coef in self._terms.items():
            value = _clean(coef, tol)
            if value != 0:
                kept[string] = value
        return PauliSum(self.n_qubits, kept)

    def _check_width(self, other: "PauliSum") -> None:
        if other.n_qubits != self.n_qubits:
            msg = f"qubit counts differ: {self.n_qubits} vs {other.n_qubits}"
            raise ValueError(msg)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        """Return the sum of two operators."""
        self._check_width(other)
        return PauliSum(self.n_qubits, [*self._terms.items(), *other._terms.items()])

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        """Return the difference of two operators."""
        return self + (-1.0) * other

    def __neg__(self) -> "PauliSum":
        """Return -self."""
        return (-1.0) * self

    def __mul__(self, other: "PauliSum | Number") -> "PauliSum":
        """Multiply by a scalar or another PauliSum (operator product)."""
        if isinstance(other, Number):
            scale = complex(other)
            return PauliSum(self.n_qubits, {s: c * scale for s, c in self._terms.items()})
        self._check_width(other)
        out: dict[PauliString, complex] = {}
        for sa, ca in self._terms.items():
            for sb, cb in other._terms.items():
                phase, string = multiply_strings(sa, sb)
                out[string] = out.get(string, 0j) + ca * cb * phase
        return PauliSum(self.n_qubits, out)

    def __rmul__(self, other: Number) -> "PauliSum":
        """Scalar multiplication from the left."""
        return self * other

    def dagger(self) -> "PauliSum":
        """Hermitian adjoint (Pauli strings are Hermitian)."""
        return PauliSum(self.n_qubits, {s: c.conjugate() for s, c in self._terms.items()})

    def max_real_part(self) -> float:
        """Largest |Re c| over the coefficients."""
        return max((abs(c.real) for c in self._terms.values()), default=0.0)

    def max_imag_part(self) -> float:
        """Largest |Im c| over the coefficients."""
        return max((abs(c.imag) for c in self._terms.values()), default=0.0)

    def is_hermitian(self, tol: float = PRUNE_TOL) -> bool:
        """True when every coefficient is real within tol."""
        return self.max_imag_part() <= tol

    def is_anti_hermitian(self, tol: float = 1e-10) -> bool:
        """True when every coefficient is imaginary within tol."""
        return self.max_real_part() <= tol

    def norm(self) -> float:
        """Sum of absolute coefficients."""
        return float(sum(abs(c) for c in self._terms.values()))

    @cached_property
    def _sparse(self) -> scipy.sparse.csr_matrix:
        dim = 1 << self.n_qubits
        index = np.arange(dim, dtype=np.int64)
        groups: dict[int, list[tuple[int, complex]]] = {}
        for string, coef in self._terms.items():
            groups.setdefault(string.x, []).append((string.z, coef))
        rows, cols, data = [], [], []
        for x, entries in sorted(groups.items()):
            weights = np.zeros(dim, dtype=complex)
            for z, coef in entries:
                sign = 1 - 2 * (np.bitwise_count(index & z) & 1).astype(np.int64)
                weights += coef * _PHASES[_popcount(x & z) % 4] * sign
            nz = np.abs(weights) > 0
            rows.append(index[nz] ^ x)
            cols.append(index[nz])
            data.append(weights[nz])
        if not rows:
            return scipy.sparse.csr_matrix((dim, dim), dtype=complex)
        matrix = scipy.sparse.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
        )
        logger.log(
            logging.DEBUG,
            "Built sparse matrix for %d terms on %d qubits (nnz=%d)",
            len(self),
            self.n_qubits,
            matrix.nnz,
        )
        return matrix

    def to_sparse(self) -> scipy.sparse.csr_matrix:
        """Sparse 2^n x 2^n matrix (cached)."""
        return self._sparse

    def to_dense(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix."""
        return self.to_sparse().toarray()

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Return self @ psi; short sums act term by term, long ones via the sparse matrix."""
        if len(self._terms) > 64 or "_sparse" in self.__dict__:  # noqa: PLR2004 - crossover point
            return self.to_sparse() @ psi
        out = np.zeros_like(psi, dtype=complex)
        for string, coef in self._terms.items():
            perm, phase = pauli_action(self.n_qubits, string.x, string.z)
            out += coef * phase * psi[perm]
        return out

    def to_text(self) -> str:
        """Stable text dump: one line per term, ``coeff  X0 Z3 Y5``."""
        lines = []
        for term in self:
            c = term.coefficient
            coef = f"{c.real:+.12f}" if c.imag == 0 else f"({c.real:+.12f}{c.imag:+.12f}j)"
            lines.append(f"{coef}  {term.string.text()}")
        return "\n".join(lines)


def commutator(h: PauliSum, a: PauliSum) -> PauliSum:
    """Return [H, A] = HA - AH; commuting string pairs cancel and are skipped."""
    if h.n_qubits != a.n_qubits:
        msg = f"qubit counts differ: {h.n_qubits} vs {a.n_qubits}"
        raise ValueError(msg)
    out: dict[PauliString, complex] = {}
    for sh, ch in h.terms.items():
        for sa, ca in a.terms.items():
            if sh.commutes_with(sa):
                continue
            phase, string = multiply_strings(sh, sa)
            out[string] = out.get(string, 0j) + 2.0 * ch * ca * phase
    return PauliSum(h.n_qubits, out).simplify()
