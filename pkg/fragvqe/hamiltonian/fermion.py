"""Fermionic operators and the second-quantized molecular Hamiltonian.

Spin orbitals are interleaved: mode 2p is orbital p with spin alpha, mode
2p+1 is orbital p with spin beta. A product is a tuple of ``(mode, dagger)``
pairs read left to right as operator products.
"""

import logging
from collections.abc import Iterable, Mapping
from numbers import Number

import numpy as np
import scipy.sparse

from fragvqe.integrals.mo import MOIntegrals

logger = logging.getLogger(__name__)

Ladder = tuple[int, bool]
Product = tuple[Ladder, ...]
INTEGRAL_TOL = 1e-14


def spin_orbital(orbital: int, spin: int) -> int:
    """Interleaved mode index of spatial orbital ``orbital`` with spin 0 (alpha) or 1 (beta)."""
    return 2 * orbital + spin


class FermionOperator:
    """A linear combination of products of creation/annihilation operators."""

    def __init__(
        self,
        n_modes: int,
        terms: Mapping[Product, complex] | Iterable[tuple[Product, complex]] = (),
    ) -> None:
        """Initialize from (product, coefficient) pairs, merging identical products.

        Args:
            n_modes: Number of spin orbitals.
            terms: Mapping or iterable of (product, coefficient).

        """
        self.n_modes = n_modes
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[Product, complex] = {}
        for product, coef in items:
            key = tuple((int(m), bool(d)) for m, d in product)
            if any(m < 0 or m >= n_modes for m, _ in key):
                msg = f"product {key} addresses a mode outside 0..{n_modes - 1}"
                raise ValueError(msg)
            merged[key] = merged.get(key, 0j) + complex(coef)
        self._terms = merged

    @classmethod
    def ladder(cls, n_modes: int, mode: int, *, dagger: bool) -> "FermionOperator":
        """Return a single creation (dagger) or annihilation operator."""
        return cls(n_modes, {((mode, dagger),): 1.0})

    @property
    def terms(self) -> dict[Product, complex]:
        """Copy of the product -> coefficient map."""
        return dict(self._terms)

    def __len__(self) -> int:
        """Return the number of stored products."""
        return len(self._terms)

    def __repr__(self) -> str:
        """Return a short description."""
        return f"FermionOperator(n_modes={self.n_modes}, terms={len(self)})"

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        """Return the sum of two operators."""
        return FermionOperator(self.n_modes, [*self._terms.items(), *other._terms.items()])

    def __sub__(self, other: "FermionOperator") -> "FermionOperator":
        """Return the difference of two operators."""
        return self + (-1.0) * other

    def __mul__(self, other: "FermionOperator | Number") -> "FermionOperator":
        """Multiply by a scalar or concatenate products with another operator."""
        if isinstance(other, Number):
            scale = complex(other)
            return FermionOperator(self.n_modes, {p: c * scale for p, c in self._terms.items()})
        out: dict[Product, complex] = {}
        for pa, ca in self._terms.items():
            for pb, cb in other._terms.items():
                key = pa + pb
                out[key] = out.get(key, 0j) + ca * cb
        return FermionOperator(self.n_modes, out)

    def __rmul__(self, other: Number) -> "FermionOperator":
        """Scalar multiplication from the left."""
        return self * other

    def dagger(self) -> "FermionOperator":
        """Hermitian adjoint: reverse each product, flip daggers, conjugate."""
        return FermionOperator(
            self.n_modes,
            {
                tuple((m, not d) for m, d in reversed(p)): c.conjugate()
                for p, c in self._terms.items()
            },
        )

    def to_sparse(self) -> scipy.sparse.csr_matrix:
        """Matrix in the occupation-number basis (bit k of the index = mode k occupied).

        Basis states are ordered products a+_{m1} a+_{m2} ... |vac> with m1 < m2 < ...,
        so a_p picks up (-1) for every occupied mode below p.
        """
        dim = 1 << self.n_modes
        start = np.arange(dim, dtype=np.int64)
        rows, cols, data = [], [], []
        for product, coef in self._terms.items():
            state = start.copy()
            sign = np.ones(dim)
            valid = np.ones(dim, dtype=bool)
            for mode, dagger in reversed(product):
                bit = np.int64(1) << mode
                occupied = (state & bit) != 0
                valid &= ~occupied if dagger else occupied
                parity = np.bitwise_count(state & (bit - 1)).astype(np.int64) & 1
                sign *= 1 - 2 * parity
                state ^= bit
            rows.append(state[valid])
            cols.append(start[valid])
            data.append(coef * sign[valid])
        if not rows:
            return scipy.sparse.csr_matrix((dim, dim), dtype=complex)
        return scipy.sparse.csr_matrix(
            (np.concatenate(data).astype(complex), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
        )

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """Compare the operator with its adjoint through their Fock-space matrices."""
        diff = self.to_sparse() - self.dagger().to_sparse()
        return diff.count_nonzero() == 0 or float(abs(diff).max()) <= tol


def build_second_quantized(mo: MOIntegrals) -> FermionOperator:
    """Spin-integrate spatial integrals into the interleaved spin-orbital Hamiltonian.

    H = e_core + sum h_pq a+_{p s} a_{q s}
        + 1/2 sum (pq|rs) a+_{p s} a+_{r t} a_{s t} a_{q s}
    """
    n = mo.n_orb
    n_modes = 2 * n
    terms: dict[Product, complex] = {(): mo.e_core}
    spins = (0, 1)
    for p in range(n):
        for q in range(n):
            hpq = mo.h[p, q]
            if abs(hpq) <= INTEGRAL_TOL:
                continue
            for s in spins:
                terms[((spin_orbital(p, s), True), (spin_orbital(q, s), False))] = hpq
    nonzero = np.argwhere(np.abs(mo.v) > INTEGRAL_TOL)
    for p, q, r, s in nonzero:
        half = 0.5 * mo.v[p, q, r, s]
        for sig in spins:
            for tau in spins:
                ps, qs = spin_orbital(p, sig), spin_orbital(q, sig)
                rt, st = spin_orbital(r, tau), spin_orbital(s, tau)
                if ps == rt or qs == st:
                    continue
                key = ((ps, True), (rt, True), (st, False), (qs, False))
                terms[key] = terms.get(key, 0.0) + half
    logger.log(logging.DEBUG, "Second-quantized Hamiltonian: %d modes, %d terms", n_modes, len(terms))
    return FermionOperator(n_modes, terms)
