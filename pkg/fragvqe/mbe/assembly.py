"""Assembly of many-body-expansion energies from n-mer energies.

A truncated expansion of order K over n fragments is the sum over all n-mers S
with |S| <= K of ``c(|S|) * E_S`` where::

    c(k) = (-1)^(K-k) * C(n-k-1, K-k)

which gives ``E = sum E_ij - (n-2) sum E_i`` at K=2,
``E = sum E_ijk - (n-3) sum E_ij + (n-2)(n-3)/2 sum E_i`` at K=3 and
``E = E_{0..n-1}`` at K=n. The same energy is the sum of the per-order
increments ``dE_S = sum over T subset of S of (-1)^(|S|-|T|) E_T``.
"""

import itertools
import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping

from fragvqe.errors import MissingSubproblemError, PlanError

from .nmer import NMer

logger = logging.getLogger(__name__)


def mbe_coefficient(n: int, order: int, k: int) -> int:
    """Weight of every k-fragment energy in the order-``order`` expansion over n fragments."""
    if not 1 <= k <= order <= n:
        return 0
    if k == order:
        return 1
    return (-1) ** (order - k) * math.comb(n - k - 1, order - k)


def _check_order(n: int, order: int) -> None:
    if not 1 <= order <= n:
        msg = f"expansion order {order} outside 1..{n}"
        raise PlanError(msg)


def required_subsets(n: int, order: int) -> list[tuple[int, ...]]:
    """Fragment sets whose energies carry a nonzero weight, in lexicographic order by size."""
    _check_order(n, order)
    return [
        subset
        for k in range(1, order + 1)
        if mbe_coefficient(n, order, k)
        for subset in itertools.combinations(range(n), k)
    ]


def assemble_mbe_energy(energies: Mapping[tuple[int, ...], float], n: int, order: int) -> float:
    """Return the order-``order`` expansion energy over n fragments.

    Args:
        energies: Energy per sorted fragment-index tuple.
        n: Number of fragments.
        order: Truncation order (n for the untruncated expansion).

    Raises:
        MissingSubproblemError: A fragment set with nonzero weight has no energy.
        PlanError: ``order`` lies outside 1..n.

    """
    terms = []
    for subset in required_subsets(n, order):
        if subset not in energies:
            raise MissingSubproblemError(subset)
        terms.append(mbe_coefficient(n, order, len(subset)) * energies[subset])
    return math.fsum(terms)


def mbe_increments(energies: Mapping[tuple[int, ...], float], n: int, order: int) -> dict[int, float]:
    """Return the summed k-body increments for k = 1..order.

    The increments need every fragment set up to ``order``; their sum equals
    :func:`assemble_mbe_energy`.

    Raises:
        MissingSubproblemError: A fragment set up to ``order`` has no energy.

    """
    _check_order(n, order)
    increments: dict[int, float] = {}
    for k in range(1, order + 1):
        terms = []
        for subset in itertools.combinations(range(n), k):
            for size in range(1, k + 1):
                sign = (-1) ** (k - size)
                for inner in itertools.combinations(subset, size):
                    if inner not in energies:
                        raise MissingSubproblemError(inner)
                    terms.append(sign * energies[inner])
        increments[k] = math.fsum(terms)
    return increments


def cap_balance(nmers: Iterable[NMer], n: int, order: int) -> dict[tuple[int, int], int]:
    """Return the weighted count of every cap (kept atom, dropped atom) across the expansion.

    Only caps whose weighted count is nonzero are reported.
    """
    balance: Counter[tuple[int, int]] = Counter()
    for nmer in nmers:
        weight = mbe_coefficient(n, order, nmer.order)
        for cap in nmer.caps:
            balance[cap.inside, cap.outside] += weight
    return {cap: count for cap, count in balance.items() if count}


def check_cap_telescoping(nmers: Iterable[NMer], n: int, order: int) -> None:
    """Raise unless capping hydrogens cancel across an expansion of order two or more.

    Raises:
        PlanError: Some cap survives with a nonzero net weight.

    """
    balance = cap_balance(nmers, n, order)
    if not balance:
        return
    if order == 1:
        logger.log(logging.WARNING, "First-order expansion keeps %d capping hydrogens", len(balance))
        return
    msg = f"capping hydrogens do not cancel: {balance}"
    raise PlanError(msg)


def binding_energy(e_total: float, monomer_energies: Iterable[float]) -> float:
    """Cluster energy minus the sum of the isolated monomer energies."""
    return e_total - math.fsum(monomer_energies)
