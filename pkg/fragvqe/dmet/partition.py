"""Democratic partitioning of embedding energies onto fragments."""

import numpy as np

from fragvqe.simulator.rdm import RDMs

from .embedding import EmbeddingProblem


def fragment_energy_and_number(rdms: RDMs, problem: EmbeddingProblem) -> tuple[float, float]:
    """Return the fragment's share of the energy and its electron count.

    One-electron terms count with weight ``([p in A] + [q in A]) / 2`` and use
    ``h_bare + dressing / 2`` so the environment field is split evenly between
    the two sides; two-electron terms count with a quarter per fragment index.
    Scalar core energies are not included.
    """
    n = problem.integrals.n_orb
    member = np.zeros(n)
    member[: problem.n_fragment] = 1.0
    w1 = 0.5 * (member[:, None] + member[None, :])
    w2 = 0.25 * (
        member[:, None, None, None]
        + member[None, :, None, None]
        + member[None, None, :, None]
        + member[None, None, None, :]
    )
    h = problem.h_bare + 0.5 * problem.dressing
    energy = float(np.sum(w1 * h * rdms.one_rdm)) + 0.5 * float(np.sum(w2 * problem.integrals.v * rdms.two_rdm))
    n_frag = float(np.trace(rdms.one_rdm[: problem.n_fragment, : problem.n_fragment]))
    return energy, n_frag
