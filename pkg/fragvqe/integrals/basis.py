"""STO-3G s-shell basis and analytic integrals over contracted s-type Gaussians.

All primitive formulas are evaluated as vectorized numpy expressions over
every primitive pair (or quadruple) and then contracted to basis functions.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from fragvqe.errors import UnsupportedElementError
from fragvqe.geometry import Geometry

logger = logging.getLogger(__name__)

STO3G_COEFFICIENTS = (0.15432897, 0.53532814, 0.44463454)
STO3G_EXPONENTS: dict[int, tuple[float, float, float]] = {
    1: (3.42525091, 0.62391373, 0.16885540),
    2: (6.36242139, 1.15892300, 0.31364979),
}
BOYS_SMALL_T = 1e-10


@dataclass(frozen=True, eq=False)
class ContractedGaussian:
    """A normalized contracted s-type Gaussian centred on an atom (bohr)."""

    center: np.ndarray
    exponents: np.ndarray
    coefficients: np.ndarray
    atom: int


def sto3g_basis(geometry: Geometry) -> list[ContractedGaussian]:
    """Return one contracted s function per atom, normalized to unit self-overlap."""
    basis = []
    for index, atom in enumerate(geometry.atoms):
        if atom.charge not in STO3G_EXPONENTS:
            raise UnsupportedElementError(atom.symbol)
        alpha = np.array(STO3G_EXPONENTS[atom.charge])
        d = np.array(STO3G_COEFFICIENTS) * (2 * alpha / np.pi) ** 0.75
        # renormalize the contraction so that <phi|phi> = 1 exactly
        p = alpha[:, None] + alpha[None, :]
        self_overlap = d @ ((np.pi / p) ** 1.5) @ d
        basis.append(
            ContractedGaussian(
                center=atom.position_bohr,
                exponents=alpha,
                coefficients=d / np.sqrt(self_overlap),
                atom=index,
            ),
        )
    return basis


def boys_f0(t: np.ndarray) -> np.ndarray:
    """Zeroth-order Boys function, with the small-argument series near zero."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    small = t < BOYS_SMALL_T
    out[small] = 1.0 - t[small] / 3.0
    big = ~small
    root = np.sqrt(t[big])
    out[big] = 0.5 * np.sqrt(np.pi) * erf(root) / root
    return out


@dataclass(frozen=True, eq=False)
class _Primitives:
    """Flattened primitives of a basis with the primitive-to-function map."""

    alpha: np.ndarray
    centers: np.ndarray
    contraction: np.ndarray  # (n_prim, n_ao): coefficient of primitive i in function a


def _flatten(basis: list[ContractedGaussian]) -> _Primitives:
    alphas, centers, rows = [], [], []
    n_ao = len(basis)
    for a, fn in enumerate(basis):
        for alpha, coef in zip(fn.exponents, fn.coefficients, strict=True):
            alphas.append(alpha)
            centers.append(fn.center)
            row = np.zeros(n_ao)
            row[a] = coef
            rows.append(row)
    return _Primitives(
        alpha=np.array(alphas),
        centers=np.array(centers).reshape(-1, 3),
        contraction=np.array(rows).reshape(-1, n_ao),
    )


def _pair_quantities(prims: _Primitives) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return p = a+b, mu = ab/p, |A-B|^2 and the Gaussian product centre P."""
    a = prims.alpha[:, None]
    b = prims.alpha[None, :]
    p = a + b
    mu = a * b / p
    diff = prims.centers[:, None, :] - prims.centers[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    center = (a[..., None] * prims.centers[:, None, :] + b[..., None] * prims.centers[None, :, :]) / p[..., None]
    return p, mu, r2, center


def one_electron_integrals(
    basis: list[ContractedGaussian],
    charges: np.ndarray,
    nuclei: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the contracted overlap, kinetic and nuclear-attraction matrices.

    Args:
        basis: Contracted functions.
        charges: Nuclear charges, shape (n_atoms,).
        nuclei: Nuclear positions in bohr, shape (n_atoms, 3).

    """
    prims = _flatten(basis)
    p, mu, r2, center = _pair_quantities(prims)
    s_prim = (np.pi / p) ** 1.5 * np.exp(-mu * r2)
    t_prim = mu * (3.0 - 2.0 * mu * r2) * s_prim
    pc = center[:, :, None, :] - nuclei[None, None, :, :]
    pc2 = np.einsum("ijck,ijck->ijc", pc, pc)
    f0 = boys_f0(p[..., None] * pc2)
    v_prim = -2.0 * np.pi / p * np.exp(-mu * r2) * np.einsum("ijc,c->ij", f0, charges)
    m = prims.contraction
    return m.T @ s_prim @ m, m.T @ t_prim @ m, m.T @ v_prim @ m


def electron_repulsion_integrals(basis: list[ContractedGaussian]) -> np.ndarray:
    """Return contracted two-electron integrals (ab|cd) in chemists' notation."""
    prims = _flatten(basis)
    p, mu, r2, center = _pair_quantities(prims)
    k = np.exp(-mu * r2)
    pp = p[:, :, None, None]
    qq = p[None, None, :, :]
    diff = center[:, :, None, None, :] - center[None, None, :, :, :]
    pq2 = np.einsum("ijklx,ijklx->ijkl", diff, diff)
    eri_prim = (
        2.0
        * np.pi**2.5
        / (pp * qq * np.sqrt(pp + qq))
        * k[:, :, None, None]
        * k[None, None, :, :]
        * boys_f0(pp * qq / (pp + qq) * pq2)
    )
    m = prims.contraction
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", eri_prim, m, m, m, m, optimize=True)


def nuclear_repulsion(charges: np.ndarray, nuclei: np.ndarray) -> float:
    """Return sum over atom pairs of Z_A Z_B / |R_A - R_B| (bohr)."""
    n = len(charges)
    if n < 2:  # noqa: PLR2004 - a pair needs two nuclei
        return 0.0
    i, j = np.triu_indices(n, k=1)
    dist = np.linalg.norm(nuclei[i] - nuclei[j], axis=1)
    return float(np.sum(charges[i] * charges[j] / dist))
