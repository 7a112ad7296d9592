"""Discriminant matrices, their eigensystems, and the marked/unmarked split.

The discriminant D(P) = sqrt(P o P^T) (entrywise) is symmetric and similar to
P, so its spectrum is real with top eigenvalue 1 and principal eigenvector
sqrt(pi). For an interpolated chain the same construction applies to P(s).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import StochasticChain, interpolated_matrix, stationary_interpolated
from .config import TOL
from .errors import EigensolveFailure, EmptyMarkedSet

__all__ = [
    "DiscriminantSpectrum",
    "MarkedDecomposition",
    "discriminant",
    "discriminant_matrix",
    "principal_vector",
    "marked_decomposition",
]


@dataclass(frozen=True)
class DiscriminantSpectrum:
    """Symmetric discriminant matrix with its full ordered eigensystem.

    Eigenvalues ascend, so ``eigenvalues[-1] == 1`` and
    ``eigenvectors[:, -1]`` is the entrywise-positive principal vector
    sqrt(pi(s)). ``gap`` is the difference of the two largest eigenvalues.
    """

    d: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    gap: float
    s_value: float

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def principal(self) -> np.ndarray:
        return self.eigenvectors[:, -1]

    def to_dict(self) -> dict:
        return {"eigenvalues": self.eigenvalues.tolist(), "gap": self.gap}


@dataclass(frozen=True)
class MarkedDecomposition:
    """Split of the principal eigenvector over unmarked/marked subspaces.

    |v_n(s)> = cos(theta) |U> + sin(theta) |M>, with |U>, |M> the
    stationary-weighted unit vectors supported on the unmarked and marked
    nodes respectively.
    """

    u_vec: np.ndarray
    m_vec: np.ndarray
    cos_theta: float
    sin_theta: float
    s_value: float


def discriminant_matrix(chain: StochasticChain, s: float = 0.0) -> np.ndarray:
    """D(P(s)) = sqrt(P(s) o P(s)^T), exactly symmetric."""
    p = chain.p if s == 0.0 else interpolated_matrix(chain, s)
    return np.sqrt(p * p.T)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Largest-magnitude entry of each column made positive (reproducible overlaps)."""
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def _reorthonormalize_clusters(vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """QR within each degenerate cluster (|dl| < TOL.degeneracy_cluster).

    Downstream code only ever uses cluster projectors, but a clean frame keeps
    the orthonormality residual flat even for highly degenerate spectra
    (complete graphs, Rook graphs).
    """
    out = vecs.copy()
    start = 0
    for stop in range(1, len(vals) + 1):
        if stop == len(vals) or vals[stop] - vals[stop - 1] > TOL.degeneracy_cluster:
            if stop - start > 1:
                q, r = np.linalg.qr(out[:, start:stop])
                q *= np.sign(np.diag(r))[None, :]
                out[:, start:stop] = q
            start = stop
    return out


def discriminant(chain: StochasticChain, s: float = 0.0) -> DiscriminantSpectrum:
    """Full eigensystem of D(P(s)), eigenvalues ascending, signs fixed."""
    d = discriminant_matrix(chain, s)
    try:
        vals, vecs = np.linalg.eigh(d)
    except np.linalg.LinAlgError as exc:
        raise EigensolveFailure(str(exc)) from exc
    vecs = _reorthonormalize_clusters(vals, vecs)
    vecs = _fix_signs(vecs)

    # Pin the principal vector to the entrywise-positive sqrt(pi(s)).
    if vecs[:, -1].sum() < 0:
        vecs[:, -1] = -vecs[:, -1]
    if abs(vals[-1] - 1.0) > TOL.unit_eigenvalue:
        raise EigensolveFailure(
            f"top discriminant eigenvalue {vals[-1]!r} differs from 1"
        )
    gap = float(vals[-1] - vals[-2])
    for a in (d, vals, vecs):
        a.setflags(write=False)
    return DiscriminantSpectrum(d, vals, vecs, gap, s)


def principal_vector(chain: StochasticChain) -> np.ndarray:
    """sqrt(pi), asserted to be a 1-eigenvector of D(P)."""
    v = np.sqrt(chain.pi)
    d = discriminant_matrix(chain)
    residual = np.abs(d @ v - v).max()
    if residual > TOL.orthonormality:
        raise EigensolveFailure(f"sqrt(pi) fails the 1-eigenvector check: {residual:.3e}")
    return v


def marked_decomposition(chain: StochasticChain, s: float = 0.0) -> MarkedDecomposition:
    """cos/sin split of the principal vector of D(P(s)) over U and M.

    cos(theta(s)) = sqrt((1-s)(1-p_M) / (1 - s(1-p_M))),
    sin(theta(s)) = sqrt(p_M / (1 - s(1-p_M))); the reconstruction
    cos|U> + sin|M> is checked against the eigensolver's principal vector.
    """
    if not chain.marked:
        raise EmptyMarkedSet("marked decomposition needs a nonempty marked set")
    p_M = chain.p_marked
    marked = chain.marked_list
    unmarked = chain.unmarked_list

    u_vec = np.zeros(chain.n)
    m_vec = np.zeros(chain.n)
    u_vec[unmarked] = np.sqrt(chain.pi[unmarked] / (1.0 - p_M))
    m_vec[marked] = np.sqrt(chain.pi[marked] / p_M)

    norm = 1.0 - s * (1.0 - p_M)
    cos_theta = float(np.sqrt((1.0 - s) * (1.0 - p_M) / norm))
    sin_theta = float(np.sqrt(p_M / norm))

    # The reconstruction must match both the closed-form sqrt(pi(s)) and the
    # eigensolver's principal vector.
    recon = cos_theta * u_vec + sin_theta * m_vec
    target = np.sqrt(stationary_interpolated(chain, s).pi) if s else np.sqrt(chain.pi)
    if np.abs(recon - target).max() > 1e-10:
        raise EigensolveFailure("cos/sin reconstruction of sqrt(pi(s)) failed")
    solved = discriminant(chain, s).principal
    if np.abs(recon - solved).max() > 1e-10:
        raise EigensolveFailure("cos/sin reconstruction differs from the eigensolver")
    return MarkedDecomposition(u_vec, m_vec, cos_theta, sin_theta, s)
