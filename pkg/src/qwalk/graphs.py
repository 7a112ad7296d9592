"""Deterministic generators for the benchmark chain families.

All generators return the plain (non-lazy) random-walk chain; callers lazify
with :func:`qwalk.chains.make_lazy` before search use. Periodic families
(even cycles, hypercubes) are admitted here and become aperiodic once lazy.

Node indexing conventions, so marked-node selection is reproducible:
torus is row-major over coordinates, hypercube nodes are bit patterns,
Rook boards use index = row * n2 + col.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .chains import StochasticChain, validate_chain
from .errors import BadParams, Disconnected, NegativeWeight

__all__ = [
    "FamilySpec",
    "FAMILIES",
    "generate",
    "from_adjacency",
    "complete",
    "cycle",
    "torus",
    "hypercube",
    "rook",
    "weighted_rook",
    "random_reversible",
]

_MAX_NODES = 4096


@dataclass(frozen=True)
class FamilySpec:
    """A family name plus its parameters, e.g. FamilySpec("torus", {"d": 2, "side": 8})."""

    family: str
    params: dict = field(default_factory=dict)


def generate(spec: FamilySpec, marked=()) -> StochasticChain:
    """Build the non-lazy chain for a family spec."""
    try:
        builder = FAMILIES[spec.family]
    except KeyError:
        raise BadParams(
            f"unknown family {spec.family!r}; available: {sorted(FAMILIES)}"
        ) from None
    try:
        chain = builder(**spec.params)
    except TypeError as exc:
        raise BadParams(f"{spec.family}: {exc}") from exc
    return chain.with_marked(marked) if marked else chain


def _validated(p: np.ndarray) -> StochasticChain:
    return validate_chain(p, require_aperiodic=False)


def _guard_size(n: int) -> None:
    if n > _MAX_NODES:
        raise BadParams(f"n = {n} exceeds generator guard {_MAX_NODES}")
    if n < 2:
        raise BadParams(f"n = {n} too small")


def complete(n: int) -> StochasticChain:
    _guard_size(n)
    p = np.full((n, n), 1.0 / (n - 1))
    np.fill_diagonal(p, 0.0)
    return _validated(p)


def cycle(n: int) -> StochasticChain:
    _guard_size(n)
    if n < 3:
        raise BadParams("cycle needs n >= 3")
    p = np.zeros((n, n))
    for x in range(n):
        p[x, (x + 1) % n] += 0.5
        p[x, (x - 1) % n] += 0.5
    return _validated(p)


def torus(side: int, d: int = 2) -> StochasticChain:
    """d-dimensional periodic lattice with side length `side`, row-major indexing."""
    if d < 1 or side < 2:
        raise BadParams("torus needs d >= 1 and side >= 2")
    n = side**d
    _guard_size(n)
    p = np.zeros((n, n))
    strides = [side**k for k in reversed(range(d))]
    coords = np.array(np.unravel_index(np.arange(n), (side,) * d)).T
    for x in range(n):
        for axis in range(d):
            for step in (+1, -1):
                c = coords[x].copy()
                c[axis] = (c[axis] + step) % side
                y = int(np.dot(c, strides))
                p[x, y] += 1.0 / (2 * d)
    return _validated(p)


def hypercube(d: int) -> StochasticChain:
    """Walk on the d-cube; node index is the bit pattern, moves flip one bit."""
    if d < 1:
        raise BadParams("hypercube needs d >= 1")
    n = 2**d
    _guard_size(n)
    p = np.zeros((n, n))
    for x in range(n):
        for bit in range(d):
            p[x, x ^ (1 << bit)] = 1.0 / d
    return _validated(p)


def rook(n1: int, n2: int) -> StochasticChain:
    """Uniform walk on the moves of a Rook on an n1 x n2 board."""
    if n1 < 2 or n2 < 2:
        raise BadParams("rook needs n1, n2 >= 2")
    _guard_size(n1 * n2)
    deg = (n1 - 1) + (n2 - 1)
    a_row = np.ones((n1, n1)) - np.eye(n1)
    a_col = np.ones((n2, n2)) - np.eye(n2)
    p = (np.kron(a_row, np.eye(n2)) + np.kron(np.eye(n1), a_col)) / deg
    return _validated(p)


def weighted_rook(n1: int, n2: int, p: float) -> StochasticChain:
    """Rook walk moving along rows with total probability p, columns with 1-p.

    P = p/(n1-1) * A_{K_n1} (x) I  +  (1-p)/(n2-1) * I (x) A_{K_n2}.
    """
    if n1 < 2 or n2 < 2:
        raise BadParams("weighted_rook needs n1, n2 >= 2")
    if not 0.0 < p < 1.0:
        raise BadParams(f"weighted_rook needs 0 < p < 1, got {p}")
    _guard_size(n1 * n2)
    a_row = np.ones((n1, n1)) - np.eye(n1)
    a_col = np.ones((n2, n2)) - np.eye(n2)
    mat = p / (n1 - 1) * np.kron(a_row, np.eye(n2)) + (1.0 - p) / (n2 - 1) * np.kron(
        np.eye(n1), a_col
    )
    return _validated(mat)


def random_reversible(n: int, seed: int = 0, edge_prob: float | None = None) -> StochasticChain:
    """Random connected weighted undirected graph, row-normalized.

    Edges drawn Erdos-Renyi style with rejection until connected; weights
    uniform in (0.5, 1.5). Row-normalizing a symmetric weight matrix gives a
    reversible chain with pi_x proportional to the weighted degree.
    """
    _guard_size(n)
    if edge_prob is None:
        edge_prob = min(1.0, max(0.3, 2.0 * np.log(n) / n))
    rng = np.random.default_rng(seed)
    for _ in range(200):
        mask = rng.random((n, n)) < edge_prob
        mask = np.triu(mask, k=1)
        adj = (mask | mask.T).astype(float)
        ncomp, _ = connected_components(csr_matrix(adj), directed=False)
        if ncomp == 1:
            weights = rng.uniform(0.5, 1.5, size=(n, n))
            weights = np.triu(weights, k=1)
            weights = weights + weights.T
            return from_adjacency(adj * weights)
    raise BadParams(f"no connected graph found at edge_prob = {edge_prob}")


def from_adjacency(a, marked=()) -> StochasticChain:
    """Row-normalized walk on a symmetric weighted adjacency matrix.

    Reversible by construction: pi_x is proportional to the degree d_x.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise BadParams(f"adjacency must be square, got {a.shape}")
    if a.min() < 0:
        raise NegativeWeight(f"negative weight {a.min():.3e}")
    if np.abs(a - a.T).max() > 0:
        raise BadParams("adjacency must be symmetric")
    ncomp, _ = connected_components(csr_matrix(a > 0), directed=False)
    if ncomp != 1:
        raise Disconnected(f"{ncomp} components")
    deg = a.sum(axis=1)
    p = a / deg[:, None]
    chain = validate_chain(p, marked, require_aperiodic=False)
    return chain


FAMILIES = {
    "complete": complete,
    "cycle": cycle,
    "torus": torus,
    "hypercube": hypercube,
    "rook": rook,
    "weighted_rook": weighted_rook,
    "random_reversible": random_reversible,
}
