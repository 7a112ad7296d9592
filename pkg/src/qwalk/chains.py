"""Ergodic reversible Markov chains: validation, lazy and interpolated forms.

A chain is held as a dense row-stochastic matrix with an optional set of
marked nodes. Everything downstream (discriminants, hitting times, the
edge-space Hamiltonians) consumes the :class:`StochasticChain` produced by
:func:`validate_chain`. Marked indices are 0-based everywhere, including the
JSON file format.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .config import TOL
from .errors import (
    ConvergenceFailure,
    EmptyMarkedSet,
    MarkedOutOfRange,
    NotAperiodic,
    NotIrreducible,
    NotReversible,
    RowSumViolation,
    SOutOfRange,
    ValidationError,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StochasticChain:
    """A validated row-stochastic matrix with marked-set annotation."""

    n: int
    p: np.ndarray
    marked: frozenset[int]
    lazy_applied: bool = False
    pi: np.ndarray = field(repr=False, default=None)

    @property
    def marked_list(self) -> list[int]:
        return sorted(self.marked)

    @property
    def unmarked_list(self) -> list[int]:
        return [x for x in range(self.n) if x not in self.marked]

    @property
    def p_marked(self) -> float:
        """Stationary mass on the marked set."""
        return float(sum(self.pi[x] for x in self.marked))

    def with_marked(self, marked) -> "StochasticChain":
        """Same matrix, different marked set (revalidates the indices)."""
        marked = _check_marked(marked, self.n)
        return StochasticChain(self.n, self.p, marked, self.lazy_applied, self.pi)


@dataclass(frozen=True)
class StationaryDistribution:
    """Stationary row vector pi and the marked mass p_M = sum_{x in M} pi_x."""

    pi: np.ndarray
    p_M: float


def _check_marked(marked, n: int) -> frozenset[int]:
    marked = frozenset(int(x) for x in marked)
    for x in marked:
        if not 0 <= x < n:
            raise MarkedOutOfRange(f"marked node {x} outside [0, {n})")
    return marked


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _solve_stationary(p: np.ndarray) -> np.ndarray:
    """Solve pi P = pi, sum(pi) = 1 by replacing one equation of (P^T - I)x = 0."""
    n = p.shape[0]
    a = p.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        return _power_iterate(p)


def _power_iterate(p: np.ndarray, max_iter: int = 500_000) -> np.ndarray:
    n = p.shape[0]
    # Damp with the lazy form so periodic components cannot stall convergence.
    q = 0.5 * (p + np.eye(n))
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ q
        if np.abs(nxt - pi).max() < 0.01 * TOL.stationary:
            pi = nxt
            break
        pi = nxt
    return pi / pi.sum()


def _period(p: np.ndarray) -> int:
    """Period of a strongly connected directed graph.

    BFS levels d(x) from node 0; the period is gcd over edges (x, y) of
    d(x) + 1 - d(y).
    """
    n = p.shape[0]
    graph = csr_matrix(p > 0)
    order, preds = breadth_first_order(graph, 0, directed=True, return_predecessors=True)
    dist = np.zeros(n, dtype=np.int64)
    for node in order[1:]:
        dist[node] = dist[preds[node]] + 1
    rows, cols = np.nonzero(p > 0)
    diffs = dist[rows] + 1 - dist[cols]
    return int(np.gcd.reduce(np.abs(diffs)))


def validate_chain(
    p,
    marked=(),
    *,
    lazy_applied: bool = False,
    require_aperiodic: bool = True,
) -> StochasticChain:
    """Validate a transition matrix and return the chain with its stationary state.

    Checks, in order: shape, row sums (within ``TOL.row_sum``), nonnegativity,
    irreducibility (strong connectivity), aperiodicity, marked-index range,
    and reversibility (detailed-balance residual within
    ``TOL.detailed_balance``). The stationary distribution is computed as a
    side product and stored on the chain.

    ``require_aperiodic=False`` admits periodic chains (bipartite random
    walks); the graph-family generators use it because their callers lazify
    before any search use.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValidationError(f"transition matrix must be square, got shape {p.shape}")
    n = p.shape[0]
    if n < 2:
        raise ValidationError("need at least 2 nodes")

    row_dev = np.abs(p.sum(axis=1) - 1.0)
    if row_dev.max() > TOL.row_sum:
        bad = int(np.argmax(row_dev))
        raise RowSumViolation(f"row {bad} sums to 1{row_dev[bad]:+.3e}")
    if p.min() < 0:
        raise RowSumViolation(f"negative entry {p.min():.3e}")

    ncomp, _ = connected_components(csr_matrix(p > 0), directed=True, connection="strong")
    if ncomp != 1:
        raise NotIrreducible(f"{ncomp} strongly connected components")

    period = _period(p)
    if require_aperiodic and period != 1:
        raise NotAperiodic(f"chain has period {period}")

    marked = _check_marked(marked, n)

    pi = _solve_stationary(p)
    if np.abs(pi @ p - pi).max() > TOL.stationary:
        pi = _power_iterate(p)
        if np.abs(pi @ p - pi).max() > TOL.stationary:
            raise ConvergenceFailure("stationary residual above tolerance")
    if pi.min() <= 0:
        raise ConvergenceFailure("stationary state has a non-positive entry")

    flux = pi[:, None] * p
    if np.abs(flux - flux.T).max() > TOL.detailed_balance:
        raise NotReversible(
            f"detailed-balance residual {np.abs(flux - flux.T).max():.3e}"
        )

    return StochasticChain(n, _freeze(p), marked, lazy_applied, _freeze(pi))


def make_lazy(chain: StochasticChain) -> StochasticChain:
    """Return the lazy walk (I + P)/2; the stationary state is unchanged."""
    p = 0.5 * (np.eye(chain.n) + chain.p)
    return StochasticChain(chain.n, _freeze(p), chain.marked, True, chain.pi)


def is_lazy(chain: StochasticChain) -> bool:
    """True when every diagonal entry is >= 1/2.

    That property certifies P = (I + Q)/2 for a stochastic Q, hence all
    eigenvalues in [0, 1], and survives a round trip through the chain file
    format (which carries no flag).
    """
    return chain.lazy_applied or bool(np.diag(chain.p).min() >= 0.5 - 1e-12)


def ensure_lazy(chain: StochasticChain, context: str = "") -> StochasticChain:
    """Lazify unless already lazy, with a logged notice (search modules require it)."""
    if is_lazy(chain):
        return chain
    log.info("applying lazy transform (I+P)/2%s", f" for {context}" if context else "")
    return make_lazy(chain)


def stationary_distribution(chain: StochasticChain) -> StationaryDistribution:
    return StationaryDistribution(chain.pi, chain.p_marked)


def absorbing_matrix(chain: StochasticChain) -> np.ndarray:
    """P' : outgoing edges from marked nodes replaced by self-loops."""
    if not chain.marked:
        raise EmptyMarkedSet("absorbing chain needs a nonempty marked set")
    p = chain.p.copy()
    for y in chain.marked:
        p[y, :] = 0.0
        p[y, y] = 1.0
    return p


def interpolated_matrix(chain: StochasticChain, s: float) -> np.ndarray:
    """P(s) = (1-s) P + s P' as a plain matrix (no validation)."""
    _check_s(s)
    if not chain.marked:
        raise EmptyMarkedSet("interpolation needs a nonempty marked set")
    return (1.0 - s) * chain.p + s * absorbing_matrix(chain)


def interpolate_chain(chain: StochasticChain, s: float) -> StochasticChain:
    """Validated interpolated chain P(s), ergodic and reversible for s < 1.

    s = 1 is rejected: P(1) is absorbing, hence not ergodic. Quantities at
    the s -> 1 endpoint (the extended hitting time) are obtained analytically.
    """
    p_s = interpolated_matrix(chain, s)
    pi_s = stationary_interpolated(chain, s).pi
    out = StochasticChain(chain.n, _freeze(p_s), chain.marked, chain.lazy_applied, _freeze(pi_s))
    # The closed form must satisfy the same residuals validate_chain enforces.
    if np.abs(pi_s @ p_s - pi_s).max() > TOL.stationary:
        raise ConvergenceFailure("interpolated stationary residual above tolerance")
    flux = pi_s[:, None] * p_s
    if np.abs(flux - flux.T).max() > TOL.detailed_balance:
        raise NotReversible("interpolated chain lost detailed balance")
    return out


def stationary_interpolated(chain: StochasticChain, s: float) -> StationaryDistribution:
    """Closed-form stationary state of P(s).

    pi(s) = ((1-s) pi_U, pi_M) / (1 - s (1 - p_M)); the marked mass grows to 1
    as s -> 1.
    """
    _check_s(s)
    if not chain.marked:
        raise EmptyMarkedSet("interpolation needs a nonempty marked set")
    p_M = chain.p_marked
    norm = 1.0 - s * (1.0 - p_M)
    pi_s = chain.pi.copy()
    unmarked = chain.unmarked_list
    pi_s[unmarked] = (1.0 - s) * pi_s[unmarked]
    pi_s /= norm
    return StationaryDistribution(_freeze(pi_s), float(pi_s[chain.marked_list].sum()))


def _check_s(s: float) -> None:
    if not 0.0 <= s < 1.0:
        raise SOutOfRange(f"s = {s} outside [0, 1)")


# -- chain file format --------------------------------------------------------

def chain_to_dict(chain: StochasticChain) -> dict:
    return {"n": chain.n, "p": chain.p.tolist(), "marked": chain.marked_list}


def chain_from_dict(data: dict, *, require_aperiodic: bool = True) -> StochasticChain:
    try:
        p = data["p"]
        marked = data.get("marked", [])
        n = int(data["n"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"chain file missing field: {exc}") from exc
    p = np.asarray(p, dtype=float)
    if p.shape != (n, n):
        raise ValidationError(f"matrix shape {p.shape} does not match n = {n}")
    return validate_chain(p, marked, require_aperiodic=require_aperiodic)


def save_chain(chain: StochasticChain, path) -> None:
    with open(path, "w") as fh:
        json.dump(chain_to_dict(chain), fh)
        fh.write("\n")


def load_chain(path, *, require_aperiodic: bool = True) -> StochasticChain:
    with open(path) as fh:
        return chain_from_dict(json.load(fh), require_aperiodic=require_aperiodic)
