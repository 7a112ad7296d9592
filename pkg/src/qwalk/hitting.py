"""Classical hitting times: spectral formulas and a Monte-Carlo oracle.

The spectral route computes HT from the eigensystem of the absorbing-chain
discriminant D(P'), the interpolated HT(s) from D(P(s)), and the extended
hitting time from the exact identity

    HT(s) * (1 - s(1-p_M))^2 / p_M^2 = HT+   for every s in [0, 1),

evaluated at s = 0 (no limit needed, and the non-ergodic endpoint is never
built). The Monte-Carlo oracle walks trajectories started from the
stationary distribution conditioned on the unmarked nodes, matching the |U>
normalization of the spectral formula; the unconditioned variant (start
anywhere under pi, marked starts counting zero steps) differs by a factor
1 - p_M and is deliberately not what this module computes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import StochasticChain, absorbing_matrix
from .config import TOL
from .errors import (
    DegenerateDenominator,
    EigensolveFailure,
    EmptyMarkedSet,
    SOutOfRange,
    ValidationError,
)
from .spectral import discriminant

__all__ = [
    "HittingReport",
    "MonteCarloEstimate",
    "hitting_time",
    "interpolated_hitting_time",
    "extended_hitting_time",
    "monte_carlo_hitting_time",
    "hitting_report",
]

_DEFAULT_S_GRID = (0.0, 0.3, 0.6, 0.9, 0.99)
_MC_CHUNK = 8192
# Runaway guard: average steps allowed per trajectory before the walker
# assumes a bug (desk-scale hitting times stay well under this).
_MC_MEAN_STEP_BUDGET = 100_000


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int


@dataclass(frozen=True)
class HittingReport:
    """HT, HT(s) on a grid, HT+, marked mass, and the optional sampled estimate."""

    ht: float
    ht_s: dict[float, float]
    ht_plus: float
    p_M: float
    mc: MonteCarloEstimate | None = None

    def to_dict(self) -> dict:
        out = {
            "ht": self.ht,
            "ht_s": {str(s): v for s, v in self.ht_s.items()},
            "ht_plus": self.ht_plus,
            "p_M": self.p_M,
        }
        if self.mc is not None:
            out["mc_estimate"] = self.mc.mean
            out["mc_stderr"] = self.mc.stderr
            out["mc_samples"] = self.mc.samples
            out["seed"] = self.mc.seed
        return out


def _unmarked_unit_vector(chain: StochasticChain) -> np.ndarray:
    u = np.zeros(chain.n)
    unmarked = chain.unmarked_list
    u[unmarked] = np.sqrt(chain.pi[unmarked] / (1.0 - chain.p_marked))
    return u


def hitting_time(chain: StochasticChain) -> float:
    """Expected steps to reach the marked set, from the D(P') eigensystem.

    HT = sum_j |<v'_j|U>|^2 / (1 - lambda'_j) over the eigenpairs of the
    absorbing-chain discriminant with eigenvalue < 1. The |M| unit
    eigenvalues belong to the absorbed block and are orthogonal to |U>;
    that orthogonality is asserted rather than assumed.
    """
    if not chain.marked:
        raise EmptyMarkedSet("hitting time needs a nonempty marked set")
    d_abs = np.sqrt(absorbing_matrix(chain) * absorbing_matrix(chain).T)
    try:
        vals, vecs = np.linalg.eigh(d_abs)
    except np.linalg.LinAlgError as exc:
        raise EigensolveFailure(str(exc)) from exc

    u = _unmarked_unit_vector(chain)
    overlaps = vecs.T @ u
    absorbed = vals >= 1.0 - TOL.unit_eigenvalue
    if int(absorbed.sum()) != len(chain.marked):
        raise EigensolveFailure(
            f"expected {len(chain.marked)} unit eigenvalues, found {int(absorbed.sum())}"
        )
    if np.abs(overlaps[absorbed]).max() > 1e-8:
        raise EigensolveFailure("absorbed eigenvectors overlap the unmarked start state")

    denom = 1.0 - vals[~absorbed]
    if denom.min() < TOL.hitting_denominator:
        raise DegenerateDenominator(f"1 - lambda' = {denom.min():.3e}")
    return float(np.sum(overlaps[~absorbed] ** 2 / denom))


def interpolated_hitting_time(chain: StochasticChain, s: float) -> float:
    """HT(s) = sum_{j<n} |<v_j(s)|U>|^2 / (1 - lambda_j(s)) from D(P(s))."""
    if not 0.0 <= s < 1.0:
        raise SOutOfRange(f"s = {s} outside [0, 1)")
    if not chain.marked:
        raise EmptyMarkedSet("interpolated hitting time needs a nonempty marked set")
    spec = discriminant(chain, s)
    u = _unmarked_unit_vector(chain)
    overlaps = spec.eigenvectors[:, :-1].T @ u
    denom = 1.0 - spec.eigenvalues[:-1]
    if denom.min() < TOL.hitting_denominator:
        raise DegenerateDenominator(f"1 - lambda(s) = {denom.min():.3e}")
    return float(np.sum(overlaps**2 / denom))


def extended_hitting_time(chain: StochasticChain, check_s=(0.0, 0.5, 0.9)) -> float:
    """HT+ via HT(s) (1 - s(1-p_M))^2 / p_M^2, exact at every s.

    Evaluated at s = 0 and cross-checked for constancy on `check_s`.
    """
    p_M = chain.p_marked
    values = [
        interpolated_hitting_time(chain, s) * (1.0 - s * (1.0 - p_M)) ** 2 / p_M**2
        for s in check_s
    ]
    ref = values[0]
    spread = (max(values) - min(values)) / abs(ref)
    if spread > TOL.hitting_identity_rel:
        raise EigensolveFailure(
            f"HT(s) identity violated: relative spread {spread:.3e} over s = {check_s}"
        )
    return float(ref)


# -- Monte-Carlo oracle -------------------------------------------------------

def _alias_tables(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vose alias tables for every row of a stochastic matrix."""
    n = p.shape[1]
    prob = np.empty_like(p)
    alias = np.empty(p.shape, dtype=np.int64)
    for x in range(p.shape[0]):
        scaled = p[x] * n
        small = [j for j in range(n) if scaled[j] < 1.0]
        large = [j for j in range(n) if scaled[j] >= 1.0]
        pr = np.ones(n)
        al = np.arange(n, dtype=np.int64)
        scaled = scaled.copy()
        while small and large:
            s, l = small.pop(), large.pop()
            pr[s] = scaled[s]
            al[s] = l
            scaled[l] -= 1.0 - scaled[s]
            (small if scaled[l] < 1.0 else large).append(l)
        prob[x], alias[x] = pr, al
    return prob, alias


def monte_carlo_hitting_time(
    chain: StochasticChain, samples: int, seed: int = 0
) -> MonteCarloEstimate:
    """Sampled hitting time: mean steps to the marked set over random trajectories.

    Start nodes are drawn from pi conditioned on the unmarked set. Trajectories
    run in fixed-size chunks; all randomness inside chunk c comes from the
    stream keyed (seed, c), so results are independent of execution order and
    bit-identical for a given seed.
    """
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    if not chain.marked:
        raise EmptyMarkedSet("hitting needs a nonempty marked set")
    unmarked = np.array(chain.unmarked_list)
    if unmarked.size == 0:
        raise EmptyMarkedSet("no unmarked node to start from")

    start_p = chain.pi[unmarked] / chain.pi[unmarked].sum()
    start_cum = np.cumsum(start_p)
    start_cum[-1] = 1.0  # guard the draw r < 1 against rounding in the cumsum
    prob, alias = _alias_tables(chain.p)
    marked_mask = np.zeros(chain.n, dtype=bool)
    marked_mask[chain.marked_list] = True
    n = chain.n

    steps = np.empty(samples, dtype=np.int64)
    budget = samples * _MC_MEAN_STEP_BUDGET
    for c, lo in enumerate(range(0, samples, _MC_CHUNK)):
        hi = min(lo + _MC_CHUNK, samples)
        size = hi - lo
        rng = np.random.default_rng((seed, c))
        pos = unmarked[np.searchsorted(start_cum, rng.random(size), side="right")]
        out = np.zeros(size, dtype=np.int64)
        alive = np.arange(size)
        t = 0
        while alive.size:
            t += 1
            budget -= alive.size
            if budget < 0:
                raise EigensolveFailure("Monte-Carlo step budget exhausted")
            u = rng.random((alive.size, 2))
            cols = np.minimum((u[:, 0] * n).astype(np.int64), n - 1)
            here = pos[alive]
            take = u[:, 1] < prob[here, cols]
            nxt = np.where(take, cols, alias[here, cols])
            pos[alive] = nxt
            hit = marked_mask[nxt]
            out[alive[hit]] = t
            alive = alive[~hit]
        steps[lo:hi] = out

    mean = float(steps.mean())
    stderr = float(steps.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return MonteCarloEstimate(mean, stderr, samples, seed)


def hitting_report(
    chain: StochasticChain,
    s_grid=_DEFAULT_S_GRID,
    mc_samples: int = 0,
    seed: int = 0,
) -> HittingReport:
    ht = hitting_time(chain)
    ht_s = {float(s): interpolated_hitting_time(chain, s) for s in s_grid}
    ht_plus = extended_hitting_time(chain)
    mc = monte_carlo_hitting_time(chain, mc_samples, seed) if mc_samples else None
    return HittingReport(ht, ht_s, ht_plus, chain.p_marked, mc)
