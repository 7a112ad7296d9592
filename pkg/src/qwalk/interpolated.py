"""Search by randomized-time evolution on an interpolated chain.

At s* = 1 - p_M/(1 - p_M) the principal discriminant eigenvector splits
evenly between the marked and unmarked subspaces. Evolving the stationary
state |v_n(0),0> under the edge Hamiltonian H(s*) for a time drawn uniformly
from [0, T] dephases it in the H(s*) eigenbasis; measuring the first register
then yields a marked node with probability at least 1/4 - eps once
T >= (1/eps) sqrt(HT+/2).

The exact time-averaged density matrix is assembled in the reduced eigenbasis
with sinc weights (no sampling noise), and a sampled mode draws trajectory
times for an estimator that converges to the exact average. Precision eps
(``epsilon_precision``) is a different quantity from the initial-overlap
epsilon of the edge-walk search and is named apart everywhere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .chains import StochasticChain, ensure_lazy
from .errors import EmptyMarkedSet, EpsilonOutOfRange, PMOutOfRange, ValidationError
from .hamiltonian import build_dense, build_reduced, measurement_matrix
from .hitting import extended_hitting_time

log = logging.getLogger(__name__)

__all__ = [
    "PhaseRandomConfig",
    "PhaseRandomResult",
    "s_star",
    "required_time",
    "averaged_success",
    "sampled_run",
    "dephasing_error",
    "dense_averaged_success",
    "run_phase_random",
]


@dataclass(frozen=True)
class PhaseRandomConfig:
    """Run parameters; T = None means auto-schedule from the extended hitting time."""

    epsilon_precision: float = 0.1
    T: float | None = None
    mode: str = "exact"  # "exact" | "sampled"
    samples: int = 10_000
    seed: int = 0


@dataclass(frozen=True)
class PhaseRandomResult:
    s_star: float
    success_probability: float
    success_stderr: float | None
    alpha_n_sq: float
    dephasing_error: float
    ht_plus: float
    T: float
    p_M: float
    mode: str
    samples: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        out = {
            "s_star": self.s_star,
            "success_probability": self.success_probability,
            "alpha_n_sq": self.alpha_n_sq,
            "dephasing_error": self.dephasing_error,
            "ht_plus": self.ht_plus,
            "T": self.T,
            "p_M": self.p_M,
            "mode": self.mode,
        }
        if self.mode == "sampled":
            out["success_stderr"] = self.success_stderr
            out["samples"] = self.samples
            out["seed"] = self.seed
        return out


def s_star(p_M: float) -> float:
    """Interpolation point 1 - p_M/(1-p_M) at which cos(theta) = sin(theta).

    Defined for 0 < p_M <= 1/2. For p_M in [1/4, 1/2] the returned value is 0
    with a logged notice: measuring the stationary state already succeeds with
    probability p_M >= 1/4, so no interpolation is needed.
    """
    if not 0.0 < p_M <= 0.5:
        raise PMOutOfRange(f"marked stationary mass {p_M} outside (0, 1/2]")
    if p_M >= 0.25:
        log.info(
            "p_M = %.4g >= 1/4: stationary measurement suffices, using s* = 0", p_M
        )
        return 0.0
    return 1.0 - p_M / (1.0 - p_M)


def required_time(chain: StochasticChain, epsilon_precision: float) -> float:
    """T = (1/eps) sqrt(HT+ / 2) on the lazy chain the evolution uses."""
    _check_epsilon(epsilon_precision)
    chain = ensure_lazy(chain, "phase-randomized search scheduling")
    return sqrt(extended_hitting_time(chain) / 2.0) / epsilon_precision


def _check_epsilon(eps: float) -> None:
    if not 0.0 < eps < 0.25:
        raise EpsilonOutOfRange(f"precision must lie in (0, 1/4), got {eps}")


def _sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x with the removable singularity filled in."""
    return np.sinc(x / np.pi)


class _PhaseRandomSetup:
    """Eigenbasis data of H(s*) shared by the exact, sampled and bound paths."""

    def __init__(self, chain: StochasticChain):
        if not chain.marked:
            raise EmptyMarkedSet("phase-randomized search needs marked nodes")
        chain = ensure_lazy(chain, "phase-randomized search")
        self.chain = chain
        self.p_M = chain.p_marked
        if self.p_M >= 0.25:
            log.info("p_M = %.4g >= 1/4: evolution is trivial at s* = 0", self.p_M)
        self.s_star = s_star(self.p_M)
        self.red = build_reduced(chain, self.s_star)
        n = chain.n

        # Overlaps of the eigenvectors of D(P(s*)) with the start vector sqrt(pi).
        start = np.sqrt(chain.pi)
        overlaps = self.red.spectrum.eigenvectors.T @ start
        self.alpha_n = float(overlaps[-1])
        self.alpha_j = overlaps[:-1] / np.sqrt(2.0)  # per +- branch
        self.phis = self.red.phis

        # Eigenbasis order: [zero, (+,1), (-,1), ..., (+,n-1), (-,n-1)].
        self.energies = np.zeros(2 * n - 1)
        self.energies[1::2] = self.phis
        self.energies[2::2] = -self.phis
        self.coeff = np.zeros(2 * n - 1)
        self.coeff[0] = self.alpha_n
        self.coeff[1::2] = self.alpha_j
        self.coeff[2::2] = self.alpha_j
        total = float(np.sum(self.coeff**2))
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"start-state coefficients sum to {total!r}")

        g_basis = measurement_matrix(self.red, chain.marked)
        c = np.zeros((2 * n - 1, 2 * n - 1), dtype=complex)
        c[0, 0] = 1.0
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        for k in range(n - 1):
            i_v, i_p = self.red.index_vk(k), self.red.index_perp(k)
            c[i_v, 1 + 2 * k] = inv_sqrt2
            c[i_p, 1 + 2 * k] = 1j * inv_sqrt2
            c[i_v, 2 + 2 * k] = inv_sqrt2
            c[i_p, 2 + 2 * k] = -1j * inv_sqrt2
        self.g_eig = c.conj().T @ g_basis @ c

    def exact_average(self, T: float) -> float:
        diff = self.energies[:, None] - self.energies[None, :]
        weights = np.exp(-0.5j * diff * T) * _sinc(0.5 * diff * T)
        rho = weights * np.outer(self.coeff, self.coeff)
        value = np.einsum("ab,ba->", rho, self.g_eig)
        return float(value.real)

    def success_at_times(self, times: np.ndarray) -> np.ndarray:
        phases = np.exp(-1j * np.outer(times, self.energies)) * self.coeff[None, :]
        return np.einsum("ta,ab,tb->t", phases.conj(), self.g_eig, phases).real

    def coherence_norm(self, T: float) -> float:
        """Frobenius norm of the off-diagonal (zero-state) block of the average.

        2 sqrt(2 sum |alpha_j alpha_n|^2 sin^2(phi T/2) / (phi T)^2) with the
        sum over both +- branches; the T -> 0 limit is
        sqrt(2) |alpha_n| sqrt(1 - alpha_n^2).
        """
        if T > 0:
            per_branch = (0.5 * _sinc(0.5 * self.phis * T)) ** 2
        else:
            per_branch = np.full_like(self.phis, 0.25)
        total = 2.0 * np.sum((self.alpha_j * self.alpha_n) ** 2 * per_branch)
        return float(2.0 * np.sqrt(2.0 * total))


def _resolve_time(setup, T, epsilon_precision) -> tuple[float, float]:
    ht_plus = extended_hitting_time(setup.chain)
    if T is None:
        _check_epsilon(epsilon_precision)
        T = sqrt(ht_plus / 2.0) / epsilon_precision
    elif T < 0:
        raise ValidationError(f"T must be nonnegative, got {T}")
    return float(T), float(ht_plus)


def averaged_success(
    chain: StochasticChain,
    T: float | None = None,
    epsilon_precision: float = 0.1,
) -> PhaseRandomResult:
    """Exact expected success probability of the randomized-time evolution.

    The time average is taken analytically in the H(s*) eigenbasis, so the
    result carries no sampling noise; T = None schedules
    T = (1/eps) sqrt(HT+/2).
    """
    setup = _PhaseRandomSetup(chain)
    T, ht_plus = _resolve_time(setup, T, epsilon_precision)
    success = setup.exact_average(T)
    return PhaseRandomResult(
        s_star=setup.s_star,
        success_probability=success,
        success_stderr=None,
        alpha_n_sq=setup.alpha_n**2,
        dephasing_error=setup.coherence_norm(T),
        ht_plus=ht_plus,
        T=T,
        p_M=setup.p_M,
        mode="exact",
    )


def sampled_run(
    chain: StochasticChain,
    T: float | None = None,
    samples: int = 10_000,
    seed: int = 0,
    epsilon_precision: float = 0.1,
) -> PhaseRandomResult:
    """Estimate the averaged success from uniformly drawn evolution times.

    Each trajectory i draws its time from the stream keyed (seed, i), so a
    rerun with the same seed is bit-identical no matter how trajectories are
    scheduled. The mean converges to :func:`averaged_success` as samples grow.
    """
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    setup = _PhaseRandomSetup(chain)
    T, ht_plus = _resolve_time(setup, T, epsilon_precision)
    times = np.array(
        [np.random.default_rng((seed, i)).uniform(0.0, T) for i in range(samples)]
    )
    probs = setup.success_at_times(times)
    mean = float(probs.mean())
    stderr = float(probs.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return PhaseRandomResult(
        s_star=setup.s_star,
        success_probability=mean,
        success_stderr=stderr,
        alpha_n_sq=setup.alpha_n**2,
        dephasing_error=setup.coherence_norm(T),
        ht_plus=ht_plus,
        T=T,
        p_M=setup.p_M,
        mode="sampled",
        samples=samples,
        seed=seed,
    )


def dephasing_error(chain: StochasticChain, T: float) -> float:
    """Frobenius-norm coherence bound of the time-averaged state at s*."""
    if T < 0:
        raise ValidationError(f"T must be nonnegative, got {T}")
    return _PhaseRandomSetup(chain).coherence_norm(T)


def run_phase_random(chain: StochasticChain, config: PhaseRandomConfig) -> PhaseRandomResult:
    if config.mode == "exact":
        return averaged_success(chain, config.T, config.epsilon_precision)
    if config.mode == "sampled":
        return sampled_run(
            chain, config.T, config.samples, config.seed, config.epsilon_precision
        )
    raise ValidationError(f"mode must be 'exact' or 'sampled', got {config.mode!r}")


def dense_averaged_success(
    chain: StochasticChain,
    T: float | None = None,
    epsilon_precision: float = 0.1,
    completion: str = "householder",
    completion_seed: int = 0,
) -> float:
    """Cross-validation path: the same exact average in the full n^2 space.

    Builds H(s*) densely with an explicit unitary completion of V. First-
    register statistics must not depend on the completion; acceptance checks
    this by comparing two completions (and the reduced-basis value).
    """
    setup = _PhaseRandomSetup(chain)
    T, _ = _resolve_time(setup, T, epsilon_precision)
    chain = setup.chain
    n = chain.n
    op = build_dense(chain, setup.s_star, "hamiltonian", completion, completion_seed)
    energies, basis = np.linalg.eigh(op.matrix)

    psi0 = np.zeros(n * n)
    psi0[np.arange(n) * n] = np.sqrt(chain.pi)
    coeff = basis.conj().T @ psi0

    proj = np.zeros(n * n)
    for x in chain.marked_list:
        proj[x * n : (x + 1) * n] = 1.0
    m_eig = basis.conj().T @ (proj[:, None] * basis)

    diff = energies[:, None] - energies[None, :]
    weights = np.exp(-0.5j * diff * T) * _sinc(0.5 * diff * T)
    rho = weights * np.outer(coeff, coeff.conj())
    return float(np.einsum("ab,ba->", rho, m_eig).real)
