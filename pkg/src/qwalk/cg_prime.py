"""Edge-walk search with an oracle that decouples the marked state.

The search Hamiltonian is H_search = H - H|w,0><w,0| - |w,0><w,0|H built from
the edge-space Hamiltonian of the base chain. Starting from the zero-energy
eigenstate |v_n,0>, evolution for t1 = (pi/2) mu / sqrt(eps) concentrates
amplitude on |w~> = H|w,0>/||H|w,0>||, and an oracle rotation for
t2 = pi / (2 ||H|w,0>||) maps it onto the marked state. Everything runs in
the (2n-1)-dimensional reduced basis, where |w,0> has coefficients
(a_n; a_k, 0) because <w,0|v_k,0>perp = 0.

Two norm conventions coexist deliberately: ``coupling_norm_formula`` carries
the factor-2 display sqrt(sum 2 a_k^2 (1-lambda_k^2)) used alongside mu for
scheduling and predictions, while ``coupling_norm_numeric`` is the true
sqrt(<w,0|H^2|w,0>) that sets the physical rotation rate; their exact
sqrt(2) ratio is asserted on every run.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from math import ceil, pi

import numpy as np

from .chains import StochasticChain, ensure_lazy
from .config import TOL
from .errors import (
    BisectionFailure,
    ConditionWarning,
    EigensolveFailure,
    UnsupportedMultiMarked,
    ValidationError,
)
from .hamiltonian import ReducedHamiltonian, build_reduced

log = logging.getLogger(__name__)

__all__ = [
    "CGPrimeDiagnostics",
    "CGPrimeResult",
    "SpectralConditionCheck",
    "BracketingReport",
    "diagnostics",
    "check_spectral_condition",
    "run_cg_prime",
    "eigenvalue_bracketing",
    "DEFAULT_CONDITION_CONSTANT",
]

DEFAULT_CONDITION_CONSTANT = 0.1
_MAX_NODES = 2048


@dataclass(frozen=True)
class CGPrimeDiagnostics:
    """Spectral quantities of the base chain controlling the search."""

    overlaps: np.ndarray          # a_i = <w|v_i>, ascending eigenvalue order
    epsilon_overlap: float        # |a_n|^2
    mu: float
    coupling_norm_formula: float
    coupling_norm_numeric: float
    gap: float
    condition_ratio: float        # sqrt(eps) / (sqrt(gap) mu)
    s1: float                     # sum a_i^2 / (1 - lambda_i)
    s2: float                     # sum a_i^2 / (1 - lambda_i)^2
    w: int


@dataclass(frozen=True)
class SpectralConditionCheck:
    passed: bool
    c: float
    minimal_c: float

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class CGPrimeResult:
    t1: float
    t2: float
    nu_final: float
    nu_predicted: float
    success_probability: float
    amplification_rounds: int
    condition_ok: bool

    def to_dict(self) -> dict:
        return {
            "t1": self.t1,
            "t2": self.t2,
            "nu_final": self.nu_final,
            "nu_predicted": self.nu_predicted,
            "success_probability": self.success_probability,
            "amplification_rounds": self.amplification_rounds,
            "condition_ok": self.condition_ok,
        }


def _check_single_marked(chain: StochasticChain, w: int) -> int:
    w = int(w)
    if not 0 <= w < chain.n:
        raise ValidationError(f"marked node {w} outside [0, {chain.n})")
    extra = chain.marked - {w}
    if extra:
        raise UnsupportedMultiMarked(
            "this search handles a single marked node; its behaviour with "
            f"multiple marked nodes is not established (extra: {sorted(extra)})"
        )
    return w


def diagnostics(chain: StochasticChain, w: int) -> CGPrimeDiagnostics:
    """All scheduling quantities from the base-chain discriminant spectrum."""
    w = _check_single_marked(chain, w)
    chain = ensure_lazy(chain, "edge-walk search diagnostics")
    red = build_reduced(chain, 0.0)
    return _diagnostics_from_reduced(red, w)


def _diagnostics_from_reduced(red: ReducedHamiltonian, w: int) -> CGPrimeDiagnostics:
    a = red.spectrum.eigenvectors[w, :]
    a_k = a[:-1]
    eps = float(a[-1] ** 2)
    lam = red.lambdas
    one_minus_sq = red.phis**2  # 1 - lambda_k^2
    mu = float(np.sqrt(np.sum(2.0 * a_k**2 / one_minus_sq)))
    norm_formula = float(np.sqrt(np.sum(2.0 * a_k**2 * one_minus_sq)))
    norm_numeric = float(np.sqrt(np.sum(a_k**2 * one_minus_sq)))
    if abs(norm_formula - np.sqrt(2.0) * norm_numeric) > 1e-10 * max(norm_formula, 1.0):
        raise EigensolveFailure("factor-sqrt(2) relation between coupling norms broken")
    gap = red.spectrum.gap
    s1 = float(np.sum(a_k**2 / (1.0 - lam)))
    s2 = float(np.sum(a_k**2 / (1.0 - lam) ** 2))
    ratio = float(np.sqrt(eps) / (np.sqrt(gap) * mu))
    return CGPrimeDiagnostics(
        overlaps=a,
        epsilon_overlap=eps,
        mu=mu,
        coupling_norm_formula=norm_formula,
        coupling_norm_numeric=norm_numeric,
        gap=gap,
        condition_ratio=ratio,
        s1=s1,
        s2=s2,
        w=w,
    )


def check_spectral_condition(
    diag: CGPrimeDiagnostics, c: float = DEFAULT_CONDITION_CONSTANT
) -> SpectralConditionCheck:
    """sqrt(eps) <= c sqrt(gap) mu, with the minimal passing c reported."""
    if c <= 0:
        raise ValidationError(f"condition constant must be positive, got {c}")
    return SpectralConditionCheck(diag.condition_ratio <= c, c, diag.condition_ratio)


def run_cg_prime(
    chain: StochasticChain,
    w: int,
    c: float = DEFAULT_CONDITION_CONSTANT,
    t1: float | None = None,
) -> tuple[CGPrimeResult, CGPrimeDiagnostics]:
    """Evolve the search and report the final overlap with the marked state.

    The evolution is exact: a dense eigensolve of the reduced H_search
    propagates phases for t1, and the oracle stage is the closed-form
    rotation in span{|w,0>, |w~>}. When the spectral condition fails at the
    given c the run proceeds with a :class:`ConditionWarning` (worst-case
    families deliberately probe that regime) and the result is flagged.
    """
    w = _check_single_marked(chain, w)
    chain = ensure_lazy(chain, "edge-walk search")
    if chain.n > _MAX_NODES:
        raise ValidationError(f"n = {chain.n} exceeds search guard {_MAX_NODES}")
    red = build_reduced(chain, 0.0)
    diag = _diagnostics_from_reduced(red, w)
    condition = check_spectral_condition(diag, c)
    if not condition:
        warnings.warn(
            f"spectral condition fails at c = {c} (minimal c = {condition.minimal_c:.4g})",
            ConditionWarning,
            stacklevel=2,
        )

    eps = diag.epsilon_overlap
    if t1 is None:
        t1 = 0.5 * pi * diag.mu / np.sqrt(eps)
    t2 = 0.5 * pi / diag.coupling_norm_numeric

    h = red.h_real()
    w_vec = np.zeros(red.dim)
    w_vec[0] = diag.overlaps[-1]
    w_vec[1::2] = diag.overlaps[:-1]
    h_w = h @ w_vec
    norm_hw = float(np.linalg.norm(h_w))
    if abs(norm_hw - diag.coupling_norm_numeric) > 1e-10 * max(norm_hw, 1.0):
        raise EigensolveFailure("reduced H|w,0> norm disagrees with the spectral sum")

    h_search = h - np.outer(h_w, w_vec) - np.outer(w_vec, h_w)
    if np.linalg.norm(h_search @ w_vec) > TOL.search_annihilation:
        raise EigensolveFailure("H_search fails to annihilate |w,0>")

    try:
        energies, basis = np.linalg.eigh(h_search)
    except np.linalg.LinAlgError as exc:
        raise EigensolveFailure(str(exc)) from exc
    psi = basis @ (np.exp(-1j * energies * t1) * basis[0, :])
    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > TOL.norm_drift:
        raise EigensolveFailure(f"evolution norm drift {drift:.3e}")

    # Oracle stage: exact rotation between |w,0> and |w~> = H|w,0>/||H|w,0>||.
    w_tilde = h_w / norm_hw
    amp_w = complex(w_vec @ psi)
    amp_t = complex(w_tilde @ psi)
    theta = norm_hw * t2
    psi = (
        psi
        + (np.cos(theta) * amp_w + 1j * np.sin(theta) * amp_t - amp_w) * w_vec
        + (np.cos(theta) * amp_t + 1j * np.sin(theta) * amp_w - amp_t) * w_tilde
    )

    nu_final = float(abs(w_vec @ psi))
    nu_predicted = 1.0 / (diag.mu * diag.coupling_norm_formula)
    result = CGPrimeResult(
        t1=float(t1),
        t2=float(t2),
        nu_final=nu_final,
        nu_predicted=nu_predicted,
        success_probability=nu_final**2,
        amplification_rounds=ceil(1.0 / nu_final) if nu_final > 0 else 0,
        condition_ok=bool(condition),
    )
    return result, diag


# -- eigenvalue bracketing ----------------------------------------------------

@dataclass(frozen=True)
class BracketingReport:
    """Roots of the search eigenvalue condition next to zero, with bounds.

    The condition F(delta) = sum_i a_i^2 lambda'_i / (lambda'_i - delta) - 1
    over the 2n-1 reduced eigenvalues has exactly one root on each side of
    zero inside the reduced gap; both must land in
    [(1-eta) delta0 (1-tol), (1+eta) delta0 (1+tol)].
    """

    delta_plus: float
    delta_minus: float
    delta0: float
    eta: float
    mu_reduced: float
    reduced_gap: float
    lower: float
    upper: float
    tol: float
    condition: SpectralConditionCheck

    @property
    def ok(self) -> bool:
        return self.lower <= self.delta_plus <= self.upper and (
            self.lower <= -self.delta_minus <= self.upper
        )


def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo, fhi = f(lo), f(hi)
    if np.sign(flo) == np.sign(fhi):
        raise BisectionFailure(
            f"no sign change on [{lo:.3e}, {hi:.3e}]: F = {flo:.3e}, {fhi:.3e}"
        )
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        if hi - lo < 1e-16 * max(abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def eigenvalue_bracketing(
    chain: StochasticChain,
    w: int,
    c: float = DEFAULT_CONDITION_CONSTANT,
    tol: float = 0.05,
) -> BracketingReport:
    """Locate the two H_search eigenvalues adjacent to zero by bisection.

    Uses the full 2n-1 reduced spectrum {0} u {+-phi_k} with per-eigenstate
    overlaps a_n on the zero state and a_k/sqrt(2) on each +- pair, and the
    reduced-spectrum normalization of mu (the factor-2 convention divided by
    sqrt(2)); delta0 = |a_n| / mu_reduced and eta = a_n^2 / (mu^2 gap'^2).
    """
    w = _check_single_marked(chain, w)
    chain = ensure_lazy(chain, "eigenvalue bracketing")
    red = build_reduced(chain, 0.0)
    diag = _diagnostics_from_reduced(red, w)
    condition = check_spectral_condition(diag, c)
    if not condition:
        warnings.warn(
            f"bracketing outside its stated regime: minimal c = {condition.minimal_c:.4g}",
            ConditionWarning,
            stacklevel=2,
        )

    a_k = diag.overlaps[:-1]
    a_n = abs(float(diag.overlaps[-1]))
    lam_red = np.concatenate([[0.0], red.phis, -red.phis])
    amp_sq = np.concatenate([[a_n**2], 0.5 * a_k**2, 0.5 * a_k**2])

    def f(delta: float) -> float:
        return float(np.sum(amp_sq * lam_red / (lam_red - delta)) - 1.0)

    mu_reduced = float(np.sqrt(np.sum(a_k**2 / red.phis**2)))
    reduced_gap = float(red.phis.min())
    delta0 = a_n / mu_reduced
    eta = a_n**2 / (mu_reduced**2 * reduced_gap**2)

    hi = reduced_gap * (1.0 - 1e-9)
    lo = min(1e-9 * reduced_gap, 1e-3 * delta0)
    delta_plus = _bisect(f, lo, hi)
    delta_minus = _bisect(f, -hi, -lo)

    lower = (1.0 - eta) * delta0 * (1.0 - tol)
    upper = (1.0 + eta) * delta0 * (1.0 + tol)
    return BracketingReport(
        delta_plus=delta_plus,
        delta_minus=delta_minus,
        delta0=delta0,
        eta=eta,
        mu_reduced=mu_reduced,
        reduced_gap=reduced_gap,
        lower=lower,
        upper=upper,
        tol=tol,
        condition=condition,
    )
