"""Edge-walk search: scheduling quantities, evolution, eigenvalue bracketing."""

import warnings

import numpy as np
import pytest

from qwalk import chains, graphs, cg_prime as cg
from qwalk.errors import ConditionWarning, UnsupportedMultiMarked, ValidationError


def lazy_complete(n):
    return chains.make_lazy(graphs.complete(n))


def lazy_two_node():
    return chains.make_lazy(chains.validate_chain([[0.5, 0.5], [0.5, 0.5]]))


def test_diagnostics_lazy_k4_closed_form():
    # lazy K_4 spectrum {1/3 x3, 1}: eps = 1/4, mu = sqrt(27/16),
    # ||H|w>||-display = sqrt(4/3), and their product saturates 2(1-eps).
    diag = cg.diagnostics(lazy_complete(4), 0)
    assert diag.epsilon_overlap == pytest.approx(0.25, abs=1e-12)
    assert diag.mu == pytest.approx(np.sqrt(27 / 16), abs=1e-12)
    assert diag.coupling_norm_formula == pytest.approx(np.sqrt(4 / 3), abs=1e-12)
    product = diag.mu * diag.coupling_norm_formula
    assert product == pytest.approx(2 * (1 - diag.epsilon_overlap), abs=1e-9)


def test_diagnostics_two_node_closed_form():
    diag = cg.diagnostics(lazy_two_node(), 1)
    assert diag.epsilon_overlap == pytest.approx(0.5, abs=1e-12)
    assert diag.mu == pytest.approx(np.sqrt(4 / 3), abs=1e-12)
    assert diag.mu * diag.coupling_norm_formula == pytest.approx(1.0, abs=1e-12)


def test_diagnostics_state_transitive_overlap():
    for n in (8, 25):
        diag = cg.diagnostics(lazy_complete(n), n // 2)
        assert diag.epsilon_overlap == pytest.approx(1 / n, abs=1e-10)


def test_norm_conventions_sqrt2_ratio():
    for seed in range(3):
        chain = chains.make_lazy(graphs.random_reversible(9, seed=seed))
        diag = cg.diagnostics(chain, 3)
        assert diag.coupling_norm_formula == pytest.approx(
            np.sqrt(2) * diag.coupling_norm_numeric, rel=1e-12
        )


@pytest.mark.parametrize("seed", range(4))
def test_mu_bounds_and_cauchy_schwarz(seed):
    chain = chains.make_lazy(graphs.random_reversible(10, seed=seed))
    diag = cg.diagnostics(chain, 1)
    assert np.sqrt(diag.s1) <= diag.mu + 1e-12
    assert diag.mu <= np.sqrt(2 * diag.s1) + 1e-12
    product = diag.mu * diag.coupling_norm_formula
    assert product >= 2 * (1 - diag.epsilon_overlap) - 1e-12


def test_cauchy_schwarz_equality_on_complete_graphs():
    # fully degenerate non-principal spectrum saturates the bound
    for n in (4, 16, 64):
        diag = cg.diagnostics(lazy_complete(n), 0)
        product = diag.mu * diag.coupling_norm_formula
        assert product == pytest.approx(2 * (1 - diag.epsilon_overlap), abs=1e-9)


def test_spectral_condition_k400_passes():
    diag = cg.diagnostics(lazy_complete(400), 7)
    assert np.sqrt(diag.epsilon_overlap) == pytest.approx(0.05, abs=1e-12)
    check = cg.check_spectral_condition(diag, 0.1)
    assert check.passed and bool(check)
    assert check.minimal_c == pytest.approx(0.0433, abs=5e-4)


def test_spectral_condition_k4_fails():
    diag = cg.diagnostics(lazy_complete(4), 0)
    check = cg.check_spectral_condition(diag, 0.1)
    assert not check.passed
    assert check.minimal_c == pytest.approx(0.4714, abs=5e-4)


def test_spectral_condition_monotone_in_gap():
    diag = cg.diagnostics(lazy_complete(4), 0)
    # shrinking the gap with eps fixed can only hurt: minimal c scales as gap^-1/2
    assert cg.check_spectral_condition(diag, diag.condition_ratio * 1.01).passed
    assert not cg.check_spectral_condition(diag, diag.condition_ratio * 0.99).passed
    with pytest.raises(ValidationError):
        cg.check_spectral_condition(diag, 0.0)


def test_run_rejects_multi_marked():
    chain = lazy_complete(6).with_marked([0, 1])
    with pytest.raises(UnsupportedMultiMarked):
        cg.run_cg_prime(chain, 0)
    with pytest.raises(ValidationError):
        cg.run_cg_prime(lazy_complete(6), 99)


def test_run_warns_when_condition_fails():
    with pytest.warns(ConditionWarning):
        result, _ = cg.run_cg_prime(lazy_complete(4), 0)
    assert not result.condition_ok
    assert 0.0 < result.nu_final <= 1.0


def test_run_complete_graphs_overlap_near_prediction():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditionWarning)
        finals = []
        for n in (64, 128, 256):
            result, diag = cg.run_cg_prime(lazy_complete(n), 0)
            assert result.t2 <= result.t1
            ratio = result.nu_final / result.nu_predicted
            assert 1 / 3 <= ratio <= 3
            finals.append(result.nu_final)
            assert result.success_probability == pytest.approx(result.nu_final**2)
    assert (max(finals) - min(finals)) / min(finals) < 0.20


def test_run_zero_evolution_keeps_initial_overlap():
    # with t1 = 0 the state is still |v_n,0>; the oracle rotation then swaps
    # the (w, w~) amplitudes, so the overlap magnitude is <w~|v_n,0> = 0 and
    # the pre-rotation overlap equals sqrt(eps).
    chain = lazy_complete(16)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditionWarning)
        result, diag = cg.run_cg_prime(chain, 0, t1=0.0)
    # |<w,0|v_n,0>| = sqrt(eps); after the pi/2 oracle rotation the marked
    # amplitude comes from the w~ component, which is zero at t1 = 0
    assert result.nu_final == pytest.approx(0.0, abs=1e-10)
    assert np.sqrt(diag.epsilon_overlap) == pytest.approx(0.25, abs=1e-12)


def test_non_lazy_input_is_lazified_automatically():
    plain = graphs.complete(32)
    lazy = chains.make_lazy(plain)
    a = cg.diagnostics(plain, 0)
    b = cg.diagnostics(lazy, 0)
    assert a.mu == pytest.approx(b.mu, rel=1e-12)
    assert a.gap == pytest.approx(b.gap, rel=1e-12)


def test_amplification_rounds_analytic_count():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditionWarning)
        result, _ = cg.run_cg_prime(lazy_complete(64), 0)
    assert result.amplification_rounds == int(np.ceil(1.0 / result.nu_final))


def test_bracketing_k400_matches_degenerate_closed_form():
    # all non-principal eigenvalues coincide, so F has the single positive
    # root delta = sqrt(eps) * phi exactly.
    chain = lazy_complete(400)
    report = cg.eigenvalue_bracketing(chain, 0)
    lam = (400 - 2) / (2 * (400 - 1))
    phi = np.sqrt(1 - lam**2)
    assert report.delta_plus == pytest.approx(np.sqrt(1 / 400) * phi, rel=1e-9)
    assert report.delta_minus == pytest.approx(-report.delta_plus, rel=1e-9)
    assert report.ok
    # eta is exactly (sqrt(eps) / (gap' mu_reduced))^2
    eps = 1 / 400
    assert report.eta == pytest.approx(eps / (report.mu_reduced * report.reduced_gap) ** 2)


def test_bracketing_two_node_root_ratio():
    with pytest.warns(ConditionWarning):
        report = cg.eigenvalue_bracketing(lazy_two_node(), 1)
    # degenerate closed form again: root / delta0 = sqrt(1 - eps)
    assert report.delta_plus / report.delta0 == pytest.approx(np.sqrt(0.5), rel=1e-9)
    assert report.ok  # eta = 1 makes the interval generous here


def test_bracketing_torus_outside_stated_regime_still_brackets():
    chain = chains.make_lazy(graphs.torus(12, d=2))
    with pytest.warns(ConditionWarning):
        report = cg.eigenvalue_bracketing(chain, 0)
    assert report.condition.minimal_c > 0.1
    assert report.ok


def test_bracketing_eta_below_c_squared_when_condition_holds():
    # The reduced gap relation gap' >= sqrt(Delta) turns the condition
    # sqrt(eps) <= c sqrt(Delta) mu into eta <= 2 c^2.
    chain = lazy_complete(400)
    report = cg.eigenvalue_bracketing(chain, 0, c=0.1)
    assert report.condition.passed
    assert report.eta <= 2 * 0.1**2
