"""Dense vs reduced edge-space Hamiltonians, locality, walk-unitary identity."""

import numpy as np
import pytest

from qwalk import chains, graphs, hamiltonian as ham
from qwalk.errors import TooLargeForDense, ValidationError

BIASED_2 = [[0.5, 0.5], [0.75, 0.25]]


def lazy_two_node():
    return chains.make_lazy(chains.validate_chain([[0.5, 0.5], [0.5, 0.5]], marked=[1]))


def random_lazy(n, seed, marked=()):
    return chains.make_lazy(graphs.random_reversible(n, seed=seed)).with_marked(marked)


def test_dense_two_node_spectrum():
    op = ham.build_dense(lazy_two_node())
    vals = np.sort(np.linalg.eigvalsh(op.matrix))
    expected = [-np.sqrt(3) / 2, 0.0, 0.0, np.sqrt(3) / 2]
    np.testing.assert_allclose(vals, expected, atol=1e-12)


def test_dense_hamiltonian_hermitian():
    op = ham.build_dense(random_lazy(6, seed=0))
    assert np.abs(op.matrix - op.matrix.conj().T).max() <= 1e-12


def test_szegedy_walk_unitary():
    op = ham.build_dense(random_lazy(6, seed=1), kind="szegedy_walk")
    w = op.matrix
    assert np.abs(w @ w.conj().T - np.eye(w.shape[0])).max() <= 1e-10


@pytest.mark.parametrize("seed", range(4))
def test_zero_multiplicity(seed):
    chain = random_lazy(7, seed=seed)
    vals = np.linalg.eigvalsh(ham.build_dense(chain).matrix)
    zeros = int((np.abs(vals) <= 1e-9).sum())
    assert zeros == (chain.n - 1) ** 2 + 1


@pytest.mark.parametrize("seed", range(4))
def test_dense_matches_reduced_spectrum(seed):
    chain = random_lazy(8, seed=seed)
    dense_vals = np.linalg.eigvalsh(ham.build_dense(chain).matrix)
    nonzero = np.sort(dense_vals[np.abs(dense_vals) > 1e-9])
    red = ham.build_reduced(chain)
    expected = np.sort(np.concatenate([red.phis, -red.phis]))
    np.testing.assert_allclose(nonzero, expected, atol=1e-9)


def test_reduced_two_node():
    red = ham.build_reduced(lazy_two_node())
    assert red.dim == 3
    np.testing.assert_allclose(red.energies, [-np.sqrt(3) / 2, 0, np.sqrt(3) / 2], atol=1e-12)
    assert red.basis_labels == ("v2,0", "v1,0", "v1,0perp")


def test_reduced_dimension_counts():
    for n in (3, 5, 9):
        red = ham.build_reduced(chains.make_lazy(graphs.complete(n)))
        assert red.dim == 2 * n - 1
        assert len(red.basis_labels) == red.dim
        assert red.energies.size == red.dim


def test_reduced_hamiltonian_block_action():
    red = ham.build_reduced(random_lazy(6, seed=2))
    h = red.hamiltonian_matrix()
    assert np.abs(h - h.conj().T).max() <= 1e-12
    for k, phi in enumerate(red.phis):
        i_v, i_p = red.index_vk(k), red.index_perp(k)
        assert h[i_p, i_v] == pytest.approx(1j * phi)
        assert h[i_v, i_p] == pytest.approx(-1j * phi)
    # zero row and column for the stationary basis vector
    assert np.abs(h[0, :]).max() == 0.0
    assert np.abs(h[:, 0]).max() == 0.0
    # real symmetric form has the same spectrum
    np.testing.assert_allclose(
        np.linalg.eigvalsh(red.h_real()), np.linalg.eigvalsh(h), atol=1e-12
    )


@pytest.mark.parametrize("seed", range(3))
def test_edge_images_orthonormal(seed):
    red = ham.build_reduced(random_lazy(7, seed=seed))
    img = red.edge_image_matrix()
    gram = img @ img.T
    assert np.abs(gram - np.eye(red.dim)).max() <= 1e-9


def test_edge_images_match_dense_action():
    # V|v_k,0> and the perp images reproduce H's sigma_y block action under
    # the dense Hbar = V H V^T.
    chain = random_lazy(5, seed=4)
    red = ham.build_reduced(chain)
    img = red.edge_image_matrix()
    hbar = ham.build_dense(chain, kind="rotated_hamiltonian").matrix
    for k, phi in enumerate(red.phis):
        v_img, p_img = img[red.index_vk(k)], img[red.index_perp(k)]
        np.testing.assert_allclose(hbar @ v_img, 1j * phi * p_img, atol=1e-10)
        np.testing.assert_allclose(hbar @ p_img, -1j * phi * v_img, atol=1e-10)
    np.testing.assert_allclose(hbar @ img[0], np.zeros(img.shape[1]), atol=1e-10)


def test_marked_state_diagonal_vanishes():
    chain = random_lazy(6, seed=5)
    h = ham.build_dense(chain).matrix
    n = chain.n
    for w in range(n):
        assert abs(h[w * n, w * n]) <= 1e-12


def test_perp_images_orthogonal_to_node_states():
    chain = random_lazy(6, seed=6)
    red = ham.build_reduced(chain)
    img = red.edge_image_matrix()
    sqrt_p = np.sqrt(chain.p)
    for w in range(chain.n):
        psi_w = np.zeros(chain.n * chain.n)
        psi_w[w * chain.n : (w + 1) * chain.n] = sqrt_p[w]
        for k in range(chain.n - 1):
            assert abs(psi_w @ img[red.index_perp(k)]) <= 1e-10


def test_stationary_image_is_uniform_edge_superposition():
    # simple-graph walk: V|v_n,0> = sum over directed edges / sqrt(|E|)
    adj = np.array([
        [0, 1, 1, 0, 0],
        [1, 0, 1, 0, 0],
        [1, 1, 0, 1, 0],
        [0, 0, 1, 0, 1],
        [0, 0, 0, 1, 0],
    ], dtype=float)
    chain = graphs.from_adjacency(adj)
    red = ham.build_reduced(chain)
    img = red.edge_image_matrix()[0].reshape(chain.n, chain.n)
    n_edges = int((adj > 0).sum())
    expected = np.where(adj > 0, 1 / np.sqrt(n_edges), 0.0)
    np.testing.assert_allclose(img, expected, atol=1e-10)


@pytest.mark.parametrize("seed", range(3))
def test_energy_gap_bracket(seed):
    red = ham.build_reduced(random_lazy(9, seed=seed))
    delta = red.spectrum.gap
    gap = red.phis.min()
    assert np.sqrt(delta) - 1e-12 <= gap <= np.sqrt(2 * delta) + 1e-12


def test_locality_symmetric_chain_has_zero_return_entries():
    chain = chains.make_lazy(graphs.complete(4))
    report = ham.verify_edge_locality(chain)
    assert report.ok
    hbar = ham.build_dense(chain, kind="rotated_hamiltonian").matrix
    n = chain.n
    for x in range(n):
        for y in range(n):
            if x != y:
                assert abs(hbar[y * n + x, x * n + y]) <= 1e-12


def test_locality_biased_two_node_entry():
    chain = chains.validate_chain(BIASED_2)
    report = ham.verify_edge_locality(chain)
    assert report.max_deviation <= 1e-10 and report.max_off_pattern <= 1e-10
    hbar = ham.build_dense(chain, kind="rotated_hamiltonian").matrix
    # <2,1|Hbar|1,2> = i (p_12 - p_21) = -i/4 (1-based nodes)
    assert hbar[1 * 2 + 0, 0 * 2 + 1] == pytest.approx(-0.25j, abs=1e-12)


def test_locality_lazy_k4_hop_magnitude():
    chain = chains.make_lazy(graphs.complete(4))
    hbar = ham.build_dense(chain, kind="rotated_hamiltonian").matrix
    n = chain.n
    # |<y,z|Hbar|x,y>| = sqrt(p_yx p_yz) = 1/6 for distinct x, z adjacent to y
    assert abs(hbar[1 * n + 2, 0 * n + 1]) == pytest.approx(1 / 6, abs=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_locality_random_chains(seed):
    report = ham.verify_edge_locality(random_lazy(8, seed=seed))
    assert report.max_deviation <= 1e-10
    assert report.max_off_pattern <= 1e-10


def test_rotated_dense_matches_direct_build():
    chain = random_lazy(6, seed=7)
    via_v = ham.build_dense(chain, kind="rotated_hamiltonian").matrix
    direct = ham._rotated_hamiltonian(chain.p)
    assert np.abs(via_v - direct).max() <= 1e-12


@pytest.mark.parametrize("s", [0.0, 0.5, 0.9])
def test_walk_identity_main_ordering(s):
    chain = random_lazy(8, seed=0, marked=(2,))
    assert ham.szegedy_identity_check(chain, s=s) <= 1e-12


def test_walk_identity_any_completion():
    chain = random_lazy(6, seed=1, marked=(0,))
    dev = ham.szegedy_identity_check(chain, completion="gram_schmidt", completion_seed=5)
    assert dev <= 1e-12


def test_walk_identity_rotated_ordering_deviates():
    # The alternative dagger placement is inconsistent with H for a generic
    # (non-symmetric) completion; the Householder completion is symmetric and
    # happens to mask the discrepancy.
    chain = random_lazy(8, seed=3)
    dev = ham.szegedy_identity_check(
        chain, ordering="rotated", completion="gram_schmidt", completion_seed=5
    )
    assert dev > 0.01
    masked = ham.szegedy_identity_check(chain, ordering="rotated", completion="householder")
    assert masked <= 1e-12


def test_measurement_matrix_full_and_empty():
    red = ham.build_reduced(random_lazy(6, seed=8))
    g_all = ham.measurement_matrix(red, range(6))
    np.testing.assert_allclose(g_all, np.eye(red.dim), atol=1e-10)
    g_none = ham.measurement_matrix(red, [])
    assert np.abs(g_none).max() == 0.0


def test_measurement_matrix_two_node_stationary_entry():
    # diagonal entry for |v_n,0> is the marked stationary mass = sin^2(theta)
    red = ham.build_reduced(lazy_two_node())
    g = ham.measurement_matrix(red, [1])
    assert g[0, 0] == pytest.approx(0.5, abs=1e-12)


def test_measurement_matrix_matches_full_images():
    chain = random_lazy(7, seed=9, marked=(1, 4))
    red = ham.build_reduced(chain)
    g_fast = ham.measurement_matrix(red, chain.marked)
    img = red.edge_image_matrix()
    proj = np.zeros(chain.n * chain.n)
    for x in chain.marked_list:
        proj[x * chain.n : (x + 1) * chain.n] = 1.0
    g_full = img @ (proj[:, None] * img.T)
    np.testing.assert_allclose(g_fast, g_full, atol=1e-12)


def test_dense_guard_and_kind_validation():
    chain = chains.make_lazy(graphs.complete(80))
    with pytest.raises(TooLargeForDense):
        ham.build_dense(chain)
    with pytest.raises(ValidationError):
        ham.build_dense(lazy_two_node(), kind="bogus")


def test_state_coefficients_roundtrip():
    chain = random_lazy(6, seed=10)
    red = ham.build_reduced(chain)
    node_vec = np.zeros(chain.n)
    node_vec[2] = 1.0
    coeff = red.state_coefficients(node_vec)
    # perp coordinates vanish and the norm is preserved
    assert np.abs(coeff[2::2]).max() == 0.0
    assert np.linalg.norm(coeff) == pytest.approx(1.0, abs=1e-12)
    img = red.edge_image_matrix()
    rebuilt = coeff @ img
    sqrt_p = np.sqrt(chain.p)
    expected = np.zeros(chain.n * chain.n)
    expected[2 * chain.n : 3 * chain.n] = sqrt_p[2]
    np.testing.assert_allclose(rebuilt, expected, atol=1e-10)
