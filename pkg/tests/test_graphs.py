"""Graph-family generators and adjacency conversion."""

import numpy as np
import pytest
from scipy.special import comb

from qwalk import chains, graphs
from qwalk.errors import BadParams, Disconnected, NegativeWeight
from qwalk.sweep import fit_scaling


def test_complete_graph_rows():
    chain = graphs.complete(4)
    np.testing.assert_allclose(chain.p, np.where(np.eye(4), 0.0, 1 / 3), atol=0)


def test_cycle_rows():
    chain = graphs.cycle(5)
    assert chain.p[0, 1] == 0.5 and chain.p[0, 4] == 0.5
    assert chain.p[0].sum() == 1.0


def test_rook_2x2_is_four_cycle():
    chain = graphs.rook(2, 2)
    # board (row, col) -> index row*2 + col; one horizontal and one vertical
    # move from each square, each with probability 1/2
    expected = np.array(
        [
            [0.0, 0.5, 0.5, 0.0],
            [0.5, 0.0, 0.0, 0.5],
            [0.5, 0.0, 0.0, 0.5],
            [0.0, 0.5, 0.5, 0.0],
        ]
    )
    np.testing.assert_allclose(chain.p, expected, atol=0)


def test_weighted_rook_eigenvalue_composition():
    # spectrum is {p a + (1-p) b} over a in {1, -1/(n1-1)}, b in {1, -1/(n2-1)}
    # with tensor-product multiplicities
    n1, n2, p = 4, 4, 0.3
    chain = graphs.weighted_rook(n1, n2, p)
    a_vals = [(1.0, 1), (-1 / (n1 - 1), n1 - 1)]
    b_vals = [(1.0, 1), (-1 / (n2 - 1), n2 - 1)]
    expected = []
    for a, ma in a_vals:
        for b, mb in b_vals:
            expected += [p * a + (1 - p) * b] * (ma * mb)
    actual = np.sort(np.linalg.eigvalsh(chain.p))  # symmetric matrix
    np.testing.assert_allclose(actual, np.sort(expected), atol=1e-12)


def test_weighted_rook_is_symmetric_and_guarded():
    chain = graphs.weighted_rook(6, 3, 0.25)
    assert np.abs(chain.p - chain.p.T).max() == 0.0
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(BadParams):
            graphs.weighted_rook(4, 4, bad)


def test_hypercube_eigenvalues_binomial_multiplicities():
    for d in (3, 4, 6):
        chain = graphs.hypercube(d)
        vals = np.sort(np.linalg.eigvalsh(chain.p))
        expected = np.sort(
            np.concatenate([[1 - 2 * k / d] * int(comb(d, k)) for k in range(d + 1)])
        )
        np.testing.assert_allclose(vals, expected, atol=1e-12)


def test_torus_indexing_and_degree():
    chain = graphs.torus(4, d=2)
    assert chain.n == 16
    # node 0 = (0,0): neighbours (0,1), (0,3), (1,0), (3,0) -> 1, 3, 4, 12
    row = chain.p[0]
    assert {i for i in range(16) if row[i] > 0} == {1, 3, 4, 12}
    np.testing.assert_allclose(row[[1, 3, 4, 12]], 0.25, atol=0)


def test_torus_gap_scaling():
    from qwalk.spectral import discriminant

    rows = []
    for side in (8, 16, 32):
        chain = chains.make_lazy(graphs.torus(side, d=2))
        rows.append({"n": side * side, "gap": discriminant(chain).gap})
    slope, _ = fit_scaling(rows, "n", "gap")
    assert abs(slope + 1.0) <= 0.1


def test_torus_small_side_multiplicity():
    # side 2 collapses the +1/-1 moves onto the same neighbour
    chain = graphs.torus(2, d=2)
    np.testing.assert_allclose(sorted(chain.p[0]), [0.0, 0.0, 0.5, 0.5], atol=0)


@pytest.mark.parametrize(
    "spec",
    [
        graphs.FamilySpec("complete", {"n": 9}),
        graphs.FamilySpec("cycle", {"n": 7}),
        graphs.FamilySpec("torus", {"side": 4, "d": 2}),
        graphs.FamilySpec("hypercube", {"d": 4}),
        graphs.FamilySpec("rook", {"n1": 3, "n2": 4}),
        graphs.FamilySpec("weighted_rook", {"n1": 4, "n2": 4, "p": 0.2}),
        graphs.FamilySpec("random_reversible", {"n": 12, "seed": 1}),
    ],
)
def test_every_family_validates_after_lazy(spec):
    chain = graphs.generate(spec, marked=(0,))
    lazy = chains.make_lazy(chain)
    revalidated = chains.validate_chain(lazy.p, lazy.marked)
    assert revalidated.n == chain.n
    np.testing.assert_allclose(revalidated.pi, lazy.pi, atol=1e-9)


def test_generate_rejects_unknown_family_and_params():
    with pytest.raises(BadParams):
        graphs.generate(graphs.FamilySpec("petersen", {}))
    with pytest.raises(BadParams):
        graphs.generate(graphs.FamilySpec("complete", {"m": 4}))
    with pytest.raises(BadParams):
        graphs.complete(1)
    with pytest.raises(BadParams):
        graphs.complete(10_000)


def test_random_reversible_deterministic_and_connected():
    a = graphs.random_reversible(14, seed=6)
    b = graphs.random_reversible(14, seed=6)
    np.testing.assert_allclose(a.p, b.p, atol=0)
    c = graphs.random_reversible(14, seed=7)
    assert np.abs(a.p - c.p).max() > 0


def test_from_adjacency_path():
    path = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
    chain = graphs.from_adjacency(path)
    expected = np.array([[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]])
    np.testing.assert_allclose(chain.p, expected, atol=0)
    deg = path.sum(axis=1)
    np.testing.assert_allclose(chain.pi, deg / deg.sum(), atol=1e-12)


def test_from_adjacency_weighted_triangle_reversible():
    tri = np.array([[0, 1, 3], [1, 0, 2], [3, 2, 0]], dtype=float)
    chain = graphs.from_adjacency(tri)
    flux = chain.pi[:, None] * chain.p
    assert np.abs(flux - flux.T).max() <= 1e-12


def test_from_adjacency_errors():
    with pytest.raises(Disconnected):
        graphs.from_adjacency(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float))
    with pytest.raises(NegativeWeight):
        graphs.from_adjacency(np.array([[0, -1], [-1, 0]], dtype=float))
    with pytest.raises(BadParams):
        graphs.from_adjacency(np.array([[0, 1], [2, 0]], dtype=float))
