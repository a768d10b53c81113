import numpy as np
import pytest
import scipy.sparse as sp

from oracles import brute_force_knn
from sketchsc.graph import (AffinityGraph, build_affinity_binary,
                            build_affinity_heat, knn_sets)
from sketchsc.sketch import make_rademacher


def _line_points():
    # three 1-D columns at positions 0, 1, 10
    return np.array([[0.0, 1.0, 10.0]])


def test_knn_line_example():
    nbrs, _ = knn_sets(_line_points(), k=1)
    assert [set(n) for n in nbrs] == [{1}, {0}, {1}]


def test_knn_ties_break_by_index():
    A = np.ones((2, 4))  # all columns identical
    nbrs, _ = knn_sets(A, k=2)
    assert [set(n) for n in nbrs] == [{1, 2}, {0, 2}, {0, 1}, {0, 1}]


def test_knn_two_points():
    nbrs, _ = knn_sets(np.array([[0.0, 1.0]]), k=1)
    assert [set(n) for n in nbrs] == [{1}, {0}]


def test_knn_rejects_large_k():
    with pytest.raises(ValueError):
        knn_sets(_line_points(), k=3)


def test_knn_matches_brute_force():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((4, 25))
    nbrs, _ = knn_sets(A, k=5)
    ref = brute_force_knn(A, 5)
    for got, want in zip(nbrs, ref):
        assert set(got) == set(want)


def test_binary_line_example():
    W = build_affinity_binary(_line_points(), k=1).weights
    assert W.nnz == 4  # edges {0,1} and {1,2}, symmetric
    assert W[0, 1] == W[1, 0] == 1
    assert W[1, 2] == W[2, 1] == 1
    assert W[0, 2] == 0


def test_binary_two_points():
    W = build_affinity_binary(np.array([[0.0, 1.0]]), k=1).weights
    assert np.array_equal(W.toarray(), [[0, 1], [1, 0]])


def test_binary_symmetric_zero_diagonal():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 20))
    G = build_affinity_binary(A, k=4)
    W = G.weights
    assert (abs(W - W.T) > 0).nnz == 0
    assert not W.diagonal().any()
    # each row has at least k nonzeros (mutual-OR only adds edges)
    assert (W != 0).sum(axis=1).min() >= 4


def test_edges_monotone_in_k():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((3, 15))
    prev = set()
    for k in range(1, 8):
        W = sp.coo_matrix(build_affinity_binary(A, k).weights)
        edges = set(zip(W.row.tolist(), W.col.tolist()))
        assert prev <= edges
        prev = edges


def test_heat_identical_columns_weight_one():
    A = np.array([[1.0, 1.0, 5.0]])
    G = build_affinity_heat(A, k=1, sigma=2.0)
    assert G.weights[0, 1] == pytest.approx(1.0)


def test_heat_weight_at_sigma_distance():
    A = np.array([[0.0, 2.0, 10.0]])
    G = build_affinity_heat(A, k=1, sigma=2.0)
    assert G.weights[0, 1] == pytest.approx(np.exp(-1.0))


def test_heat_large_sigma_approaches_binary():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((3, 12))
    binary = build_affinity_binary(A, k=3).weights.toarray()
    heat = build_affinity_heat(A, k=3, sigma=1e8).weights.toarray()
    assert np.allclose(heat, binary, atol=1e-12)


def test_heat_auto_sigma_is_median_knn_distance():
    A = np.array([[0.0, 1.0, 3.0, 10.0]])
    G = build_affinity_heat(A, k=1, sigma="auto")
    nbrs, D2 = knn_sets(A, 1)
    dists = np.sqrt([D2[i, n[0]] for i, n in enumerate(nbrs)])
    assert G.sigma == pytest.approx(np.median(dists))


def test_heat_rejects_bad_sigma():
    with pytest.raises(ValueError):
        build_affinity_heat(_line_points(), k=1, sigma=0.0)


def test_affinity_graph_validation():
    with pytest.raises(ValueError, match="symmetric"):
        AffinityGraph(np.array([[0.0, 1.0], [0.0, 0.0]]), 1, "binary")
    with pytest.raises(ValueError, match="diagonal"):
        AffinityGraph(np.eye(2), 1, "binary")
    with pytest.raises(ValueError, match="nonnegative"):
        AffinityGraph(np.array([[0.0, -1.0], [-1.0, 0.0]]), 1, "binary")


def test_distance_ratio_band_for_pseudoinverse_reps():
    # exact-fit representations z = pinv(X) x vs a = pinv(XR) x with
    # n = 4*rank stay within a [0.5, 2.0] ratio band
    rng = np.random.default_rng(4)
    rho = 10
    X = rng.standard_normal((40, rho)) @ rng.standard_normal((rho, 100))
    Z = np.linalg.pinv(X) @ X
    iu, ju = np.triu_indices(100, k=1)
    dz = np.linalg.norm(Z[:, iu] - Z[:, ju], axis=0)
    for seed in range(20):
        B = X @ make_rademacher(100, 4 * rho, seed=seed).materialize()
        A = np.linalg.pinv(B) @ X
        da = np.linalg.norm(A[:, iu] - A[:, ju], axis=0)
        keep = dz > 1e-12
        ratio = da[keep] / dz[keep]
        assert ratio.min() >= 0.5 and ratio.max() <= 2.0


def test_exports(tmp_path):
    G = build_affinity_binary(_line_points(), k=1)
    mm = tmp_path / "w.mtx"
    G.save_matrix_market(mm)
    lines = mm.read_text().splitlines()
    assert lines[0] == "%%MatrixMarket matrix coordinate real symmetric"
    assert lines[1] == "3 3 2"
    edges = tmp_path / "w.csv"
    G.save_edge_list(edges)
    assert edges.read_text().splitlines() == ["i,j,w", "0,1,1.0", "1,2,1.0"]
