import numpy as np
import pytest
import scipy.sparse as sp

from sketchsc.evaluation import clustering_accuracy
from sketchsc.graph import build_affinity_binary
from sketchsc.spectral import (ClusterAssignment, kmeans, laplacian,
                               spectral_cluster, trailing_eigenvectors)


def _block_graph(sizes, rng=None, weighted=False):
    """Block-diagonal affinity of disjoint cliques."""
    blocks = []
    for s in sizes:
        if weighted:
            M = rng.uniform(0.5, 2.0, size=(s, s))
            M = (M + M.T) / 2
        else:
            M = np.ones((s, s))
        np.fill_diagonal(M, 0)
        blocks.append(M)
    W = sp.block_diag(blocks).tocsr()
    labels = np.repeat(np.arange(len(sizes)), sizes)
    return W, labels


def test_laplacian_two_nodes():
    L = laplacian(sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert np.array_equal(L.toarray(), [[1, -1], [-1, 1]])


def test_laplacian_of_zero_graph():
    L = laplacian(sp.csr_matrix((3, 3)))
    assert L.nnz == 0


def test_laplacian_row_sums_vanish():
    rng = np.random.default_rng(0)
    M = rng.uniform(size=(10, 10))
    W = sp.csr_matrix(np.triu(M, 1) + np.triu(M, 1).T)
    L = laplacian(W)
    assert np.abs(L @ np.ones(10)).max() <= 1e-12


def test_zero_eigenvalue_multiplicity_two_cliques():
    W, _ = _block_graph([2, 2])
    emb = trailing_eigenvectors(laplacian(W), 2)
    assert np.all(np.abs(emb.eigenvalues) <= 1e-10)


def test_path_graph_constant_eigenvector():
    W = sp.csr_matrix(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], float))
    emb = trailing_eigenvectors(laplacian(W), 1)
    assert emb.eigenvalues[0] == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(np.abs(emb.vectors[:, 0]), 1 / np.sqrt(3), atol=1e-12)


def test_three_block_eigenspace_matches_dense_oracle():
    rng = np.random.default_rng(1)
    W, labels = _block_graph([5, 7, 4], rng, weighted=True)
    L = laplacian(W)
    emb = trailing_eigenvectors(L, 3)
    assert np.abs(emb.eigenvalues).max() <= 1e-10
    # oracle: full dense eigendecomposition; compare eigenspace projectors
    vals, vecs = np.linalg.eigh(L.toarray())
    V_ref = vecs[:, :3]
    P_got = emb.vectors @ emb.vectors.T
    P_ref = V_ref @ V_ref.T
    assert np.abs(P_got - P_ref).max() <= 1e-8


def test_embedding_columns_orthonormal():
    rng = np.random.default_rng(2)
    W, _ = _block_graph([6, 6], rng, weighted=True)
    emb = trailing_eigenvectors(laplacian(W), 4)
    G = emb.vectors.T @ emb.vectors
    assert np.abs(G - np.eye(4)).max() <= 1e-8
    assert emb.eigenvalues.min() >= -1e-10


def test_sparse_eigensolver_agrees_with_dense():
    rng = np.random.default_rng(3)
    W, _ = _block_graph([20, 25, 15], rng, weighted=True)
    L = laplacian(W)
    dense = trailing_eigenvectors(L, 3, dense_cutoff=10000)
    sparse = trailing_eigenvectors(L, 3, dense_cutoff=1)
    assert np.allclose(dense.eigenvalues, sparse.eigenvalues, atol=1e-8)
    P_d = dense.vectors @ dense.vectors.T
    P_s = sparse.vectors @ sparse.vectors.T
    assert np.abs(P_d - P_s).max() <= 1e-6


def test_kmeans_two_far_clouds():
    rng = np.random.default_rng(4)
    P = np.vstack([rng.normal(0, 0.1, (10, 2)),
                   rng.normal(10, 0.1, (10, 2))])
    out = kmeans(P, 2, seed=0)
    assert len(set(out.labels[:10])) == 1
    assert len(set(out.labels[10:])) == 1
    assert out.labels[0] != out.labels[-1]
    # oracle: inertia equals within-cloud scatter of the true bipartition
    scatter = sum(np.sum((P[s] - P[s].mean(axis=0)) ** 2)
                  for s in (slice(0, 10), slice(10, 20)))
    assert out.inertia == pytest.approx(scatter, rel=1e-10)


def test_kmeans_one_point_per_cluster():
    P = np.arange(6, dtype=float).reshape(3, 2)
    out = kmeans(P, 3, seed=1)
    assert out.inertia == pytest.approx(0.0, abs=1e-12)
    assert sorted(out.labels) == [0, 1, 2]


def test_kmeans_degenerate_identical_points():
    P = np.ones((8, 2))
    out = kmeans(P, 2, seed=2)
    assert out.inertia == pytest.approx(0.0, abs=1e-12)


def test_kmeans_deterministic_per_seed():
    rng = np.random.default_rng(5)
    P = rng.standard_normal((30, 3))
    a = kmeans(P, 4, seed=7)
    b = kmeans(P, 4, seed=7)
    assert np.array_equal(a.labels, b.labels)
    assert a.inertia == b.inertia


def test_kmeans_rejects_k_above_n():
    with pytest.raises(ValueError):
        kmeans(np.zeros((2, 2)), 3)


def test_spectral_cluster_three_cliques():
    rng = np.random.default_rng(6)
    W, labels = _block_graph([8, 5, 7], rng, weighted=True)
    out = spectral_cluster(W, 3, seed=0)
    assert clustering_accuracy(out, labels) == 1.0


def test_spectral_cluster_line_graph_cuts_one_edge():
    W = build_affinity_binary(np.array([[0.0, 1.0, 10.0]]), k=1)
    out = spectral_cluster(W, 2, seed=0)
    # both minimum cuts are valid: {0,1}|{2} or {0}|{1,2}
    parts = frozenset(frozenset(np.flatnonzero(out.labels == c))
                      for c in (0, 1))
    valid = [frozenset([frozenset([0, 1]), frozenset([2])]),
             frozenset([frozenset([0]), frozenset([1, 2])])]
    assert parts in valid
    rerun = spectral_cluster(W, 2, seed=0)
    assert np.array_equal(out.labels, rerun.labels)


def test_spectral_cluster_single_clique():
    W, _ = _block_graph([5])
    out = spectral_cluster(W, 1, seed=0)
    assert np.array_equal(out.labels, np.zeros(5))


def test_multiplicity_matches_components_on_random_block_graphs():
    rng = np.random.default_rng(7)
    for trial in range(50):
        ncomp = rng.integers(2, 6)
        sizes = rng.integers(2, 8, size=ncomp)
        W, labels = _block_graph(sizes, rng, weighted=True)
        L = laplacian(W)
        vals = np.linalg.eigvalsh(L.toarray())
        assert np.sum(np.abs(vals) <= 1e-8) == ncomp
        out = spectral_cluster(W, ncomp, seed=int(trial))
        assert clustering_accuracy(out, labels) == 1.0


def test_cluster_assignment_validation_and_export(tmp_path):
    with pytest.raises(ValueError):
        ClusterAssignment([0, 3], K=2, inertia=0.0)
    a = ClusterAssignment([0, 1, 0], K=2, inertia=1.5)
    path = tmp_path / "a.csv"
    a.save_csv(path)
    assert path.read_text().splitlines() == ["index,label", "0,0", "1,1",
                                             "2,0"]
