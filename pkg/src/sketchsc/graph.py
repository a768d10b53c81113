"""Mutual k-nearest-neighbor affinity graph over columns of the
coefficient matrix A."""

import numpy as np
import scipy.sparse as sp


class AffinityGraph:
    """Sparse symmetric N x N nonnegative weight matrix with zero diagonal.

    kind is "binary" or "heat"; sigma holds the bandwidth actually used
    for heat-kernel weights.
    """

    def __init__(self, weights, k, kind, sigma=None):
        W = sp.csr_matrix(weights)
        if W.shape[0] != W.shape[1]:
            raise ValueError("weights must be square")
        if (abs(W - W.T) > 0).nnz:
            raise ValueError("weights must be exactly symmetric")
        if W.diagonal().any():
            raise ValueError("diagonal must be zero")
        if W.nnz and W.data.min() < 0:
            raise ValueError("weights must be nonnegative")
        self.weights = W
        self.k = int(k)
        self.kind = kind
        self.sigma = sigma

    @property
    def N(self):
        return self.weights.shape[0]

    def save_matrix_market(self, path):
        """Coordinate real symmetric format, lower triangle entries."""
        W = sp.coo_matrix(sp.tril(self.weights))
        with open(path, "w") as f:
            f.write("%%MatrixMarket matrix coordinate real symmetric\n")
            f.write(f"{self.N} {self.N} {W.nnz}\n")
            for i, j, v in zip(W.row, W.col, W.data):
                f.write(f"{i + 1} {j + 1} {float(v)!r}\n")

    def save_edge_list(self, path):
        """CSV of (i, j, w) with i < j."""
        W = sp.coo_matrix(sp.triu(self.weights, k=1))
        order = np.lexsort((W.col, W.row))
        with open(path, "w") as f:
            f.write("i,j,w\n")
            for idx in order:
                f.write(f"{W.row[idx]},{W.col[idx]},{float(W.data[idx])!r}\n")


def _pairwise_sq_dists(A):
    # Gram trick, clamped at 0 to absorb rounding.
    G = A.T @ A
    G = (G + G.T) / 2  # gemm output is not bitwise symmetric
    d = np.diag(G)
    D2 = d[:, None] + d[None, :] - 2 * G
    np.maximum(D2, 0.0, out=D2)
    return D2


def knn_sets(A, k):
    """Exact k-nearest neighbors of each column of A (n x N) in Euclidean
    distance, excluding self. Ties broken by ascending index.

    Returns (neighbors, sq_dists): a list of N index arrays and the full
    N x N squared-distance matrix (reused by the affinity builders).
    """
    A = np.asarray(A, dtype=float)
    N = A.shape[1]
    if not 1 <= k <= N - 1:
        raise ValueError(f"k must be in [1, N-1], got k={k}, N={N}")
    D2 = _pairwise_sq_dists(A)
    work = D2.copy()
    np.fill_diagonal(work, np.inf)
    # stable argsort keeps ascending index order among ties
    order = np.argsort(work, axis=1, kind="stable")
    neighbors = [order[i, :k] for i in range(N)]
    return neighbors, D2


def _mutual_edges(neighbors, N):
    rows = np.repeat(np.arange(N), [len(nb) for nb in neighbors])
    cols = np.concatenate(neighbors)
    # union with the transpose gives the mutual-OR rule
    M = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(N, N))
    M = ((M + M.T) > 0).astype(float)
    return sp.csr_matrix(M)


def build_affinity_binary(A, k):
    """[W]_ij = 1 iff j is among i's k nearest or vice versa."""
    A = np.asarray(A, dtype=float)
    neighbors, _ = knn_sets(A, k)
    W = _mutual_edges(neighbors, A.shape[1])
    return AffinityGraph(W, k, "binary")


def build_affinity_heat(A, k, sigma="auto"):
    """Same sparsity pattern as the binary graph with heat-kernel weights
    exp(-||a_i - a_j||^2 / sigma^2). sigma="auto" uses the median k-NN
    distance."""
    A = np.asarray(A, dtype=float)
    neighbors, D2 = knn_sets(A, k)
    N = A.shape[1]
    if sigma == "auto":
        knn_d = np.sqrt(np.concatenate(
            [D2[i, nb] for i, nb in enumerate(neighbors)]))
        sigma = float(np.median(knn_d))
        if sigma == 0:
            sigma = 1.0  # all k-NN pairs coincident; weights are all 1
    elif sigma <= 0:
        raise ValueError("sigma must be positive")
    pattern = _mutual_edges(neighbors, N).tocoo()
    w = np.exp(-D2[pattern.row, pattern.col] / sigma ** 2)
    W = sp.csr_matrix((w, (pattern.row, pattern.col)), shape=(N, N))
    return AffinityGraph(W, k, "heat", sigma=sigma)
