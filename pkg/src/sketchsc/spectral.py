"""Spectral clustering: unnormalized Laplacian, trailing eigenvectors, and
k-means with k-means++ restarts on the embedding rows."""

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh

DENSE_EIG_CUTOFF = 2000


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    K: int
    inertia: float

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if self.labels.min(initial=0) < 0 or (
                self.labels.size and self.labels.max() >= self.K):
            raise ValueError("labels must lie in [0, K)")

    def save_csv(self, path):
        with open(path, "w") as f:
            f.write("index,label\n")
            for i, lab in enumerate(self.labels):
                f.write(f"{i},{lab}\n")

    def to_json(self):
        return json.dumps({"K": self.K, "inertia": self.inertia,
                           "labels": self.labels.tolist()})


@dataclass
class SpectralEmbedding:
    vectors: np.ndarray     # N x K, orthonormal columns
    eigenvalues: np.ndarray  # ascending


def laplacian(W):
    """L = diag(W 1) - W for an affinity graph or sparse symmetric matrix."""
    W = W.weights if hasattr(W, "weights") else sp.csr_matrix(W)
    deg = np.asarray(W.sum(axis=1)).ravel()
    return sp.diags(deg) - W


def trailing_eigenvectors(L, K, dense_cutoff=DENSE_EIG_CUTOFF):
    """K eigenpairs of symmetric L with the smallest eigenvalues, ascending.

    Dense solver below dense_cutoff, sparse shift-invert above (the
    affinity graphs have O(N) nonzeros)."""
    N = L.shape[0]
    if not 1 <= K <= N:
        raise ValueError(f"K must be in [1, N], got K={K}, N={N}")
    if N <= dense_cutoff or K >= N - 1:
        Ld = L.toarray() if sp.issparse(L) else np.asarray(L, dtype=float)
        vals, vecs = eigh(Ld, subset_by_index=[0, K - 1])
    else:
        # shift slightly below 0 so the singular Laplacian stays factorable
        vals, vecs = eigsh(sp.csc_matrix(L), k=K, sigma=-1e-5, which="LM")
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    return SpectralEmbedding(vecs, vals)


def _kmeans_pp_init(P, K, rng):
    N = P.shape[0]
    centers = np.empty((K, P.shape[1]))
    centers[0] = P[rng.integers(N)]
    d2 = np.sum((P - centers[0]) ** 2, axis=1)
    for k in range(1, K):
        total = d2.sum()
        if total <= 0:
            centers[k:] = P[rng.integers(N, size=K - k)]
            break
        centers[k] = P[rng.choice(N, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((P - centers[k]) ** 2, axis=1))
    return centers


def _lloyd(P, centers, max_iter=300):
    K = centers.shape[0]
    prev_inertia = np.inf
    labels = None
    for _ in range(max_iter):
        d2 = (np.sum(P ** 2, axis=1)[:, None]
              + np.sum(centers ** 2, axis=1)[None, :]
              - 2 * P @ centers.T)
        np.maximum(d2, 0.0, out=d2)
        new_labels = np.argmin(d2, axis=1)
        inertia = d2[np.arange(P.shape[0]), new_labels].sum()
        assert inertia <= prev_inertia + 1e-9 * max(1.0, inertia)
        if labels is not None and np.array_equal(new_labels, labels):
            return labels, inertia
        labels = new_labels
        prev_inertia = inertia
        for k in range(K):
            mask = labels == k
            if mask.any():
                centers[k] = P[mask].mean(axis=0)
            else:
                # reassign empty cluster to the point farthest from its center
                far = np.argmax(d2[np.arange(P.shape[0]), labels])
                centers[k] = P[far]
    return labels, inertia


def kmeans(P, K, seed=0, restarts=10):
    """Lloyd iterations from k-means++ seeding; best of `restarts` by
    inertia with index tie-breaking. Deterministic per seed."""
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if K > P.shape[0]:
        raise ValueError(f"K={K} exceeds point count {P.shape[0]}")
    best = None
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        centers = _kmeans_pp_init(P, K, rng)
        labels, inertia = _lloyd(P, centers)
        if best is None or inertia < best[1]:
            best = (labels, inertia)
    return ClusterAssignment(best[0], K, float(best[1]))


def spectral_cluster(W, K, seed=0, restarts=10):
    """Laplacian -> trailing eigenvectors -> k-means on the embedding rows."""
    emb = trailing_eigenvectors(laplacian(W), K)
    return kmeans(emb.vectors, K, seed=seed, restarts=restarts)
