"""Clustering accuracy, stage timing, and empirical checks of the sketch
preservation guarantees (range, pairwise distances, representation-error
bounds)."""

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass
class EvalReport:
    accuracy: float | None
    wall_time_s: dict
    params: dict

    def to_json(self, **extra):
        d = {"accuracy": self.accuracy, "wall_time_s": self.wall_time_s,
             "params": self.params}
        d.update(extra)
        return json.dumps(d, indent=2, sort_keys=True)


@dataclass
class BoundCheck:
    lhs: float
    rhs: float
    params: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.lhs <= self.rhs


def clustering_accuracy(pred, truth):
    """Fraction of correctly clustered data under the best matching of
    predicted to true label ids (optimal assignment on the contingency
    matrix)."""
    pred = np.asarray(pred.labels if hasattr(pred, "labels") else pred,
                      dtype=int)
    truth = np.asarray(truth, dtype=int)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {truth.shape}")
    kp, kt = pred.max() + 1, truth.max() + 1
    m = max(kp, kt)
    cont = np.zeros((m, m))
    np.add.at(cont, (pred, truth), 1)
    rows, cols = linear_sum_assignment(-cont)
    return cont[rows, cols].sum() / len(pred)


def _numerical_rank(M, tol):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def check_range_preservation(X, B, rank_tol=1e-8):
    """True iff X, B, and [X | B] share the same numerical rank, i.e. the
    sketch preserved the column space."""
    X, B = np.asarray(X, dtype=float), np.asarray(B, dtype=float)
    rx = _numerical_rank(X, rank_tol)
    rb = _numerical_rank(B, rank_tol)
    rxb = _numerical_rank(np.hstack([X, B]), rank_tol)
    return rx == rb == rxb


def check_distance_preservation(Z, A, band):
    """Fraction of pairs (i < j) whose distance ratio
    ||a_i - a_j|| / ||z_i - z_j|| lies in [band[0], band[1]].
    Pairs with coincident z-representations are excluded."""
    Z, A = np.asarray(Z, dtype=float), np.asarray(A, dtype=float)
    if Z.shape[1] != A.shape[1]:
        raise ValueError("Z and A must have the same number of columns")
    N = Z.shape[1]
    iu, ju = np.triu_indices(N, k=1)
    dz = np.linalg.norm(Z[:, iu] - Z[:, ju], axis=0)
    da = np.linalg.norm(A[:, iu] - A[:, ju], axis=0)
    keep = dz > 1e-12
    if not keep.any():
        return 1.0
    ratio = da[keep] / dz[keep]
    lo, hi = band
    return float(np.mean((ratio >= lo) & (ratio <= hi)))


def _bound_rhs(lam, epsilon, rho, r, sigma_r1, l1_term):
    return (lam * (1 + np.sqrt((1 + epsilon) / (1 - epsilon))
                   * np.sqrt(rho - r) * sigma_r1 ** 2) + l1_term)


def representation_bound_rhs(X, r, lam, epsilon, variant="lsr", n=None):
    """Closed-form right-hand side of the representation-error bounds.

    variant "lsr": per-column, trailing term 1/sqrt(1-eps).
    variant "ssc": per-column, trailing term sqrt(n/(1-eps)).
    variant "lrr": Frobenius over the batch, leading sqrt(N) factor.
    """
    X = np.asarray(X, dtype=float)
    s = np.linalg.svd(X, compute_uv=False)
    rho = _numerical_rank(X, 1e-10)
    if r >= rho:
        raise ValueError(f"r={r} must be below rank(X)={rho}")
    sigma_r1 = s[r]
    if variant == "lsr":
        return _bound_rhs(lam, epsilon, rho, r, sigma_r1,
                          1 / np.sqrt(1 - epsilon))
    if variant == "ssc":
        return _bound_rhs(lam, epsilon, rho, r, sigma_r1,
                          np.sqrt(n / (1 - epsilon)))
    if variant == "lrr":
        N = X.shape[1]
        return (lam * (np.sqrt(N) + np.sqrt((1 + epsilon) / (1 - epsilon))
                       * np.sqrt(rho - r) * sigma_r1 ** 2)
                + np.sqrt(n / (1 - epsilon)))
    raise ValueError(f"unknown variant {variant!r}")


def representation_bound_checks(X, B, a_hat, r, lam, epsilon,
                                variant="lsr", n=None):
    """BoundChecks of the representation-error guarantee on noise-free
    unit-norm data.

    "lsr" and "ssc" return per-column checks with lhs = ||x - B a_hat||;
    "lrr" returns a single batch check with the Frobenius lhs.
    """
    X, B = np.asarray(X, dtype=float), np.asarray(B, dtype=float)
    A = np.asarray(a_hat.values if hasattr(a_hat, "values") else a_hat)
    rhs = representation_bound_rhs(X, r, lam, epsilon, variant, n=n)
    params = {"r": r, "lam": lam, "epsilon": epsilon, "n": n}
    if variant in ("lsr", "ssc"):
        resid = np.linalg.norm(X - B @ A, axis=0)
        return [BoundCheck(float(l), float(rhs), params) for l in resid]
    lhs = float(np.linalg.norm(X - B @ A))
    return BoundCheck(lhs, float(rhs), params)


class StageTimer:
    """Accumulates wall-clock seconds per pipeline stage."""

    def __init__(self):
        self.times = {}

    @contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.times[name] = self.times.get(name, 0.0) + (
                time.perf_counter() - t0)

    @property
    def total(self):
        return sum(self.times.values())
