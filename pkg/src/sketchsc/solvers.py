"""Regularized regression solvers over a sketched dictionary B.

Three regularizers on the n x N coefficient matrix A:
  Frobenius (closed form), l1 (per-column ADMM), nuclear norm (batch ALM),
plus the batch least-squares baseline on the full self-dictionary.
"""

import json
import time
from dataclasses import dataclass, asdict

import numpy as np
from scipy.linalg import cho_factor, cho_solve


@dataclass
class SolverConfig:
    lam: float
    nu0: float = 1.0
    nu_max: float = 1e6
    p: float = 1.1
    tol: float = 1e-6
    max_iter: int = 500

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.nu0 <= 0 or self.nu_max <= 0 or self.nu0 > self.nu_max:
            raise ValueError("need 0 < nu0 <= nu_max")
        if self.p <= 1:
            raise ValueError("penalty growth p must exceed 1")
        if self.tol <= 0 or self.max_iter < 1:
            raise ValueError("tol must be positive and max_iter >= 1")

    def to_json(self):
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, s):
        return cls(**json.loads(s))


@dataclass
class SolveDiagnostics:
    iterations: int
    final_primal_residual: float  # relative: ||A - C||_F / max(1, ||A||_F)
    objective_value: float
    converged: bool
    wall_time: float


@dataclass
class CoefficientMatrix:
    values: np.ndarray
    method: str
    diagnostics: SolveDiagnostics


def soft_threshold(z, sigma):
    """Elementwise l1 proximal operator: shrink toward zero by sigma."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - sigma, 0.0)


def svt(M, tau):
    """Singular value thresholding: the nuclear-norm proximal operator
    argmin_C tau*||C||_* + 1/2*||C - M||_F^2."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    U, s, Vt = np.linalg.svd(np.asarray(M, dtype=float), full_matrices=False)
    s = np.maximum(s - tau, 0.0)
    return (U * s) @ Vt


def _values(X):
    return X.values if hasattr(X, "values") else np.asarray(X, dtype=float)


def solve_sketch_lsr(X, B, lam):
    """Closed form for the Frobenius-regularized objective:
    A = lam * (lam * B'B + I)^{-1} B'X via an SPD factorization."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    X, B = _values(X), _values(B)
    t0 = time.perf_counter()
    n = B.shape[1]
    fac = cho_factor(lam * (B.T @ B) + np.eye(n))
    A = lam * cho_solve(fac, B.T @ X)
    obj = 0.5 * np.sum(A * A) + 0.5 * lam * np.sum((X - B @ A) ** 2)
    diag = SolveDiagnostics(1, 0.0, obj, True, time.perf_counter() - t0)
    return CoefficientMatrix(A, "SketchLSR", diag)


def solve_batch_lsr(X, lam):
    """Batch least-squares baseline on the self-dictionary:
    Z = lam * (lam * X'X + I)^{-1} X'X."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    X = _values(X)
    G = X.T @ X
    fac = cho_factor(lam * G + np.eye(X.shape[1]))
    return lam * cho_solve(fac, G)


def _ssc_objective(X, B, A, lam):
    return np.abs(A).sum() + 0.5 * lam * np.sum((X - B @ A) ** 2)


def solve_sketch_ssc(X, B, cfg):
    """Per-column ADMM for the l1-regularized objective.

    The penalty nu is held fixed at cfg.nu0 so the n x n factorization of
    (lam*B'B + nu*I) is computed once and shared by every column and
    iteration. Columns are iterated simultaneously; a column freezes once
    both its primal residual ||a - c|| and dual residual nu*||c - c_prev||
    drop below tol * max(1, ||a||). The primal residual alone reaches
    machine zero several iterations before the iterate stabilizes, so it
    cannot serve as the sole criterion. Returns the sparse c iterate.
    """
    X, B = _values(X), _values(B)
    t0 = time.perf_counter()
    lam, nu = cfg.lam, cfg.nu0
    n, N = B.shape[1], X.shape[1]
    fac = cho_factor(lam * (B.T @ B) + nu * np.eye(n))
    BtX = lam * (B.T @ X)

    A = np.zeros((n, N))
    C = np.zeros((n, N))
    Delta = np.zeros((n, N))
    active = np.ones(N, dtype=bool)
    iters = 0
    for _ in range(cfg.max_iter):
        if not active.any():
            break
        iters += 1
        idx = np.flatnonzero(active)
        Ai = cho_solve(fac, BtX[:, idx] + nu * (C[:, idx] - Delta[:, idx]))
        Ci = soft_threshold(Ai + Delta[:, idx], 1.0 / nu)
        Delta[:, idx] += Ai - Ci
        primal = np.linalg.norm(Ai - Ci, axis=0)
        dual = nu * np.linalg.norm(Ci - C[:, idx], axis=0)
        A[:, idx], C[:, idx] = Ai, Ci
        scale = np.maximum(1.0, np.linalg.norm(Ai, axis=0))
        active[idx] = np.maximum(primal, dual) > cfg.tol * scale
    converged = not active.any()
    rel = np.linalg.norm(A - C) / max(1.0, np.linalg.norm(A))
    diag = SolveDiagnostics(iters, rel, _ssc_objective(X, B, C, lam),
                            converged, time.perf_counter() - t0)
    return CoefficientMatrix(C, "SketchSSC", diag)


def _lrr_objective(X, B, A, lam):
    nuc = np.linalg.svd(A, compute_uv=False).sum()
    return nuc + 0.5 * lam * np.sum((X - B @ A) ** 2)


def solve_sketch_lrr(X, B, cfg):
    """Inexact ALM for the nuclear-norm-regularized objective.

    A-update solves the stationarity condition of the augmented Lagrangian
    (the + sign in front of nu*(C - Delta)); C-update is SVT with threshold
    1/nu; nu grows as min(p*nu, nu_max), refactorizing when it changes.
    Returns the C iterate.
    """
    X, B = _values(X), _values(B)
    t0 = time.perf_counter()
    lam = cfg.lam
    n, N = B.shape[1], X.shape[1]
    BtB = lam * (B.T @ B)
    BtX = lam * (B.T @ X)
    A = np.zeros((n, N))
    C = np.zeros((n, N))
    Delta = np.zeros((n, N))
    nu = cfg.nu0
    fac = cho_factor(BtB + nu * np.eye(n))
    converged = False
    iters = 0
    for _ in range(cfg.max_iter):
        iters += 1
        A = cho_solve(fac, BtX + nu * (C - Delta))
        C = svt(A + Delta, 1.0 / nu)
        Delta = Delta + A - C
        if (np.linalg.norm(A - C)
                <= cfg.tol * max(1.0, np.linalg.norm(A))):
            converged = True
            break
        nu_new = min(cfg.p * nu, cfg.nu_max)
        if nu_new != nu:
            nu = nu_new
            fac = cho_factor(BtB + nu * np.eye(n))
    rel = np.linalg.norm(A - C) / max(1.0, np.linalg.norm(A))
    diag = SolveDiagnostics(iters, rel, _lrr_objective(X, B, C, lam),
                            converged, time.perf_counter() - t0)
    return CoefficientMatrix(C, "SketchLRR", diag)


def solve(method, X, B, cfg):
    """Dispatch by method name: lsr | ssc | lrr."""
    if method == "lsr":
        return solve_sketch_lsr(X, B, cfg.lam)
    if method == "ssc":
        return solve_sketch_ssc(X, B, cfg)
    if method == "lrr":
        return solve_sketch_lrr(X, B, cfg)
    raise ValueError(f"unknown method {method!r}")
