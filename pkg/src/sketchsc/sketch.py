"""Random sketch operators and dictionary formation B = XR / X-check = R-check X."""

import json

import numpy as np

from .data import DataMatrix

KINDS = ("rademacher", "gaussian", "sparse-embedding", "hadamard-fjlt")


def _next_pow2(n):
    p = 1
    while p < n:
        p *= 2
    return p


def fwht(M):
    """Normalized Walsh-Hadamard transform along the last axis.

    Length must be a power of two; the transform is orthonormal.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    shape = M.shape
    m = M.reshape(-1, n).copy()
    h = 1
    while h < n:
        m = m.reshape(-1, n // (2 * h), 2, h)
        top = m[:, :, 0, :] + m[:, :, 1, :]
        bot = m[:, :, 0, :] - m[:, :, 1, :]
        m[:, :, 0, :] = top
        m[:, :, 1, :] = bot
        m = m.reshape(-1, n)
        h *= 2
    return (m / np.sqrt(n)).reshape(shape)


class SketchOperator:
    """Seeded, immutable random projection with `rows` input dims and
    `cols` output dims.

    Acts on the right: for a matrix M with `rows` columns, apply(M) = M @ R.
    The FJLT kind is matrix-free and cannot be materialized.
    """

    def __init__(self, kind, rows, cols, seed, jlt_params=None):
        if kind not in KINDS:
            raise ValueError(f"unknown sketch kind {kind!r}")
        if rows < 1 or cols < 1:
            raise ValueError("rows and cols must be >= 1")
        self.kind = kind
        self.rows = int(rows)
        self.cols = int(cols)
        self.seed = int(seed)
        self.jlt_params = jlt_params
        rng = np.random.default_rng(self.seed)
        if kind == "rademacher":
            self._matrix = rng.choice([-1.0, 1.0],
                                      size=(rows, cols)) / np.sqrt(cols)
        elif kind == "gaussian":
            self._matrix = rng.standard_normal((rows, cols)) / np.sqrt(cols)
        elif kind == "sparse-embedding":
            # CountSketch: one +-1 per row at a uniformly random column.
            self._target = rng.integers(0, cols, size=rows)
            self._sign = rng.choice([-1.0, 1.0], size=rows)
            self._matrix = None
        else:  # hadamard-fjlt
            self._padded = _next_pow2(rows)
            self._diag = rng.choice([-1.0, 1.0], size=self._padded)
            self._sample = rng.choice(self._padded, size=cols, replace=False)
            self._matrix = None

    def materialize(self):
        """Dense rows x cols matrix. Disallowed for the FJLT kind, whose
        contract is the fast transform only."""
        if self.kind == "hadamard-fjlt":
            raise RuntimeError("hadamard-fjlt operators are matrix-free; "
                               "use apply()")
        if self._matrix is None:
            M = np.zeros((self.rows, self.cols))
            M[np.arange(self.rows), self._target] = self._sign
            self._matrix = M
        return self._matrix

    def apply(self, M):
        """Right-multiply: M (m x rows) -> M @ R (m x cols)."""
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if M.shape[1] != self.rows:
            raise ValueError(f"operand has {M.shape[1]} columns, "
                             f"operator expects {self.rows}")
        if self.kind == "hadamard-fjlt":
            P = self._padded
            padded = np.zeros((M.shape[0], P))
            padded[:, :self.rows] = M
            transformed = fwht(padded * self._diag)
            scale = np.sqrt(P / self.cols)
            return transformed[:, self._sample] * scale
        if self.kind == "sparse-embedding":
            out = np.zeros((M.shape[0], self.cols))
            np.add.at(out.T, self._target, (M * self._sign).T)
            return out
        return M @ self.materialize()

    def to_json(self):
        return json.dumps({"kind": self.kind, "rows": self.rows,
                           "cols": self.cols, "seed": self.seed})

    @classmethod
    def from_json(cls, s):
        d = json.loads(s)
        return cls(d["kind"], d["rows"], d["cols"], d["seed"])

    def descriptor(self):
        return {"kind": self.kind, "rows": self.rows, "cols": self.cols,
                "seed": self.seed}


def make_rademacher(rows, cols, seed):
    """i.i.d. +-1 entries scaled by 1/sqrt(cols)."""
    return SketchOperator("rademacher", rows, cols, seed)


def make_gaussian(rows, cols, seed):
    """i.i.d. N(0, 1/cols) entries."""
    return SketchOperator("gaussian", rows, cols, seed)


def make_sparse_embedding(rows, cols, seed):
    """CountSketch-style: exactly one +-1 per row."""
    return SketchOperator("sparse-embedding", rows, cols, seed)


def make_fjlt_hadamard(rows, cols, seed):
    """Subsampled randomized Hadamard transform: x -> scaled row sample of
    H D x-tilde, with x zero-padded to the next power of two. Applied via
    the fast transform, never materialized."""
    return SketchOperator("hadamard-fjlt", rows, cols, seed)


def make_operator(kind, rows, cols, seed):
    return SketchOperator(kind, rows, cols, seed)


def apply_right(X, R):
    """Form the dictionary B = XR (D x cols). R acts on the N columns of X."""
    V = X.values if isinstance(X, DataMatrix) else np.asarray(X, dtype=float)
    return R.apply(V)


def apply_left(Rcheck, X):
    """Form the reduced-dimension data Rcheck-transpose sketch: returns the
    cols x N matrix whose columns are the sketched data vectors.

    Rcheck has rows = D and is interpreted as its transpose acting on
    columns of X."""
    V = X.values if isinstance(X, DataMatrix) else np.asarray(X, dtype=float)
    return Rcheck.apply(V.T).T
