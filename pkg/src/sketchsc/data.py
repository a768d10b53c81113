"""Union-of-subspaces data synthesis, column normalization, and matrix I/O."""

import struct

import numpy as np

_MAGIC = b"SKSC"
_MM_HEADER = "%%MatrixMarket matrix array real general"


class SubspaceModel:
    """A union of K affine subspaces: x = C y + mu + v per cluster.

    bases: list of D x d_k matrices with orthonormal columns
    centroids: list of D-vectors (zero for linear subspaces)
    noise_std: entrywise std of the additive noise vector
    """

    def __init__(self, bases, centroids, noise_std=0.0):
        if len(bases) != len(centroids):
            raise ValueError(
                f"got {len(bases)} bases but {len(centroids)} centroids")
        if len(bases) == 0:
            raise ValueError("need at least one subspace")
        if noise_std < 0:
            raise ValueError("noise_std must be nonnegative")
        self.bases = [np.asarray(C, dtype=float) for C in bases]
        self.centroids = [np.asarray(m, dtype=float).ravel() for m in centroids]
        self.noise_std = float(noise_std)
        D = self.bases[0].shape[0]
        for k, (C, mu) in enumerate(zip(self.bases, self.centroids)):
            if C.shape[0] != D or mu.shape[0] != D:
                raise ValueError(f"subspace {k}: ambient dimension mismatch")
            if C.shape[1] > D:
                raise ValueError(f"subspace {k}: d_k={C.shape[1]} exceeds D={D}")
            gram = C.T @ C
            if C.shape[1] and np.abs(gram - np.eye(C.shape[1])).max() > 1e-10:
                raise ValueError(f"subspace {k}: basis columns not orthonormal")

    @property
    def K(self):
        return len(self.bases)

    @property
    def D(self):
        return self.bases[0].shape[0]

    @property
    def dims(self):
        return [C.shape[1] for C in self.bases]


class DataMatrix:
    """D x N matrix of data vectors as columns, with optional ground-truth labels."""

    def __init__(self, values, labels=None):
        values = np.asfortranarray(values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("values must be a nonempty 2-D matrix")
        if not np.isfinite(values).all():
            raise ValueError("values contain NaN or Inf")
        if labels is not None:
            labels = np.asarray(labels, dtype=int)
            if labels.shape != (values.shape[1],):
                raise ValueError("labels length must match column count")
        self.values = values
        self.labels = labels

    @property
    def D(self):
        return self.values.shape[0]

    @property
    def N(self):
        return self.values.shape[1]


def random_subspace_model(K, D, dims, noise_std=0.0, seed=0, affine=False,
                          centroid_scale=1.0):
    """Draw K random subspaces: orthonormal bases from QR of a seeded
    Gaussian matrix (uniform over the Stiefel manifold)."""
    if isinstance(dims, int):
        dims = [dims] * K
    if len(dims) != K:
        raise ValueError("dims must have K entries")
    rng = np.random.default_rng(seed)
    bases, centroids = [], []
    for d in dims:
        G = rng.standard_normal((D, d))
        Q, _ = np.linalg.qr(G) if d else (np.zeros((D, 0)), None)
        bases.append(Q)
        if affine:
            centroids.append(centroid_scale * rng.standard_normal(D))
        else:
            centroids.append(np.zeros(D))
    return SubspaceModel(bases, centroids, noise_std)


def generate_union_of_subspaces(model, counts, seed):
    """Generate a DataMatrix with counts[k] columns drawn from subspace k.

    Column i in cluster k is C^(k) y + mu^(k) + v with y standard normal
    and v ~ N(0, noise_std^2) entrywise. Deterministic given seed.
    """
    if len(counts) != model.K:
        raise ValueError(f"counts must have {model.K} entries")
    if any(c < 1 for c in counts):
        raise ValueError("every cluster count must be >= 1")
    rng = np.random.default_rng(seed)
    blocks, labels = [], []
    for k, (C, mu, Nk) in enumerate(zip(model.bases, model.centroids, counts)):
        Y = rng.standard_normal((C.shape[1], Nk))
        Xk = C @ Y + mu[:, None]
        if model.noise_std > 0:
            Xk = Xk + model.noise_std * rng.standard_normal(Xk.shape)
        blocks.append(Xk)
        labels.append(np.full(Nk, k))
    return DataMatrix(np.hstack(blocks), np.concatenate(labels))


def normalize_columns(X):
    """Rescale every column to unit l2 norm. A zero column is an error."""
    V = X.values if isinstance(X, DataMatrix) else np.asarray(X, dtype=float)
    norms = np.linalg.norm(V, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ValueError(f"cannot normalize zero column at index {zero[0]}")
    out = V / norms
    labels = X.labels if isinstance(X, DataMatrix) else None
    return DataMatrix(out, labels)


def save_matrix(X, path, format="raw-binary", labels=False):
    """Write a DataMatrix to disk.

    csv: one data vector per row, optional trailing integer label column.
    matrix-market: dense `array real general`.
    raw-binary: magic SKSC, u64 D, u64 N, then D*N little-endian float64
    column-major.
    """
    if not isinstance(X, DataMatrix):
        X = DataMatrix(X)
    if format == "csv":
        with open(path, "w") as f:
            for i in range(X.N):
                row = ",".join(repr(float(v)) for v in X.values[:, i])
                if labels:
                    if X.labels is None:
                        raise ValueError("labels requested but matrix has none")
                    row += f",{X.labels[i]}"
                f.write(row + "\n")
    elif format == "matrix-market":
        with open(path, "w") as f:
            f.write(_MM_HEADER + "\n")
            f.write(f"{X.D} {X.N}\n")
            for v in X.values.ravel(order="F"):
                f.write(repr(float(v)) + "\n")
    elif format == "raw-binary":
        with open(path, "wb") as f:
            f.write(_MAGIC)
            f.write(struct.pack("<QQ", X.D, X.N))
            f.write(X.values.astype("<f8").tobytes(order="F"))
    else:
        raise ValueError(f"unknown format: {format!r}")


def load_matrix(path, format="raw-binary", labels=False):
    """Read a DataMatrix written by save_matrix."""
    if format == "csv":
        return _load_csv(path, labels)
    if format == "matrix-market":
        return _load_matrix_market(path)
    if format == "raw-binary":
        return _load_raw_binary(path)
    raise ValueError(f"unknown format: {format!r}")


def _load_csv(path, has_labels):
    rows, labs = [], []
    width = None
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ValueError(
                    f"{path}: line {lineno} has {len(fields)} fields, "
                    f"expected {width}")
            try:
                vals = [float(v) for v in fields]
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            if has_labels:
                labs.append(int(vals[-1]))
                vals = vals[:-1]
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: empty file")
    V = np.array(rows).T
    return DataMatrix(V, labs if has_labels else None)


def _load_matrix_market(path):
    with open(path) as f:
        header = f.readline().strip()
        if header.split() != _MM_HEADER.split():
            raise ValueError(f"{path}: line 1: unsupported MatrixMarket "
                             f"header {header!r}")
        lineno = 1
        line = f.readline()
        lineno += 1
        while line.startswith("%"):
            line = f.readline()
            lineno += 1
        try:
            D, N = (int(v) for v in line.split())
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: bad size line") from None
        vals = []
        for line in f:
            lineno += 1
            line = line.strip()
            if not line:
                continue
            try:
                vals.append(float(line))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: bad value") from None
    if len(vals) != D * N:
        raise ValueError(f"{path}: expected {D * N} values, got {len(vals)}")
    return DataMatrix(np.array(vals).reshape((D, N), order="F"))


def _load_raw_binary(path):
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != _MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        D, N = struct.unpack("<QQ", f.read(16))
        buf = f.read()
    expected = D * N * 8
    if len(buf) != expected:
        raise ValueError(f"{path}: expected {expected} payload bytes, "
                         f"got {len(buf)}")
    V = np.frombuffer(buf, dtype="<f8").reshape((D, N), order="F")
    return DataMatrix(V)
