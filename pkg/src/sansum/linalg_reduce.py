"""Principal component analysis for sentence-embedding matrices."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import load_embedding_file, write_embedding_file
from .errors import DimensionError, EmbeddingFileError, InsufficientDataError

DEFAULT_MAX_COMPONENTS = 64


@dataclass(frozen=True)
class PCAModel:
    mean: np.ndarray  # (d,)
    components: np.ndarray  # (q, d), orthonormal rows
    explained_variance: np.ndarray  # (q,), non-increasing
    total_variance: float

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def dim(self) -> int:
        return self.components.shape[1]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        if self.total_variance <= 0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / self.total_variance


def default_components(n: int, d: int, cap: int = DEFAULT_MAX_COMPONENTS) -> int:
    return max(1, min(cap, n - 1, d))


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {X.shape}")
    return X


def pca_fit(X, q: int) -> PCAModel:
    """Fit the top-``q`` principal directions of ``X`` (n x d).

    Directions come from the SVD of the centered data, which yields the
    eigenvectors of the sample covariance (denominator n - 1) in descending
    eigenvalue order. Each direction is signed so that its largest-magnitude
    entry is non-negative.
    """
    X = _as_matrix(X)
    n, d = X.shape
    if n < 2:
        raise InsufficientDataError(f"PCA needs at least 2 rows, got {n}")
    if not 1 <= q <= min(n - 1, d):
        raise ValueError(f"q must lie in [1, {min(n - 1, d)}], got {q}")
    mean = X.mean(axis=0)
    centered = X - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:q].copy()
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.where(components[np.arange(q), pivots] < 0, -1.0, 1.0)
    components *= signs[:, None]
    variance = s[:q] ** 2 / (n - 1)
    total = float(np.sum(centered**2) / (n - 1))
    return PCAModel(mean, components, variance, total)


def pca_transform(model: PCAModel, X) -> np.ndarray:
    X = _as_matrix(X)
    if X.shape[1] != model.dim:
        raise DimensionError(f"model expects dimension {model.dim}, got {X.shape[1]}")
    return (X - model.mean) @ model.components.T


def pca_inverse_transform(model: PCAModel, Z) -> np.ndarray:
    Z = _as_matrix(Z)
    if Z.shape[1] != model.n_components:
        raise DimensionError(f"model has {model.n_components} components, got {Z.shape[1]}")
    return Z @ model.components + model.mean


def save_pca(model: PCAModel, path: str | Path) -> None:
    """Write the model in the embedding TSV layout.

    Rows: ``mean``, ``pc0`` .. ``pc{q-1}``, then ``variance`` holding the q
    explained variances followed by zero padding to d and ``total`` holding
    the total variance in its first slot.
    """
    d, q = model.dim, model.n_components
    variance = np.zeros(d)
    variance[:q] = model.explained_variance
    total = np.zeros(d)
    total[0] = model.total_variance
    rows = [("mean", model.mean)]
    rows += [(f"pc{i}", model.components[i]) for i in range(q)]
    rows += [("variance", variance), ("total", total)]
    write_embedding_file(path, d, rows)


def load_pca(path: str | Path) -> PCAModel:
    d, table = load_embedding_file(path)
    q = 0
    while f"pc{q}" in table:
        q += 1
    missing = [key for key in ("mean", "variance", "total") if key not in table]
    if q == 0 or missing:
        raise EmbeddingFileError(f"not a PCA model file (missing {missing or ['pc0']})")
    components = np.stack([table[f"pc{i}"] for i in range(q)])
    return PCAModel(table["mean"], components, table["variance"][:q].copy(), float(table["total"][0]))
