"""K-means with k-means++ seeding, elbow selection of k, and ranking distances."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateVectorError, DimensionError, InsufficientDataError

DEFAULT_RESTARTS = 8
DEFAULT_MAX_ITER = 300
DEFAULT_K_MAX = 10
METRICS = ("cosine", "euclidean", "manhattan")

# distances below this on the normalized elbow curve count as ties
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class ClusterModel:
    k: int
    centroids: np.ndarray  # (k, q)
    assignments: np.ndarray  # (n,) ints in [0, k)
    wcss: float
    wcss_history: tuple[float, ...] = ()
    n_iter: int = 0

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)


@dataclass(frozen=True)
class ElbowCurve:
    ks: tuple[int, ...]
    wcss_values: tuple[float, ...]
    chosen_k: int
    models: tuple[ClusterModel, ...] = field(default=(), repr=False, compare=False)

    def model_for(self, k: int) -> ClusterModel:
        return self.models[self.ks.index(k)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "wcss", "chosen"])
        for k, w in zip(self.ks, self.wcss_values):
            writer.writerow([k, repr(w), int(k == self.chosen_k)])
        return buf.getvalue()


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - C[None, :, :]
    return np.einsum("nkq,nkq->nk", diff, diff)


def _wcss(X: np.ndarray, C: np.ndarray, labels: np.ndarray) -> float:
    diff = X - C[labels]
    return float(np.sum(diff * diff))


def _means(X: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    sums = np.zeros((k, X.shape[1]))
    np.add.at(sums, labels, X)
    counts = np.bincount(labels, minlength=k)
    return sums / np.maximum(counts, 1)[:, None]


def _transfer_gains(X: np.ndarray, labels: np.ndarray, C: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Best WCSS reduction available to each point by moving it alone."""
    n = X.shape[0]
    d2 = _sq_dists(X, C)
    own = counts[labels]
    with np.errstate(divide="ignore", invalid="ignore"):
        cost_out = np.where(own > 1, own / (own - 1) * d2[np.arange(n), labels], -np.inf)
    cost_in = counts / (counts + 1) * d2
    cost_in[np.arange(n), labels] = np.inf
    return cost_out - cost_in.min(axis=1)


def kmeans_plus_plus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = np.sum((X - X[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            cum = np.cumsum(d2)
            idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            idx = min(idx, n - 1)
        chosen.append(idx)
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return X[chosen].copy()


def _repair_empty(labels: np.ndarray, d2: np.ndarray, k: int) -> None:
    """Give every empty cluster the point farthest from its current centroid.

    Only points whose cluster keeps at least one other member are eligible,
    so a repair never empties another cluster.
    """
    n = labels.shape[0]
    own = d2[np.arange(n), labels].copy()
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        eligible = counts[labels] > 1
        cand = np.where(eligible, own, -np.inf)
        p = int(np.argmax(cand))
        counts[labels[p]] -= 1
        labels[p] = j
        counts[j] = 1
        own[p] = 0.0


def _transfer_pass(X: np.ndarray, labels: np.ndarray, k: int) -> bool:
    """Apply the single best Hartigan transfer, if any lowers WCSS.

    Moving x from cluster a to b changes WCSS by
    n_b/(n_b+1)|x-c_b|^2 - n_a/(n_a-1)|x-c_a|^2; moves that gain less than
    rounding noise are ignored. Returns True if a point moved.
    """
    C = _means(X, labels, k)
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    gains = _transfer_gains(X, labels, C, counts)
    i = int(np.argmax(gains))
    if not gains[i] > 1e-12 * (1.0 + abs(gains[i])):
        return False
    n_b = counts / (counts + 1) * np.sum((C - X[i]) ** 2, axis=1)
    n_b[labels[i]] = np.inf
    labels[i] = int(np.argmin(n_b))
    return True


def lloyd(X: np.ndarray, centroids: np.ndarray, max_iter: int = DEFAULT_MAX_ITER) -> ClusterModel:
    """Lloyd iterations from the given centroids until assignments repeat.

    At each Lloyd fixed point the best single-point transfer is tried; if it
    lowers WCSS, Lloyd resumes from the improved partition.
    """
    k = centroids.shape[0]
    C = np.asarray(centroids, dtype=np.float64)
    prev = None
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        d2 = _sq_dists(X, C)
        labels = np.argmin(d2, axis=1)
        _repair_empty(labels, d2, k)
        if prev is not None and np.array_equal(labels, prev):
            if not _transfer_pass(X, labels, k):
                break
        C = _means(X, labels, k)
        history.append(_wcss(X, C, labels))
        prev = labels
    C = _means(X, prev, k)
    return ClusterModel(k, C, prev, _wcss(X, C, prev), tuple(history), it)


def _check_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionError(f"expected an n x q matrix, got shape {X.shape}")
    return X


def kmeans(
    X,
    k: int,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
    init: Sequence[np.ndarray] = (),
) -> ClusterModel:
    """Best (lowest WCSS) of ``restarts`` k-means++ runs seeded ``seed``, ``seed+1``, ...

    ``init`` adds extra runs started from explicit centroid matrices; ties in
    WCSS go to the earliest run, seeded runs first.
    """
    X = _check_matrix(X)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if restarts < 1 and not init:
        raise ValueError("need at least one restart")
    best = None
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        model = lloyd(X, kmeans_plus_plus(X, k, rng), max_iter)
        if best is None or model.wcss < best.wcss:
            best = model
    for C0 in init:
        C0 = np.asarray(C0, dtype=np.float64)
        if C0.shape != (k, X.shape[1]):
            raise DimensionError(f"initial centroids must have shape {(k, X.shape[1])}, got {C0.shape}")
        model = lloyd(X, C0, max_iter)
        if best is None or model.wcss < best.wcss:
            best = model
    return best


def choose_elbow(ks: Sequence[int], wcss: Sequence[float]) -> int:
    """Knee of a WCSS curve: the interior point farthest from the end-to-end chord.

    Both axes are min-max scaled to [0, 1] first. Ties (and perfectly
    straight curves) resolve to the smaller k. A flat curve, or one with no
    interior point, returns the first k.
    """
    ks = np.asarray(ks, dtype=np.float64)
    w = np.asarray(wcss, dtype=np.float64)
    if len(ks) != len(w) or len(ks) == 0:
        raise ValueError("ks and wcss must be non-empty and of equal length")
    span_w = w.max() - w.min()
    if len(ks) < 3 or span_w <= 0:
        return int(ks[0])
    x = (ks - ks.min()) / (ks.max() - ks.min())
    y = (w - w.min()) / span_w
    x0, y0, x1, y1 = x[0], y[0], x[-1], y[-1]
    dist = np.abs((y1 - y0) * x - (x1 - x0) * y + x1 * y0 - y1 * x0) / np.hypot(x1 - x0, y1 - y0)
    interior = dist[1:-1]
    best = interior.max()
    i = int(np.flatnonzero(interior >= best - _TIE_TOL)[0]) + 1
    return int(ks[i])


def elbow_select(
    X,
    k_max: int = DEFAULT_K_MAX,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ElbowCurve:
    """Run k-means for k = 1 .. min(k_max, n) and pick k at the elbow.

    Each k > 1 also gets one run started from the previous solution's
    centroids plus its worst-fitting point, which keeps the curve
    non-increasing.
    """
    X = _check_matrix(X)
    n = X.shape[0]
    if n < 2:
        raise InsufficientDataError(f"elbow selection needs at least 2 points, got {n}")
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    models: list[ClusterModel] = []
    for k in range(1, min(k_max, n) + 1):
        init = ()
        if models:
            prev = models[-1]
            resid = np.sum((X - prev.centroids[prev.assignments]) ** 2, axis=1)
            worst = int(np.argmax(resid))
            init = (np.vstack([prev.centroids, X[worst]]),)
        models.append(kmeans(X, k, seed=seed, restarts=restarts, max_iter=max_iter, init=init))
    ks = tuple(m.k for m in models)
    wcss = tuple(m.wcss for m in models)
    return ElbowCurve(ks, wcss, choose_elbow(ks, wcss), tuple(models))


def distance(u, v, metric: str = "cosine") -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if metric == "euclidean":
        return float(np.linalg.norm(u - v))
    if metric == "manhattan":
        return float(np.sum(np.abs(u - v)))
    if metric == "cosine":
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu == 0 or nv == 0:
            raise DegenerateVectorError("cosine distance is undefined for a zero vector")
        cos = float(np.dot(u, v) / (nu * nv))
        return min(2.0, max(0.0, 1.0 - cos))
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
