"""
K-means with silhouette model selection and agglomerative clustering.

Cluster labels are canonicalised by order of first appearance, so node 0 is
always in cluster 0 and equal partitions compare equal as arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

LINKAGES = ("ward", "average")


@dataclass(frozen=True)
class ClusterLabels:
    labels: np.ndarray
    k: int
    inertia: float | None = None
    mean_silhouette: float | None = None
    inertia_history: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def groups(self) -> list[list[int]]:
        return [np.flatnonzero(self.labels == c).tolist() for c in range(self.k)]


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """``n - 1`` merges; leaves are ids ``0..n-1``, merge ``t`` creates id ``n + t``."""

    merges: tuple[Merge, ...]
    linkage: str

    @property
    def n(self) -> int:
        return len(self.merges) + 1

    def heights(self) -> np.ndarray:
        return np.array([m.height for m in self.merges])

    def to_list(self) -> list[dict]:
        return [
            {"left": m.left, "right": m.right, "height": m.height, "size": m.size}
            for m in self.merges
        ]

    @classmethod
    def from_list(cls, merges: Sequence[dict], linkage: str) -> "Dendrogram":
        return cls(
            tuple(Merge(int(m["left"]), int(m["right"]), float(m["height"]), int(m["size"])) for m in merges),
            linkage,
        )


def canonical_labels(labels) -> np.ndarray:
    labels = np.asarray(labels)
    mapping: dict = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, c in enumerate(labels.tolist()):
        out[i] = mapping.setdefault(c, len(mapping))
    return out


def pairwise_distances(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    sq = np.sum(X * X, axis=1)
    D2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * X @ X.T, 0.0)
    np.fill_diagonal(D2, 0.0)
    return np.sqrt(D2)


# --------------------------------------------------------------------------
# K-means
# --------------------------------------------------------------------------


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - C[None, :, :]
    return np.sum(diff * diff, axis=-1)


def _kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    closest = _sq_dists(X, np.array(centers))[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(X[idx])
        closest = np.minimum(closest, _sq_dists(X, X[idx][None, :])[:, 0])
    return np.array(centers)


def _lloyd(X: np.ndarray, C: np.ndarray, max_iter: int):
    k = C.shape[0]
    labels = None
    history = []
    for _ in range(max_iter):
        d2 = _sq_dists(X, C)
        new = np.argmin(d2, axis=1)
        history.append(float(d2[np.arange(len(X)), new].sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        C = C.copy()
        for c in range(k):
            members = labels == c
            if members.any():
                C[c] = X[members].mean(axis=0)
        # empty clusters take the point farthest from its own centre
        for c in range(k):
            if not np.any(labels == c):
                own = np.sum((X - C[labels]) ** 2, axis=1)
                far = int(np.argmax(own))
                labels[far] = c
                C[c] = X[far]
    d2 = _sq_dists(X, C)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(len(X)), labels].sum())
    return labels, inertia, history


def kmeans(coords, k: int, seed: int = 0, restarts: int = 20, max_iter: int = 300) -> ClusterLabels:
    """Best-of-``restarts`` Lloyd runs from k-means++ seeds."""
    X = np.asarray(coords, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        labels, inertia, history = _lloyd(X, _kmeanspp(X, k, rng), max_iter)
        if best is None or inertia < best[1]:
            best = (labels, inertia, history)
    labels, inertia, history = best
    labels = canonical_labels(labels)
    return ClusterLabels(labels, int(labels.max()) + 1, inertia, None, tuple(history))


# --------------------------------------------------------------------------
# Silhouette
# --------------------------------------------------------------------------


def silhouette_samples(dist, labels) -> np.ndarray:
    D = np.asarray(dist, dtype=float)
    lab = canonical_labels(labels.labels if isinstance(labels, ClusterLabels) else labels)
    k = int(lab.max()) + 1
    if k < 2:
        raise ValueError("silhouette needs at least two clusters")
    n = len(lab)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), lab] = 1.0
    sizes = onehot.sum(axis=0)
    sums = D @ onehot
    own = sizes[lab]
    a = np.where(own > 1, sums[np.arange(n), lab] / np.maximum(own - 1, 1), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        means = sums / sizes
    means[np.arange(n), lab] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where(denom > 0, (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return np.where(own > 1, s, 0.0)


def silhouette(dist, labels) -> float:
    """Mean silhouette; singletons score 0 and 0/0 counts as 0."""
    return float(np.mean(silhouette_samples(dist, labels)))


def silhouette_sweep(coords, kmin: int = 2, kmax: int | None = None, seed: int = 0,
                     restarts: int = 20, dist=None) -> dict[int, ClusterLabels]:
    """K-means for every ``k`` in ``[kmin, kmax]``, each scored by silhouette.

    ``dist`` overrides the Euclidean distances of ``coords`` for scoring.
    """
    X = np.asarray(coords, dtype=float)
    n = X.shape[0]
    if kmax is None:
        kmax = min(10, n - 1)
    if not 2 <= kmin <= kmax <= n - 1:
        raise ValueError(f"need 2 <= kmin <= kmax <= n-1 (n={n}), got kmin={kmin}, kmax={kmax}")
    D = pairwise_distances(X) if dist is None else np.asarray(dist, dtype=float)
    out = {}
    for k in range(kmin, kmax + 1):
        cl = kmeans(X, k, seed=seed, restarts=restarts)
        score = silhouette(D, cl.labels) if cl.k >= 2 else 0.0
        out[k] = ClusterLabels(cl.labels, cl.k, cl.inertia, score, cl.inertia_history)
    return out


def best_by_silhouette(curve: dict[int, ClusterLabels]) -> ClusterLabels:
    """Maximiser of the silhouette; ties go to the smaller ``k``."""
    best_k = None
    for k in sorted(curve):
        if best_k is None or curve[k].mean_silhouette > curve[best_k].mean_silhouette:
            best_k = k
    return curve[best_k]


def select_k(coords, kmin: int = 2, kmax: int | None = None, seed: int = 0,
             restarts: int = 20, dist=None) -> ClusterLabels:
    return best_by_silhouette(silhouette_sweep(coords, kmin, kmax, seed, restarts, dist))


# --------------------------------------------------------------------------
# Agglomerative clustering
# --------------------------------------------------------------------------


def _check_dissimilarity(D) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] < 1:
        raise ValueError("dissimilarity must be a non-empty square matrix")
    scale = max(1.0, float(np.max(np.abs(D), initial=0.0)))
    if not np.all(np.isfinite(D)):
        raise ValueError("dissimilarity has non-finite entries")
    if np.max(np.abs(D - D.T), initial=0.0) > 1e-9 * scale:
        raise ValueError("dissimilarity must be symmetric")
    if np.max(np.abs(np.diag(D)), initial=0.0) > 1e-9 * scale:
        raise ValueError("dissimilarity must have a zero diagonal")
    if np.min(D, initial=0.0) < -1e-9 * scale:
        raise ValueError("dissimilarity must be non-negative")
    return 0.5 * (D + D.T)


def agglomerative(dissimilarity, linkage: str = "average") -> Dendrogram:
    """Lance-Williams agglomeration.

    ``average`` merges by the size-weighted mean dissimilarity. ``ward``
    expects Euclidean distances (e.g. between embedding coordinates) and
    reports heights in the same units as those distances. Among equal
    dissimilarities the pair whose smallest leaves come first wins.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    D = _check_dissimilarity(dissimilarity)
    n = D.shape[0]
    W = D * D if linkage == "ward" else D.copy()
    np.fill_diagonal(W, np.inf)
    # cluster for slot s is identified by its smallest leaf, which is s
    size = np.ones(n)
    node_id = np.arange(n)
    active = np.ones(n, dtype=bool)
    merges = []
    for t in range(n - 1):
        # W is symmetric, so the first row-major minimum is the
        # lexicographically smallest pair (i, j) with i < j
        flat = int(np.argmin(W))
        i, j = divmod(flat, n)
        h = W[i, j]
        ni, nj = size[i], size[j]
        if linkage == "average":
            new = (ni * W[i] + nj * W[j]) / (ni + nj)
        else:
            nk = size
            new = ((ni + nk) * W[i] + (nj + nk) * W[j] - nk * h) / (ni + nj + nk)
        new[~active] = np.inf
        W[i, :] = new
        W[:, i] = new
        W[i, i] = np.inf
        W[j, :] = np.inf
        W[:, j] = np.inf
        active[j] = False
        height = float(np.sqrt(max(h, 0.0))) if linkage == "ward" else float(h)
        a, b = sorted((int(node_id[i]), int(node_id[j])))
        size[i] = ni + nj
        merges.append(Merge(a, b, height, int(size[i])))
        node_id[i] = n + t
    return Dendrogram(tuple(merges), linkage)


def cut_dendrogram(d: Dendrogram, k: int) -> ClusterLabels:
    """Labels after undoing the last ``k - 1`` merges."""
    n = d.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    parent = list(range(2 * n - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, m in enumerate(d.merges[: n - k]):
        parent[find(m.left)] = n + t
        parent[find(m.right)] = n + t
    labels = canonical_labels([find(i) for i in range(n)])
    return ClusterLabels(labels, int(labels.max()) + 1)


def _newick_label(label: str) -> str:
    if re.fullmatch(r"[A-Za-z0-9_.\-]+", label):
        return label
    return "'" + label.replace("'", "''") + "'"


def to_newick(d: Dendrogram, labels: Sequence[str]) -> str:
    """Newick string; branch lengths are height differences (leaves at 0)."""
    n = d.n
    if len(labels) != n:
        raise ValueError("label count does not match the dendrogram")
    text = {i: _newick_label(str(labels[i])) for i in range(n)}
    height = {i: 0.0 for i in range(n)}
    for t, m in enumerate(d.merges):
        parts = [f"{text.pop(c)}:{m.height - height[c]!r}" for c in (m.left, m.right)]
        text[n + t] = "(" + ",".join(parts) + ")"
        height[n + t] = m.height
    return text[2 * n - 2 if n > 1 else 0] + ";"
