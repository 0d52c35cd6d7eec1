"""
Low-dimensional embeddings and polarization scores.

Classical (Torgerson) scaling of a squared-distance matrix, optional SMACOF
refinement, PCA-based polarization and a plain Gaussian KDE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .communicability import eig_sym, normalize_signs

NEGATIVE_MASS_WARN = 1e-9


@dataclass(frozen=True)
class Embedding:
    coords: np.ndarray
    mds_eigenvalues: np.ndarray
    negative_mass: float
    stress: float | None = None
    stress_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True)
class PolarizationScores:
    scores: np.ndarray
    explained_fraction: float


def _check_sq_dist(M: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("distance matrix must be square")
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    if np.max(np.abs(M - M.T), initial=0.0) > tol * scale:
        raise ValueError("distance matrix must be symmetric")
    if np.max(np.abs(np.diag(M)), initial=0.0) > tol * scale:
        raise ValueError("distance matrix must have a zero diagonal")
    if np.min(M, initial=0.0) < -tol * scale:
        raise ValueError("distance matrix must be non-negative")
    return M


def classical_mds(M, d: int = 2) -> Embedding:
    """Classical scaling of the squared-distance matrix ``M``.

    ``B = -J M J / 2`` with ``J`` the centering matrix; coordinates are the
    top-``d`` eigenvectors of ``B`` scaled by the square roots of their
    (clipped) eigenvalues.
    """
    M = _check_sq_dist(M)
    n = M.shape[0]
    if not 1 <= d <= n - 1:
        raise ValueError(f"embedding dimension must be in [1, {n - 1}], got {d}")
    J = np.eye(n) - 1.0 / n
    B = -0.5 * J @ M @ J
    B = 0.5 * (B + B.T)
    ed = eig_sym(B)
    w = ed.eigenvalues
    total = float(np.sum(np.abs(w)))
    neg = float(np.sum(np.abs(w[w < 0])))
    coords = ed.eigenvectors[:, :d] * np.sqrt(np.maximum(w[:d], 0.0))
    coords = coords - coords.mean(axis=0)
    return Embedding(coords, w, neg / total if total > 0 else 0.0)


def raw_stress(X: np.ndarray, D: np.ndarray) -> float:
    """``sum_{i<j} (D_ij - |x_i - x_j|)^2``."""
    diff = X[:, None, :] - X[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    iu = np.triu_indices(X.shape[0], 1)
    return float(np.sum((D[iu] - dist[iu]) ** 2))


def smacof_refine(init: Embedding, D, max_iter: int = 300, tol: float = 1e-6) -> Embedding:
    """Unweighted SMACOF (Guttman transform) starting from ``init``.

    ``D`` holds target distances, not squared ones. Pairs at zero current
    distance contribute nothing to the update.
    """
    D = np.asarray(D, dtype=float)
    X = np.array(init.coords, dtype=float)
    n = X.shape[0]
    if D.shape != (n, n):
        raise ValueError("target matrix does not match the embedding")
    stress = raw_stress(X, D)
    history = [stress]
    # below this the stress is rounding noise and relative decreases mean nothing
    floor = 1e-20 * float(np.sum(np.triu(D, 1) ** 2))
    for _ in range(max_iter if stress > floor else 0):
        diff = X[:, None, :] - X[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dist > 0, D / dist, 0.0)
        Bm = -ratio
        np.fill_diagonal(Bm, 0.0)
        np.fill_diagonal(Bm, -Bm.sum(axis=1))
        X_new = Bm @ X / n
        new = raw_stress(X_new, D)
        if new > stress:
            # majorization guarantees descent; only rounding can get here
            break
        X = X_new
        decrease = stress - new
        stress = new
        history.append(stress)
        if history[-2] <= floor or decrease / history[-2] < tol:
            break
    X = X - X.mean(axis=0)
    return replace(init, coords=X, stress=stress, stress_history=tuple(history))


def pca_polarization(e: Embedding | np.ndarray) -> PolarizationScores:
    """Projection on the first principal axis, scaled to ``[-1, 1]``.

    The axis orientation gives node 0 a non-negative score.
    """
    X = np.asarray(e.coords if isinstance(e, Embedding) else e, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n < 2:
        raise ValueError("polarization needs at least two nodes")
    Xc = X - X.mean(axis=0)
    C = Xc.T @ Xc / (n - 1)
    trace = float(np.trace(C))
    if trace <= 0:
        return PolarizationScores(np.zeros(n), 0.0)
    ed = eig_sym(0.5 * (C + C.T))
    proj = Xc @ ed.eigenvectors[:, 0]
    peak = float(np.max(np.abs(proj)))
    if peak == 0:
        return PolarizationScores(np.zeros(n), 0.0)
    scores = normalize_signs((proj / peak)[:, None], tol=1e-12)[:, 0]
    return PolarizationScores(scores, float(ed.eigenvalues[0]) / trace)


def default_kde_grid(points: int = 512) -> np.ndarray:
    return np.linspace(-1.25, 1.25, points)


def gaussian_kde(scores, bandwidth: float = 0.05, grid=None) -> np.ndarray:
    """Gaussian kernel density of ``scores`` evaluated on ``grid``."""
    s = np.asarray(scores, dtype=float).ravel()
    if s.size == 0:
        raise ValueError("no scores to estimate a density from")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    x = default_kde_grid() if grid is None else np.asarray(grid, dtype=float)
    z = (x[:, None] - s[None, :]) / bandwidth
    return np.exp(-0.5 * z * z).sum(axis=1) / (s.size * bandwidth * math.sqrt(2 * math.pi))
