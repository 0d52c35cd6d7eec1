"""
Communicability of signed graphs and the geometry it induces.

The communicability matrix is ``Gamma = exp(A)``, computed from one symmetric
eigendecomposition of the adjacency matrix. Distances, angles and cosines
are derived from ``Gamma`` alone so that degenerate eigenspaces cannot make
them depend on the eigenvector basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .graph import SignedGraph, underlying

SYMMETRY_TOL = 1e-12
SIGN_TOL = 1e-10
DEGENERACY_GAP = 1e-9
CLAMP_WARN = 1e-9


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in non-increasing order; column ``k`` of ``eigenvectors``
    pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.T


@dataclass(frozen=True)
class CommunicabilitySet:
    gamma: np.ndarray
    edm: np.ndarray
    theta: np.ndarray
    rho: np.ndarray
    d_theta: np.ndarray
    clamp_excess: float = 0.0

    @property
    def xi(self) -> np.ndarray:
        """Communicability distance, the entrywise square root of ``edm``."""
        return np.sqrt(self.edm)

    @property
    def n(self) -> int:
        return self.gamma.shape[0]


@dataclass(frozen=True)
class PositionVectors:
    """Column ``i`` of ``coords`` is the position vector of node ``i``."""

    coords: np.ndarray
    degenerate_flag: bool


@dataclass(frozen=True)
class CompleteGraphReference:
    n: int
    gamma_ii: float
    gamma_ij_plus: float
    gamma_ij_minus: float
    cos_theta_plus: float
    cos_theta_minus: float
    xi_cross: float

    @property
    def theta_plus(self) -> float:
        return math.acos(self.cos_theta_plus)

    @property
    def theta_minus(self) -> float:
        return math.acos(self.cos_theta_minus)


def normalize_signs(U: np.ndarray, tol: float = SIGN_TOL) -> np.ndarray:
    """Flip columns so the first component with ``|x| > tol`` is positive."""
    U = np.array(U, dtype=float, copy=True)
    for k in range(U.shape[1]):
        nz = np.flatnonzero(np.abs(U[:, k]) > tol)
        if nz.size and U[nz[0], k] < 0:
            U[:, k] = -U[:, k]
    return U


def eig_sym(S) -> EigenDecomposition:
    """Symmetric eigendecomposition (LAPACK ``syevd`` via :func:`numpy.linalg.eigh`)."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(S)):
        raise NumericalError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(S), initial=0.0)))
    if np.max(np.abs(S - S.T), initial=0.0) > SYMMETRY_TOL * scale:
        raise ValueError("matrix is not symmetric")
    try:
        w, V = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver failed: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    return EigenDecomposition(w, normalize_signs(_canonical_blocks(w, V, DEGENERACY_GAP * scale)))


def _canonical_blocks(w: np.ndarray, V: np.ndarray, gap: float) -> np.ndarray:
    # Inside a repeated eigenvalue the solver's basis is arbitrary. Rotate each
    # block to echelon form from the bottom row up: the k-th vector of an
    # m-fold block vanishes on the last m-1-k rows.
    V = V.copy()
    n = len(w)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[stop - 1] - w[stop] < gap:
            stop += 1
        m = stop - start
        if m > 1:
            T = V[::-1, start:stop][:m]
            Q, _ = np.linalg.qr(T.T)
            V[:, start:stop] = V[:, start:stop] @ Q[:, ::-1]
        start = stop
    return V


def _expm_sym(A: np.ndarray) -> np.ndarray:
    ed = eig_sym(A)
    U = ed.eigenvectors
    with np.errstate(over="raise"):
        try:
            G = (U * np.exp(ed.eigenvalues)) @ U.T
        except FloatingPointError as exc:
            raise NumericalError("exp(A) overflows double precision") from exc
    return 0.5 * (G + G.T)


def communicability_matrix(g: SignedGraph) -> np.ndarray:
    """``exp(A)`` for the signed adjacency matrix."""
    return _expm_sym(g.adjacency.astype(float))


def communicability_set(g: SignedGraph) -> CommunicabilitySet:
    """Squared distances, angles, cosines and ``2 - 2 cos`` from one ``Gamma``."""
    G = communicability_matrix(g)
    s = np.diag(G).copy()
    if np.any(s <= 0):
        raise NumericalError("non-positive self-communicability")
    edm = s[:, None] + s[None, :] - 2.0 * G
    np.fill_diagonal(edm, 0.0)
    edm = np.maximum(edm, 0.0)

    raw = G / np.sqrt(np.outer(s, s))
    np.fill_diagonal(raw, 1.0)
    excess = float(np.max(np.abs(raw) - 1.0, initial=0.0))
    rho = np.clip(raw, -1.0, 1.0)
    theta = np.arccos(rho)
    np.fill_diagonal(theta, 0.0)
    d_theta = 2.0 - 2.0 * rho
    np.fill_diagonal(d_theta, 0.0)
    return CommunicabilitySet(G, edm, theta, rho, d_theta, clamp_excess=max(excess, 0.0))


def position_vectors(g: SignedGraph) -> PositionVectors:
    """``X = exp(Lambda / 2) U^T``; ``X[:, i] @ X[:, j] == Gamma[i, j]``."""
    ed = eig_sym(g.adjacency.astype(float))
    X = np.exp(ed.eigenvalues / 2.0)[:, None] * ed.eigenvectors.T
    gaps = -np.diff(ed.eigenvalues)
    return PositionVectors(X, bool(np.any(gaps < DEGENERACY_GAP)))


def balance_via_exponential(g: SignedGraph, tol: float = 1e-8) -> bool:
    """True iff ``|exp(A)| == exp(|A|)`` entrywise, relative to ``max exp(|A|)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    G = communicability_matrix(g)
    H = communicability_matrix(underlying(g))
    return bool(np.max(np.abs(np.abs(G) - H)) <= tol * np.max(np.abs(H)))


def complete_closed_forms(n: int) -> CompleteGraphReference:
    """Reference values for balanced complete graphs on ``n`` nodes."""
    if n < 2:
        raise ValueError("n must be at least 2")
    en = math.exp(n)
    e = math.e
    gii = (math.exp(n - 1) + (n - 1) / e) / n
    gij = (en - 1.0) / (n * e)
    cos_plus = (en - 1.0) / (en + n - 1.0)
    return CompleteGraphReference(
        n=n,
        gamma_ii=gii,
        gamma_ij_plus=gij,
        gamma_ij_minus=-gij,
        cos_theta_plus=cos_plus,
        cos_theta_minus=-cos_plus,
        xi_cross=math.sqrt(2.0 * (2.0 * en + n - 2.0) / (n * e)),
    )


def circumcenter(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares centre of the rows of ``points`` and each row's distance to it.

    Solves ``2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2``.
    """
    P = np.asarray(points, dtype=float)
    lhs = 2.0 * (P[1:] - P[0])
    sq = np.sum(P * P, axis=1)
    rhs = sq[1:] - sq[0]
    c, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    return c, np.linalg.norm(P - c, axis=1)
