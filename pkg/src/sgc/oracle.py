"""
Brute-force reference computations.

These are deliberately naive: explicit walk enumeration, a truncated power
series for the exponential and exhaustive search over bipartitions. They
exist to check the spectral code paths at small scale and never call into
them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import SignedGraph

WALK_GATE = 10**7
FRUSTRATION_MAX_NODES = 20


@dataclass(frozen=True)
class WalkCount:
    mu_plus: int
    mu_minus: int

    @property
    def difference(self) -> int:
        return self.mu_plus - self.mu_minus

    @property
    def total(self) -> int:
        return self.mu_plus + self.mu_minus


@dataclass(frozen=True)
class FrustrationResult:
    min_frustration: int
    minimizers: frozenset[tuple[int, ...]]


def _neighbour_table(g: SignedGraph):
    A = g.adjacency
    nbrs = [np.flatnonzero(A[u]) for u in range(g.n)]
    offsets = np.zeros(g.n + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(x) for x in nbrs])
    flat = np.concatenate(nbrs) if offsets[-1] else np.zeros(0, dtype=np.int64)
    flat_sign = A[np.repeat(np.arange(g.n), np.diff(offsets)), flat] if offsets[-1] else flat
    return offsets, flat, flat_sign


def walk_tally(g: SignedGraph, start, max_length: int) -> np.ndarray:
    """Enumerate every walk of length <= ``max_length`` leaving ``start``.

    Returns an integer array ``T`` of shape ``(max_length + 1, n, 2)`` where
    ``T[k, j, 0]`` and ``T[k, j, 1]`` count the positive and negative walks of
    length ``k`` ending at ``j``. Walks are materialised one row each, level
    by level, and classified by the running product of edge signs.
    """
    if max_length < 0:
        raise ValueError("walk length must be non-negative")
    if g.n ** max_length > WALK_GATE:
        raise ValueError(f"walk enumeration gate exceeded: {g.n}^{max_length} > {WALK_GATE}")
    i = g.index(start)
    offsets, flat, flat_sign = _neighbour_table(g)
    deg = np.diff(offsets)

    tally = np.zeros((max_length + 1, g.n, 2), dtype=np.int64)
    ends = np.array([i], dtype=np.int64)
    signs = np.array([1], dtype=np.int64)
    for k in range(max_length + 1):
        np.add.at(tally[k], (ends, (signs < 0).astype(np.int64)), 1)
        if k == max_length or len(ends) == 0:
            break
        # one new row per (walk, neighbour of its endpoint)
        reps = deg[ends]
        parent = np.repeat(np.arange(len(ends)), reps)
        within = np.arange(parent.size) - np.repeat(np.cumsum(reps) - reps, reps)
        slot = offsets[ends[parent]] + within
        ends = flat[slot]
        signs = signs[parent] * flat_sign[slot]
    return tally


def count_signed_walks(g: SignedGraph, i, j, k: int) -> WalkCount:
    """Positive and negative walks of length ``k`` from ``i`` to ``j``."""
    t = walk_tally(g, i, k)
    jj = g.index(j)
    return WalkCount(int(t[k, jj, 0]), int(t[k, jj, 1]))


def integer_matrix_power(A: np.ndarray, k: int) -> np.ndarray:
    """``A**k`` with Python integers, immune to overflow."""
    A = np.asarray(A).astype(object)
    out = np.identity(A.shape[0], dtype=np.int64).astype(object)
    for _ in range(k):
        out = out.dot(A)
    return out


def taylor_exp(S, tol: float = 1e-12, max_terms: int = 10_000) -> np.ndarray:
    """Partial sums of ``sum_k S^k / k!``.

    Summation stops once the max-norm of the most recently added term falls
    below ``tol``.
    """
    S = np.asarray(S, dtype=float)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = S.shape[0]
    total = np.identity(n)
    term = np.identity(n)
    for k in range(1, max_terms):
        term = term @ S / k
        total = total + term
        if np.max(np.abs(term), initial=0.0) < tol:
            return total
    raise ArithmeticError(f"Taylor series did not reach tol={tol} in {max_terms} terms")


def frustration(g: SignedGraph, partition) -> int:
    """Positive edges across factions plus negative edges within factions."""
    s = np.asarray(partition)
    i, j = np.nonzero(np.triu(g.adjacency))
    return int(np.count_nonzero(g.adjacency[i, j] * s[i] * s[j] < 0))


def min_frustration_bipartitions(g: SignedGraph, chunk: int = 1 << 16) -> FrustrationResult:
    """Exhaustive search over the ``2^(n-1)`` bipartitions with node 1 on side +1.

    The one-faction split is included.
    """
    n = g.n
    if n > FRUSTRATION_MAX_NODES:
        raise ValueError(f"exhaustive frustration search limited to {FRUSTRATION_MAX_NODES} nodes")
    iu, ju = np.nonzero(np.triu(g.adjacency))
    sig = g.adjacency[iu, ju]
    total = 1 << (n - 1)
    bits = np.arange(n - 1, dtype=np.int64)
    best = None
    minimizers: list[tuple[int, ...]] = []
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        S = np.ones((len(codes), n), dtype=np.int64)
        S[:, 1:] = 1 - 2 * ((codes[:, None] >> bits[None, :]) & 1)
        f = np.count_nonzero(S[:, iu] * S[:, ju] * sig < 0, axis=1)
        m = int(f.min()) if len(f) else 0
        if best is None or m < best:
            best = m
            minimizers = []
        if m == best:
            minimizers.extend(tuple(int(x) for x in row) for row in S[f == best])
    return FrustrationResult(int(best), frozenset(minimizers))
