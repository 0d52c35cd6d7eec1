"""
Signed graphs: data model, edge-list I/O, switching and balance detection.

Nodes are opaque string labels mapped to dense indices in first-seen order;
every matrix in the package is indexed by that order.
"""

from __future__ import annotations

import io
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .exceptions import DisconnectedGraphError, GraphFormatError

SIGN_TOKENS = {"+1": 1, "-1": -1, "+": 1, "-": -1}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _is_connected(absA: np.ndarray) -> bool:
    n = absA.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(absA[u]):
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return bool(seen.all())


@dataclass(frozen=True, eq=False)
class SignedGraph:
    """Undirected signed graph with adjacency entries in {-1, 0, +1}.

    ``connected`` records whether the underlying unsigned graph is connected;
    it is computed at construction and operations that need connectivity
    check it.
    """

    labels: tuple[str, ...]
    adjacency: np.ndarray
    connected: bool = field(init=False)

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        A = np.asarray(self.adjacency)
        n = len(labels)
        if n < 1:
            raise ValueError("a signed graph needs at least one node")
        if len(set(labels)) != n:
            raise ValueError("node labels must be unique")
        if A.shape != (n, n):
            raise ValueError(f"adjacency shape {A.shape} does not match {n} labels")
        if not np.isin(A, (-1, 0, 1)).all():
            raise ValueError("adjacency entries must be -1, 0 or +1")
        if not np.array_equal(A, A.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(A) != 0):
            raise ValueError("self-loops are not allowed")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "adjacency", _frozen(A.astype(np.int64)))
        object.__setattr__(self, "connected", _is_connected(np.abs(A)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency)))

    @property
    def negative_edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency) < 0))

    def index(self, node) -> int:
        """Dense index of ``node``; ints are taken as indices, strings as labels."""
        if isinstance(node, (int, np.integer)):
            if not 0 <= node < self.n:
                raise IndexError(f"node index {node} out of range")
            return int(node)
        try:
            return self.labels.index(str(node))
        except ValueError:
            raise KeyError(f"unknown node label {node!r}") from None

    def edges(self) -> list[tuple[int, int, int]]:
        """(i, j, sign) for i < j in row-major order."""
        iu, ju = np.nonzero(np.triu(self.adjacency))
        return [(int(i), int(j), int(self.adjacency[i, j])) for i, j in zip(iu, ju)]

    def __eq__(self, other):
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.labels, self.adjacency.tobytes()))

    def __repr__(self):
        return f"SignedGraph(n={self.n}, m={self.edge_count}, negative={self.negative_edge_count})"


@dataclass(frozen=True, eq=False)
class SwitchingVector:
    """Diagonal of a switching matrix, entries in {-1, +1}."""

    signs: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.signs, dtype=np.int64).ravel()
        if not np.isin(s, (-1, 1)).all():
            raise ValueError("switching entries must be -1 or +1")
        object.__setattr__(self, "signs", _frozen(s))

    def __len__(self):
        return len(self.signs)

    def __eq__(self, other):
        if not isinstance(other, SwitchingVector):
            return NotImplemented
        return np.array_equal(self.signs, other.signs)

    def __hash__(self):
        return hash(self.signs.tobytes())


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    indicator: SwitchingVector | None = None
    witness: tuple[int, ...] | None = None

    def factions(self) -> tuple[list[int], list[int]] | None:
        """Node indices with indicator +1 and -1, or None when unbalanced."""
        if self.indicator is None:
            return None
        s = self.indicator.signs
        return [int(i) for i in np.flatnonzero(s > 0)], [int(i) for i in np.flatnonzero(s < 0)]


# --------------------------------------------------------------------------
# Edge-list I/O
# --------------------------------------------------------------------------


def _split_fields(line: str) -> list[str]:
    if "\t" in line:
        return line.split("\t")
    if "," in line:
        return line.split(",")
    return re.split(r"\s+", line)


def load_edge_list(text: str | TextIO) -> SignedGraph:
    """Parse a signed edge list.

    Each non-comment line holds ``u``, ``v`` and a sign token (``+1``,
    ``-1``, ``+`` or ``-``) separated by a tab or a comma. Lines that
    contain neither fall back to whitespace separation. Identical duplicate
    edges are accepted; conflicting ones raise :class:`GraphFormatError`.
    """
    if not isinstance(text, str):
        text = text.read()
    index: dict[str, int] = {}
    signs: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = [f.strip() for f in _split_fields(line.strip())]
        if len(fields) != 3:
            raise GraphFormatError(f"expected 3 fields, got {len(fields)}: {line!r}", lineno)
        u, v, tok = fields
        if not u or not v:
            raise GraphFormatError("empty node label", lineno)
        if tok not in SIGN_TOKENS:
            raise GraphFormatError(f"invalid sign {tok!r}", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop on {u!r}", lineno)
        for label in (u, v):
            if label not in index:
                index[label] = len(index)
        key = tuple(sorted((index[u], index[v])))
        s = SIGN_TOKENS[tok]
        if key in signs and signs[key] != s:
            raise GraphFormatError(f"conflicting duplicate edge {u!r}-{v!r}", lineno)
        signs[key] = s
    if not index:
        raise GraphFormatError("empty edge list")
    n = len(index)
    A = np.zeros((n, n), dtype=np.int64)
    for (i, j), s in signs.items():
        A[i, j] = A[j, i] = s
    return SignedGraph(tuple(index), A)


def dump_edge_list(g: SignedGraph) -> str:
    """Tab-separated edge list, ``+1``/``-1`` signs, labels verbatim.

    Edges are ordered by their larger endpoint, so reloading reproduces the
    node order whenever every node but the first has a lower-indexed
    neighbour.
    """
    ordered = sorted(g.edges(), key=lambda e: (e[1], e[0]))
    lines = [f"{g.labels[i]}\t{g.labels[j]}\t{'+1' if s > 0 else '-1'}" for i, j, s in ordered]
    return "\n".join(lines) + ("\n" if lines else "")


def from_edges(edges: Iterable[tuple], labels: Sequence[str] | None = None) -> SignedGraph:
    """Build a graph from ``(u, v, sign)`` triples.

    Without ``labels``, node labels are taken in first-seen order.
    """
    edges = list(edges)
    if labels is None:
        seen: dict[str, None] = {}
        for u, v, _ in edges:
            seen.setdefault(str(u), None)
            seen.setdefault(str(v), None)
        labels = list(seen)
    labels = [str(x) for x in labels]
    pos = {lab: k for k, lab in enumerate(labels)}
    A = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for u, v, s in edges:
        i, j = pos[str(u)], pos[str(v)]
        A[i, j] = A[j, i] = 1 if s > 0 else -1
    return SignedGraph(tuple(labels), A)


# --------------------------------------------------------------------------
# Switching and balance
# --------------------------------------------------------------------------


def underlying(g: SignedGraph) -> SignedGraph:
    return SignedGraph(g.labels, np.abs(g.adjacency))


def switch(g: SignedGraph, d) -> SignedGraph:
    """Apply the switching ``D A D`` with ``D = diag(d)``."""
    s = d.signs if isinstance(d, SwitchingVector) else SwitchingVector(d).signs
    if len(s) != g.n:
        raise ValueError(f"switching vector has length {len(s)}, graph has {g.n} nodes")
    return SignedGraph(g.labels, s[:, None] * g.adjacency * s[None, :])


def connected_components(g: SignedGraph) -> list[list[int]]:
    """Components of the underlying graph, each sorted, ordered by smallest index."""
    absA = np.abs(g.adjacency)
    comp = -np.ones(g.n, dtype=np.int64)
    out = []
    for start in range(g.n):
        if comp[start] >= 0:
            continue
        comp[start] = len(out)
        members = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(absA[u]):
                if comp[v] < 0:
                    comp[v] = len(out)
                    members.append(int(v))
                    queue.append(v)
        out.append(sorted(members))
    return out


def _path_to_root(parent: np.ndarray, u: int) -> list[int]:
    path = [u]
    while parent[path[-1]] >= 0:
        path.append(int(parent[path[-1]]))
    return path


def _bfs_balance(A: np.ndarray, root: int, label: np.ndarray):
    """Two-colour the component of ``root`` in place; return a witness or None."""
    parent_arr = -np.ones(A.shape[0], dtype=np.int64)
    label[root] = 1
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(A[u]):
            v = int(v)
            want = label[u] * A[u, v]
            if label[v] == 0:
                label[v] = want
                parent_arr[v] = u
                queue.append(v)
            elif label[v] != want:
                pu = _path_to_root(parent_arr, u)
                pv = _path_to_root(parent_arr, v)
                on_pv = set(pv)
                lca = next(x for x in pu if x in on_pv)
                up = pu[: pu.index(lca) + 1]
                down = pv[: pv.index(lca)]
                return tuple(up + down[::-1])
    return None


def detect_balance(g: SignedGraph, per_component: bool = False) -> BalanceResult:
    """Breadth-first sign-consistent two-colouring.

    Crossing a positive edge keeps the label, a negative edge flips it.
    The first edge found inconsistent closes a fundamental cycle of the BFS
    tree; that cycle is returned as the witness (sign product -1).
    Each component is rooted at its smallest index, which gets label +1.
    """
    if not g.connected and not per_component:
        raise DisconnectedGraphError(
            "balance detection needs a connected graph; pass per_component=True to analyse components"
        )
    A = g.adjacency
    label = np.zeros(g.n, dtype=np.int64)
    for comp in connected_components(g):
        witness = _bfs_balance(A, comp[0], label)
        if witness is not None:
            return BalanceResult(False, None, witness)
    return BalanceResult(True, SwitchingVector(label), None)


def cycle_sign(g: SignedGraph, cycle: Sequence[int]) -> int:
    """Product of edge signs around a closed node sequence (last links to first)."""
    s = 1
    for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
        w = g.adjacency[a, b]
        if w == 0:
            raise ValueError(f"nodes {a} and {b} are not adjacent")
        s *= int(w)
    return s


# --------------------------------------------------------------------------
# Generators
# --------------------------------------------------------------------------


def _numbered(n: int) -> tuple[str, ...]:
    return tuple(str(k) for k in range(1, n + 1))


def gen_balanced_complete(n: int, split: int) -> SignedGraph:
    """Complete graph, nodes ``1..split`` against ``split+1..n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= split <= n / 2:
        raise ValueError("split must satisfy 0 <= split <= n/2")
    ind = np.ones(n, dtype=np.int64)
    ind[:split] = -1
    A = np.outer(ind, ind)
    np.fill_diagonal(A, 0)
    return SignedGraph(_numbered(n), A)


def gen_pentagon() -> SignedGraph:
    """5-cycle 1-2-3-4-5-1 whose only negative edge is 1-2."""
    return from_edges(
        [(1, 2, -1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 1, 1)], labels=_numbered(5)
    )


def gen_clique_ring(k: int, r: int) -> SignedGraph:
    """``k`` positive cliques of size ``r`` arranged in a ring.

    Consecutive cliques are joined by one positive edge (last node to first
    node) and one negative edge (second-to-last node to second node).
    """
    if k < 3 or r < 3:
        raise ValueError("clique ring needs k >= 3 and r >= 3")
    n = k * r
    A = np.zeros((n, n), dtype=np.int64)
    for c in range(k):
        block = slice(c * r, (c + 1) * r)
        A[block, block] = 1
    np.fill_diagonal(A, 0)
    for c in range(k):
        nxt = (c + 1) % k
        a, b = c * r + r - 1, nxt * r
        A[a, b] = A[b, a] = 1
        a, b = c * r + r - 2, nxt * r + 1
        A[a, b] = A[b, a] = -1
    return SignedGraph(_numbered(n), A)


def gen_pendant_clique(q: int) -> SignedGraph:
    """Positive ``K_q`` on ``1..q`` plus node ``q+1`` tied to ``q`` by a negative edge."""
    if q < 3:
        raise ValueError("q must be at least 3")
    A = np.zeros((q + 1, q + 1), dtype=np.int64)
    A[:q, :q] = 1
    np.fill_diagonal(A, 0)
    A[q - 1, q] = A[q, q - 1] = -1
    return SignedGraph(_numbered(q + 1), A)


def gen_clique_tail(q: int) -> SignedGraph:
    """Positive ``K_q``, node ``q+1`` attached positively to ``q``, node ``q+2``
    attached negatively to ``q+1``.

    Balanced with factions ``{1..q+1}`` and ``{q+2}``. The two tail nodes
    have small self-communicability, which pulls them together under the
    communicability distance.
    """
    if q < 3:
        raise ValueError("q must be at least 3")
    n = q + 2
    A = np.zeros((n, n), dtype=np.int64)
    A[:q, :q] = 1
    np.fill_diagonal(A, 0)
    A[q - 1, q] = A[q, q - 1] = 1
    A[q, q + 1] = A[q + 1, q] = -1
    return SignedGraph(_numbered(n), A)


def gen_triangle(negative: int) -> SignedGraph:
    """Triangle 1-2-3 with the first ``negative`` edges of (1-2, 1-3, 2-3) negative.

    ``negative=2`` leaves node 1 alone in its faction.
    """
    if negative not in (0, 1, 2, 3):
        raise ValueError("negative must be 0, 1, 2 or 3")
    pairs = [(1, 2), (1, 3), (2, 3)]
    return from_edges(
        [(u, v, -1 if k < negative else 1) for k, (u, v) in enumerate(pairs)], labels=_numbered(3)
    )


# Seven-node illustration of a balanced graph with factions {1,3,5} and
# {2,4,6,7}; the unbalanced variant flips edge 1-2 to positive.
_FIGURE1_EDGES = [
    (1, 2, -1), (1, 3, 1), (1, 4, -1), (2, 4, 1), (2, 6, 1),
    (3, 5, 1), (3, 7, -1), (4, 7, 1), (5, 6, -1), (6, 7, 1),
]


def gen_figure1(balanced: bool = True) -> SignedGraph:
    edges = list(_FIGURE1_EDGES)
    if not balanced:
        edges[0] = (1, 2, 1)
    return from_edges(edges, labels=_numbered(7))


def gen_random_balanced(n: int, p: float, split_fraction: float, seed: int) -> SignedGraph:
    """Connected G(n, p) graph signed according to a random bipartition.

    Each node joins the second faction with probability ``split_fraction``.
    The underlying graph is resampled until connected.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    if not 0 <= split_fraction <= 1:
        raise ValueError("split_fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    while True:
        U = np.zeros((n, n), dtype=np.int64)
        U[iu] = rng.random(len(iu[0])) < p
        U = U + U.T
        if _is_connected(U):
            break
    ind = np.where(rng.random(n) < split_fraction, -1, 1)
    return SignedGraph(_numbered(n), U * np.outer(ind, ind))


def gen_random_signed(n: int, p: float, p_negative: float, seed: int) -> SignedGraph:
    """Connected G(n, p) graph with independently negative edges."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    while True:
        U = np.zeros((n, n), dtype=np.int64)
        U[iu] = rng.random(len(iu[0])) < p
        U = U + U.T
        if _is_connected(U):
            break
    S = np.where(rng.random((n, n)) < p_negative, -1, 1)
    S = np.triu(S, 1)
    S = S + S.T
    return SignedGraph(_numbered(n), U * S)
