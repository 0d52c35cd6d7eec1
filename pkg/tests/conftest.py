import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from sgc.graph import SignedGraph


def simple_cycles(A):
    """All simple cycles (length >= 3) of an undirected graph, each once."""
    n = A.shape[0]
    out = []

    def extend(path, visited):
        u = path[-1]
        for v in np.flatnonzero(A[u]):
            v = int(v)
            if v == path[0] and len(path) >= 3 and path[1] < path[-1]:
                out.append(list(path))
            elif v > path[0] and v not in visited:
                visited.add(v)
                path.append(v)
                extend(path, visited)
                path.pop()
                visited.discard(v)

    for s in range(n):
        extend([s], {s})
    return out


def balanced_by_cycles(g):
    """Independent balance check: every simple cycle has positive sign."""
    A = g.adjacency
    for cyc in simple_cycles(np.abs(A)):
        prod = 1
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            prod *= A[a, b]
        if prod < 0:
            return False
    return True


def random_signed_graph(rng, n, p=0.5, p_neg=0.3, connected=True):
    while True:
        U = np.triu((rng.random((n, n)) < p).astype(int), 1)
        S = np.where(rng.random((n, n)) < p_neg, -1, 1)
        A = U * S
        A = A + A.T
        g = SignedGraph(tuple(str(i + 1) for i in range(n)), A)
        if g.connected or not connected:
            return g


@st.composite
def signed_graphs(draw, min_n=2, max_n=8, connected=True):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    signs = draw(st.lists(st.sampled_from([-1, 0, 1]), min_size=len(pairs), max_size=len(pairs)))
    A = np.zeros((n, n), dtype=int)
    for (i, j), s in zip(pairs, signs):
        A[i, j] = A[j, i] = s
    if connected:
        # chain backbone keeps the underlying graph connected
        for i in range(n - 1):
            if A[i, i + 1] == 0:
                A[i, i + 1] = A[i + 1, i] = 1
    return SignedGraph(tuple(str(i + 1) for i in range(n)), A)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria report: one line per criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
