import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgc.communicability import eig_sym
from sgc.exceptions import DisconnectedGraphError, GraphFormatError
from sgc.graph import (
    SignedGraph,
    SwitchingVector,
    cycle_sign,
    detect_balance,
    dump_edge_list,
    from_edges,
    gen_balanced_complete,
    gen_clique_ring,
    gen_clique_tail,
    gen_figure1,
    gen_pendant_clique,
    gen_pentagon,
    gen_random_balanced,
    gen_triangle,
    load_edge_list,
    switch,
    underlying,
)

from conftest import balanced_by_cycles, signed_graphs

FIGURE1_TSV = """\
# balanced seven-node example
1\t2\t-1
1\t3\t+1
1\t4\t-1
2\t4\t+1
2\t6\t+1
3\t5\t+1
3\t7\t-1
4\t7\t+1
5\t6\t-1
6\t7\t+1
"""


class TestLoadEdgeList:
    def test_path_graph(self):
        g = load_edge_list("a b +1\nb c -1")
        assert g.labels == ("a", "b", "c")
        assert g.n == 3 and g.edge_count == 2
        assert g.adjacency[0, 1] == 1 and g.adjacency[1, 2] == -1
        assert g.adjacency[0, 2] == 0

    def test_conflicting_duplicate(self):
        with pytest.raises(GraphFormatError, match="conflicting"):
            load_edge_list("a b +1\na b -1")

    def test_identical_duplicate_is_idempotent(self):
        g = load_edge_list("a,b,+\nb,a,+1\n")
        assert g.edge_count == 1

    @pytest.mark.parametrize(
        "text, msg",
        [
            ("a\tb\t2\n", "line 1: invalid sign"),
            ("# c\na\ta\t+1\n", "line 2: self-loop"),
            ("a\tb\n", "line 1: expected 3 fields"),
            ("", "empty"),
            ("# only a comment\n\n", "empty"),
        ],
    )
    def test_errors(self, text, msg):
        with pytest.raises(GraphFormatError, match=msg):
            load_edge_list(text)

    def test_figure1_file_is_balanced(self):
        g = load_edge_list(FIGURE1_TSV)
        assert g.edge_count == 10
        assert balanced_by_cycles(g)
        assert detect_balance(g).balanced
        ref = gen_figure1()
        as_labels = lambda h: {(frozenset((h.labels[i], h.labels[j])), s) for i, j, s in h.edges()}
        assert as_labels(g) == as_labels(ref)

    def test_disconnected_flag(self):
        g = load_edge_list("a\tb\t+1\nc\td\t-1\n")
        assert not g.connected
        with pytest.raises(DisconnectedGraphError):
            detect_balance(g)
        res = detect_balance(g, per_component=True)
        assert res.balanced
        assert list(res.indicator.signs) == [1, 1, 1, -1]

    def test_round_trip(self):
        g = gen_clique_ring(3, 4)
        assert load_edge_list(dump_edge_list(g)) == g

    def test_writer_format(self):
        text = dump_edge_list(load_edge_list("x,y,-\n"))
        assert text == "x\ty\t-1\n"


class TestUnderlyingAndSwitch:
    def test_underlying(self):
        k2 = from_edges([("a", "b", -1)])
        assert underlying(k2).adjacency[0, 1] == 1
        pos = gen_balanced_complete(5, 0)
        assert underlying(pos) == pos
        c5 = underlying(gen_pentagon())
        assert c5.negative_edge_count == 0 and c5.edge_count == 5

    def test_identity_switch(self):
        g = gen_pentagon()
        assert switch(g, np.ones(5, dtype=int)) == g

    def test_figure1_switching(self):
        bal = detect_balance(gen_figure1())
        switched = switch(gen_figure1(), bal.indicator)
        assert switched.negative_edge_count == 0
        unb = switch(gen_figure1(balanced=False), bal.indicator)
        assert unb.negative_edge_count >= 1
        assert unb.adjacency[0, 1] == -1

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            switch(gen_pentagon(), [1, 1, 1])

    def test_bad_switching_vector(self):
        with pytest.raises(ValueError):
            SwitchingVector([1, 0, -1])

    @settings(max_examples=60, deadline=None)
    @given(signed_graphs(max_n=8), st.data())
    def test_switch_is_involution(self, g, data):
        d = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=g.n, max_size=g.n))
        assert switch(switch(g, d), d) == g


class TestDetectBalance:
    def test_triangles(self):
        two = detect_balance(gen_triangle(2))
        assert two.balanced
        sizes = sorted(len(f) for f in two.factions())
        assert sizes == [1, 2]
        one = detect_balance(gen_triangle(1))
        assert not one.balanced
        assert sorted(one.witness) == [0, 1, 2]
        assert cycle_sign(gen_triangle(1), one.witness) == -1

    def test_pentagon_unbalanced(self):
        res = detect_balance(gen_pentagon())
        assert not res.balanced
        assert cycle_sign(gen_pentagon(), res.witness) == -1

    def test_witness_is_deterministic(self):
        g = gen_clique_ring(4, 3)
        assert detect_balance(g).witness == detect_balance(g).witness

    @settings(max_examples=200, deadline=None)
    @given(signed_graphs(max_n=8))
    def test_agrees_with_cycle_enumeration(self, g):
        res = detect_balance(g)
        assert res.balanced == balanced_by_cycles(g)
        if res.balanced:
            assert switch(g, res.indicator) == underlying(g)
        else:
            assert cycle_sign(g, res.witness) == -1
            assert switch(g, np.ones(g.n, dtype=int)).negative_edge_count > 0


class TestGenerators:
    def test_balanced_complete(self):
        g = gen_balanced_complete(6, 0)
        assert g.negative_edge_count == 0 and g.edge_count == 15
        g3 = gen_balanced_complete(6, 3)
        assert g3.negative_edge_count == 9
        assert detect_balance(g3).balanced

    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
    def test_balanced_complete_isospectral(self, n):
        spectra = [eig_sym(gen_balanced_complete(n, s).adjacency).eigenvalues for s in range(n // 2 + 1)]
        for sp in spectra[1:]:
            np.testing.assert_allclose(sp, spectra[0], atol=1e-9)

    def test_balanced_complete_errors(self):
        with pytest.raises(ValueError):
            gen_balanced_complete(0, 0)
        with pytest.raises(ValueError):
            gen_balanced_complete(6, 4)

    def test_pentagon(self):
        g = gen_pentagon()
        assert (g.n, g.edge_count, g.negative_edge_count) == (5, 5, 1)
        phi = (1 + 5 ** 0.5) / 2
        np.testing.assert_allclose(
            eig_sym(g.adjacency).eigenvalues, [phi, phi, 1 - phi, 1 - phi, -2], atol=1e-9
        )

    @pytest.mark.parametrize("k, r, n, m", [(3, 3, 9, 15), (8, 5, 40, 96)])
    def test_clique_ring_counts(self, k, r, n, m):
        g = gen_clique_ring(k, r)
        assert (g.n, g.edge_count) == (n, m)
        assert g.negative_edge_count == k
        assert g.connected

    @pytest.mark.parametrize("k, r", [(3, 3), (4, 3), (3, 4)])
    def test_clique_ring_unbalanced(self, k, r):
        g = gen_clique_ring(k, r)
        assert not balanced_by_cycles(g)
        assert not detect_balance(g).balanced

    @pytest.mark.parametrize("k, r", [(2, 3), (3, 2)])
    def test_clique_ring_range(self, k, r):
        with pytest.raises(ValueError):
            gen_clique_ring(k, r)

    def test_pendant_clique(self):
        g = gen_pendant_clique(9)
        assert (g.n, g.edge_count) == (10, 37)
        res = detect_balance(g)
        assert res.balanced
        plus, minus = res.factions()
        assert minus == [9] and plus == list(range(9))
        small = gen_pendant_clique(3)
        assert small.n == 4
        assert sorted(len(f) for f in detect_balance(small).factions()) == [1, 3]

    def test_clique_tail(self):
        g = gen_clique_tail(8)
        assert (g.n, g.edge_count) == (10, 30)
        plus, minus = detect_balance(g).factions()
        assert minus == [9]

    def test_random_balanced(self):
        g = gen_random_balanced(20, 0.3, 0.5, 42)
        assert g.connected and detect_balance(g).balanced
        assert gen_random_balanced(20, 0.3, 0.0, 7).negative_edge_count == 0
        assert gen_random_balanced(20, 0.3, 0.5, 42) == g

    def test_random_balanced_errors(self):
        with pytest.raises(ValueError):
            gen_random_balanced(1, 0.5, 0.5, 0)
        with pytest.raises(ValueError):
            gen_random_balanced(5, 0.0, 0.5, 0)


def test_signed_graph_validation():
    with pytest.raises(ValueError, match="symmetric"):
        SignedGraph(("a", "b"), np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError, match="unique"):
        SignedGraph(("a", "a"), np.zeros((2, 2), dtype=int))
    with pytest.raises(ValueError, match="self-loops"):
        SignedGraph(("a",), np.array([[1]]))
    g = gen_pentagon()
    with pytest.raises(ValueError):
        g.adjacency[0, 1] = 1
