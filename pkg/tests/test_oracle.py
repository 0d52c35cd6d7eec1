import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from sgc.communicability import communicability_matrix
from sgc.graph import detect_balance, from_edges, gen_figure1, gen_pentagon, gen_triangle
from sgc.oracle import (
    count_signed_walks,
    frustration,
    integer_matrix_power,
    min_frustration_bipartitions,
    taylor_exp,
    walk_tally,
)

from conftest import random_signed_graph, signed_graphs


def p3():
    return from_edges([(1, 2, 1), (2, 3, -1)])


class TestWalks:
    def test_single_negative_walk(self):
        wc = count_signed_walks(p3(), "1", "3", 2)
        assert (wc.mu_plus, wc.mu_minus) == (0, 1)
        assert integer_matrix_power(p3().adjacency, 2)[0, 2] == -1

    def test_empty_walk(self):
        for i in range(3):
            wc = count_signed_walks(p3(), i, i, 0)
            assert (wc.mu_plus, wc.mu_minus) == (1, 0)
        assert count_signed_walks(p3(), 0, 1, 0).total == 0

    def test_negative_triangle_closed_walks(self):
        # 1-2-3-1 and 1-3-2-1 both cross the negative edge once
        wc = count_signed_walks(gen_triangle(1), 0, 0, 3)
        assert (wc.mu_plus, wc.mu_minus) == (0, 2)
        assert wc.difference == -2 == integer_matrix_power(gen_triangle(1).adjacency, 3)[0, 0]

    def test_gate(self):
        g = gen_figure1()
        with pytest.raises(ValueError, match="gate"):
            count_signed_walks(g, 0, 0, 9)

    @settings(max_examples=40, deadline=None)
    @given(signed_graphs(min_n=1, max_n=6, connected=False), st.integers(0, 5))
    def test_walk_count_identities(self, g, k):
        A = g.adjacency
        Ak = integer_matrix_power(A, k)
        Bk = integer_matrix_power(np.abs(A), k)
        for i in range(g.n):
            t = walk_tally(g, i, k)
            for j in range(g.n):
                assert t[k, j, 0] - t[k, j, 1] == Ak[i, j]
                assert t[k, j, 0] + t[k, j, 1] == Bk[i, j]


class TestTaylor:
    def test_zero(self):
        np.testing.assert_array_equal(taylor_exp(np.zeros((3, 3))), np.eye(3))

    def test_k2(self):
        c, s = math.cosh(1), math.sinh(1)
        np.testing.assert_allclose(taylor_exp([[0, 1], [1, 0]]), [[c, s], [s, c]], atol=1e-12)
        np.testing.assert_allclose(taylor_exp([[0, -1], [-1, 0]]), [[c, -s], [-s, c]], atol=1e-12)
        assert taylor_exp([[0, 1], [1, 0]])[0, 1] == pytest.approx(1.17520, abs=1e-5)

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            taylor_exp(np.eye(2), tol=0)

    def test_matches_scipy(self, rng):
        S = rng.normal(size=(6, 6))
        S = S + S.T
        np.testing.assert_allclose(taylor_exp(S, 1e-12), scipy.linalg.expm(S), rtol=1e-10)

    def test_agrees_with_spectral(self, rng):
        for _ in range(20):
            g = random_signed_graph(rng, int(rng.integers(2, 13)))
            T = taylor_exp(g.adjacency, 1e-12)
            assert np.max(np.abs(T - communicability_matrix(g))) < 1e-8


class TestFrustration:
    def test_balanced_zero(self):
        g = gen_figure1()
        res = min_frustration_bipartitions(g)
        assert res.min_frustration == 0
        ind = tuple(int(x) for x in detect_balance(g).indicator.signs)
        assert ind in res.minimizers

    def test_pentagon_five_minimizers(self):
        res = min_frustration_bipartitions(gen_pentagon())
        assert res.min_frustration == 1
        assert len(res.minimizers) == 5
        assert all(p[0] == 1 for p in res.minimizers)
        assert all(frustration(gen_pentagon(), p) == 1 for p in res.minimizers)

    def test_triangle(self):
        res = min_frustration_bipartitions(gen_triangle(1))
        assert res.min_frustration == 1
        # 4 canonical bipartitions of 3 nodes, enumerated by hand
        values = [frustration(gen_triangle(1), p) for p in [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)]]
        assert min(values) == 1
        assert len(res.minimizers) == values.count(1)

    def test_gate(self):
        from sgc.graph import gen_balanced_complete

        with pytest.raises(ValueError):
            min_frustration_bipartitions(gen_balanced_complete(21, 0))

    @settings(max_examples=60, deadline=None)
    @given(signed_graphs(max_n=8))
    def test_zero_iff_balanced(self, g):
        assert (min_frustration_bipartitions(g).min_frustration == 0) == detect_balance(g).balanced
