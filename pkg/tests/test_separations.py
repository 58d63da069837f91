import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import multigraphs
from tmwqo import _kernels, oracles
from tmwqo.graph import make_graph
from tmwqo.separations import (SeparationError, SeparationTable, _masks, breadth_of,
                               enumerate_separations, is_pseudo_edge_cut, make_separation,
                               reflection, separation_predicates, to_mask)


def k4():
    vs = ["1", "2", "3", "4"]
    return make_graph(vs, [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]])


class TestBreadth:
    def test_path(self, path3):
        s = make_separation(path3, "ab", "bc")
        b = breadth_of(s)
        assert b.key() == (1, 0)
        assert b.flags["b"] == {"pointed": True, "anti_pointed": True, "doubly_pointed": True}

    def test_star(self):
        g = make_graph(["c", "l1", "l2", "l3"], [("c", "l1"), ("c", "l2"), ("c", "l3")])
        b = breadth_of(make_separation(g, {"c", "l1"}, {"c", "l2", "l3"}))
        assert b.flags["c"]["pointed"] and not b.flags["c"]["anti_pointed"]

    def test_digon(self):
        g = make_graph("uv", [("u", "v"), ("u", "v")])
        assert breadth_of(make_separation(g, "uv", "uv")).key() == (2, 0)

    def test_thick_vertex(self):
        g = make_graph("ab", [("a", "b"), ("a", "b")])
        assert breadth_of(make_separation(g, "ab", "a")).key() == (1, 1)

    def test_crossing_edge_rejected(self, path3):
        with pytest.raises(SeparationError):
            make_separation(path3, "a", "bc")


class TestPseudoEdgeCut:
    def test_z_covers_boundary(self):
        g = make_graph("ab", [("a", "b")] * 3)
        assert is_pseudo_edge_cut(make_separation(g, "ab", "a"), {"a"})

    def test_path(self, path3):
        assert is_pseudo_edge_cut(make_separation(path3, "ab", "bc"), set())

    def test_k4_pair_is_not_a_separation(self):
        with pytest.raises(SeparationError):
            make_separation(k4(), {"1", "2", "3"}, {"2", "3", "4"})

    def test_k4_minus_edge(self):
        g = make_graph(["1", "2", "3", "4"], [("1", "2"), ("1", "3"), ("2", "3"), ("2", "4"), ("3", "4")])
        s = make_separation(g, {"1", "2", "3"}, {"2", "3", "4"})
        assert is_pseudo_edge_cut(s, set())
        assert is_pseudo_edge_cut(s, set()) == all(
            oracles._side_edges(g, v, {"1"}) <= 1 for v in ("2", "3"))


class TestPredicates:
    def test_path_all_true(self, path3):
        s = make_separation(path3, "ab", "bc")
        assert separation_predicates(s, {"a"}, {"c"}) == {
            "separates": True, "weakly_separates": True, "strongly_separates": True}

    def test_boundary_sets(self, path3):
        s = make_separation(path3, "ab", "bc")
        p = separation_predicates(s, {"b"}, {"b"})
        assert not p["separates"] and p["weakly_separates"]

    def test_not_in_a(self, path3):
        s = make_separation(path3, "ab", "bc")
        assert not separation_predicates(s, {"c"}, {"c"})["strongly_separates"]


class TestReflection:
    def test_path(self):
        g = make_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
        s1 = reflection(make_separation(g, "ab", "bcd"), set(), set())
        assert (s1.A, s1.B) == (frozenset("a"), frozenset("abcd"))
        assert breadth_of(s1).flags["a"]["anti_pointed"]

    def test_nothing_removed(self, path3):
        s2 = make_separation(path3, "ab", "bc")
        assert reflection(s2, set(), {"b"}) == s2

    def test_digon_boundary_in_z(self):
        g = make_graph("uv", [("u", "v"), ("u", "v")])
        s2 = make_separation(g, "uv", "uv")
        assert reflection(s2, {"u", "v"}, set()) == s2


@given(multigraphs(max_vertices=6))
def test_enumeration_matches_brute_force(g):
    lib = {(s.A, s.B) for s in enumerate_separations(g)}
    ref = {(frozenset(A), frozenset(B)) for A, B in oracles.all_separations(g)}
    assert lib == ref


@given(multigraphs(max_vertices=6))
def test_table_breadth_matches_brute_force(g):
    t = SeparationTable(g)
    for i in range(len(t)):
        s = t.separation(i)
        assert (int(t.order[i]), int(t.thickness[i])) == oracles.breadth(g, s.A, s.B)
        assert breadth_of(s).key() == oracles.breadth(g, s.A, s.B)


@given(multigraphs(max_vertices=7), st.data())
def test_kernel_backends_agree(g, data):
    adj, mult = _masks(g)
    n = g.n
    must_a = to_mask(g, data.draw(st.sets(st.sampled_from(g.vertices))) if n else ())
    mo = data.draw(st.integers(0, n))
    A1, B1 = _kernels._enum_numpy(adj, n, must_a, 0, mo)
    A2, B2 = _kernels.enumerate_separation_masks(adj, n, must_a, 0, mo)
    assert np.array_equal(A1, A2) and np.array_equal(B1, B2)
    c1 = _kernels._counts_numpy(A1, B1, mult, n)
    c2 = _kernels.side_edge_counts(A1, B1, mult, n)
    assert all(np.array_equal(x, y) for x, y in zip(c1, c2))
