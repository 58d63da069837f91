from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tmwqo import oracles
from tmwqo.generators import progress_instance, rng_for
from tmwqo.graph import make_graph
from tmwqo.separations import Separation, is_pseudo_edge_cut
from tmwqo.strips import (Strip, StripError, alpha_breaks, break_strip, classify_static,
                          depth_and_elevation, find_jumps, find_strips, foundation_paths,
                          progress_shift, qlr_graphs, side_progress, strip_violation)
from tmwqo.treedecomp import path_decomposition, trivial_decomposition


def path_graph(n):
    vs = [f"p{i}" for i in range(n)]
    return make_graph(vs, [(vs[i], vs[i + 1]) for i in range(n - 1)])


def pendant_digon():
    """u with a doubled edge to a; the child bag {u} is not a pseudo-edge-cut."""
    g = make_graph(["a", "u"], [("a", "u"), ("a", "u")])
    return path_decomposition(g, [["a", "u"], ["u"]])


def two_lane():
    """Two lanes a0-a1 and b0-b1 with a chord a1-b0 and a four-node path decomposition."""
    g = make_graph(["a0", "a1", "b0", "b1"], [("a0", "a1"), ("b0", "b1"), ("a1", "b0")])
    return path_decomposition(g, [["a0", "b0"], ["a0", "a1", "b0"], ["a1", "b0", "b1"], ["a1", "b1"]])


class TestFindStrips:
    def test_single_bag(self):
        g = make_graph("abc", [("a", "b"), ("b", "c"), ("a", "b")])
        d = trivial_decomposition(g)
        assert all(find_strips(d, Z, s) == [] for Z in ([], ["a"]) for s in (1, 2, 3))

    def test_path_decomposition_of_path(self):
        g = path_graph(6)
        d = path_decomposition(g, [[f"p{i}", f"p{i + 1}"] for i in range(5)])
        assert find_strips(d, [], 2) == []
        assert depth_and_elevation(d)["elevation"] == 0

    def test_z_outside_bags(self):
        d = pendant_digon()
        assert find_strips(d, ["a"], 1) == []

    def test_length_one_strip(self):
        d = pendant_digon()
        strips = find_strips(d, [], 1)
        assert [s.nodes for s in strips] == [("t01",)]
        assert strip_violation(d, strips[0]) is None
        assert depth_and_elevation(d)["elevation"] == 1

    def test_single_bag_elevation(self):
        assert depth_and_elevation(trivial_decomposition(path_graph(3)))["elevation"] == 0


def breaks_by_index_scan(d, sep, strip, alpha):
    ns = strip.nodes
    for idx in combinations(range(len(ns)), 2 * alpha):
        if d.down(ns[idx[alpha - 1]]) <= sep.A and d.up(ns[idx[alpha]]) <= sep.B:
            return True
    return False


class TestAlphaBreaks:
    def test_too_short(self):
        d = pendant_digon()
        strip = Strip(("t01",), frozenset(), 1)
        full = Separation(d.host.vset, d.host.vset, d.host)
        assert not alpha_breaks(full, strip, 1, d)

    def test_full_sets(self):
        g = path_graph(4)
        d = path_decomposition(g, [["p0"], ["p0", "p1"], ["p1"], ["p1", "p2"], ["p2"], ["p2", "p3"], ["p3"]])
        strip = Strip(("t00", "t02", "t04", "t06"), frozenset(), 1)
        full = Separation(g.vset, g.vset, g)
        assert alpha_breaks(full, strip, 2, d)
        assert not alpha_breaks(full, strip, 3, d)

    def test_middle_cut(self):
        g = path_graph(4)
        d = path_decomposition(g, [["p0"], ["p0", "p1"], ["p1"], ["p1", "p2"], ["p2"], ["p2", "p3"], ["p3"]])
        strip = Strip(("t00", "t02", "t04", "t06"), frozenset(), 1)
        for A in ({"p0"}, {"p0", "p1"}, {"p0", "p1", "p2"}):
            B = g.vset - A | {max(A)}
            cut = Separation(frozenset(A), frozenset(B), g)
            for alpha in (1, 2):
                assert alpha_breaks(cut, strip, alpha, d) == breaks_by_index_scan(d, cut, strip, alpha)
        cut = Separation(frozenset({"p0"}), g.vset, g)
        assert alpha_breaks(cut, strip, 1, d) and not alpha_breaks(cut, strip, 2, d)

    def test_break_strip_short(self):
        d = pendant_digon()
        assert break_strip(d, Strip(("t01",), frozenset(), 1), 1) is None


class TestFoundationAndSides:
    def test_equal_bags(self):
        g = make_graph("ab", [("a", "b")])
        d = path_decomposition(g, ["ab", "ab"])
        ps = foundation_paths(d, "t00", "t01")
        assert sorted(ps.paths) == [("a",), ("b",)]

    def test_ladder(self):
        d = two_lane()
        assert len(foundation_paths(d, "t00", "t03")) == 2

    def test_bottleneck(self):
        g = make_graph(["a", "b", "c", "x", "y"], [("a", "c"), ("b", "c"), ("c", "x"), ("c", "y")])
        d = path_decomposition(g, [["a", "b"], ["a", "b", "c"], ["c", "x", "y"], ["x", "y"]])
        assert foundation_paths(d, "t00", "t03") is None

    def test_not_precursor(self):
        d = pendant_digon()
        with pytest.raises(StripError):
            foundation_paths(d, "t01", "t00")

    def test_bridge_member(self):
        g = path_graph(3)
        sg = qlr_graphs(g, [("p0", "p1")], 0)
        assert (sg.L, sg.R) == (frozenset({"p0"}), frozenset({"p1"}))

    def test_two_connected(self):
        g = make_graph("abc", [("a", "b"), ("b", "c"), ("c", "a")])
        sg = qlr_graphs(g, [("a", "b")], 0)
        assert sg.L == sg.R == sg.Q.vset == frozenset("abc")

    def test_theta(self):
        # blocks: the digon a=b, the bridge b-c and the triangle c,d,e
        g = make_graph("abcde", [("a", "b"), ("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "c")])
        sg = qlr_graphs(g, [("a", "b", "c", "d")], 0)
        assert sg.Q.vset == frozenset("abcde")
        assert sg.L == frozenset("ab") and sg.R == frozenset("cde")


class TestJumps:
    def test_no_extra_edges(self):
        g = make_graph(["a0", "a1", "b0", "b1"], [("a0", "a1"), ("b0", "b1")])
        d = path_decomposition(g, [["a0", "b0"], ["a0", "a1", "b0"], ["a1", "b0", "b1"], ["a1", "b1"]])
        ps = [("a0", "a1"), ("b0", "b1")]
        assert all(find_jumps(d, "t00", "t03", ps, P, side) == []
                   for P in (0, 1) for side in ("parent", "child"))

    def test_chord(self):
        d = two_lane()
        ps = [("a0", "a1"), ("b0", "b1")]
        jumps = find_jumps(d, "t00", "t03", ps, 0, "parent")
        assert [(j.path, j.ambiguous) for j in jumps] == [(("a1", "b0"), False)]

    def test_ambiguous_chord(self):
        g = make_graph(["a0", "a1", "b0", "b1"], [("a0", "a1"), ("b0", "b1"), ("a1", "b1")])
        d = path_decomposition(g, [["a0", "b0"], ["a0", "a1", "b0"], ["a1", "b0", "b1"], ["a1", "b1"]])
        jumps = find_jumps(d, "t00", "t03", [("a0", "a1"), ("b0", "b1")], 0, "parent")
        assert [j.ambiguous for j in jumps] == [True]
        flags = classify_static(d, "t00", "t03", [("a0", "a1"), ("b0", "b1")])
        assert not flags[0]["parent_side_static"] and flags[0]["child_side_static"]


class TestStatic:
    def test_parallel_pair(self):
        g = make_graph("xy", [("x", "y"), ("x", "y")])
        d = path_decomposition(g, [["x"], ["x", "y"], ["y"]])
        f, = classify_static(d, "t00", "t02", [("x", "y")])
        assert not f["parent_side_static"] and not f["child_side_static"]

    def test_simple_corridor(self):
        g = path_graph(2)
        d = path_decomposition(g, [["p0"], ["p0", "p1"], ["p1"]])
        f, = classify_static(d, "t00", "t02", [("p0", "p1")])
        assert f["parent_side_static"] and f["child_side_static"]

    def test_single_member_progress(self):
        g = make_graph(["h", "p0", "p1"], [("h", "p0"), ("p0", "p1")])
        d = path_decomposition(g, [["h", "p0"], ["p0"], ["p0", "p1"], ["p1"]])
        sep = side_progress(d, "t03", "t01", None, [("p0", "p1")], "parent")
        assert sep.A & sep.B and oracles.is_separation(g, sep.A, sep.B)

    def test_no_members(self):
        g = make_graph("xy", [("x", "y"), ("x", "y")])
        d = path_decomposition(g, [["x"], ["x", "y"], ["y"]])
        with pytest.raises(StripError):
            side_progress(d, "t02", "t00", None, [("x", "y")], "parent")


@given(st.integers(0, 10 ** 6))
def test_progress_shift_conclusion(seed):
    inst = progress_instance(rng_for(seed, "test-progress"))
    d = inst.decomposition
    sep = progress_shift(d, inst.t1, inst.t2, inst.t3, inst.paths, inst.r)
    g = d.host
    assert oracles.is_separation(g, sep.A, sep.B)
    assert len(sep.A & sep.B) == len(inst.paths)
    assert all(oracles._pointed(g, sep.A, sep.B, v) for v in sep.A & sep.B)
    assert is_pseudo_edge_cut(sep, ())
    assert d.down(inst.t1) <= sep.A and d.up(inst.t3) <= sep.B
