import json

import pytest
from hypothesis import given

from conftest import graph_with_decomposition
from tmwqo import oracles
from tmwqo.graph import make_graph
from tmwqo.treedecomp import (DecompositionError, RootedDecomposition, coherent_for, decomposition_from_obj,
                              greedy_decomposition, is_precursor, make_decomposition, metrics,
                              path_decomposition, separation_given_by, serialize_decomposition,
                              trivial_decomposition, up_down, validate)


def triangle():
    return make_graph("abc", [("a", "b"), ("b", "c"), ("c", "a")])


class TestValidate:
    def test_single_bag(self):
        assert validate(trivial_decomposition(triangle())) is None

    def test_path(self, path3):
        assert validate(path_decomposition(path3, ["ab", "bc"])) is None

    def test_uncovered_edge(self, path3):
        v = validate(path_decomposition(path3, ["ab", "c"]))
        assert v.axiom == "edge" and "b-c" in v.witness

    def test_disconnected_vertex(self, path3):
        v = validate(path_decomposition(path3, ["ab", "bc", "a"]))
        assert v.axiom == "connected"

    def test_missing_vertex(self, path3):
        assert validate(path_decomposition(path3, ["ab"])).axiom == "cover"

    def test_two_parents(self, path3):
        with pytest.raises(DecompositionError):
            make_decomposition(path3, "r", [("r", "x"), ("y", "x")], {"r": "abc", "x": "a", "y": "b"})


class TestMetrics:
    def test_one_bag(self):
        assert metrics(trivial_decomposition(triangle())) == {"width": 2, "adhesion": 0, "nested_edges": True}

    def test_path(self, path3):
        assert metrics(path_decomposition(path3, ["ab", "bc"])) == {"width": 1, "adhesion": 1, "nested_edges": False}

    def test_nested(self):
        g = make_graph("ab", [("a", "b")])
        assert metrics(path_decomposition(g, ["ab", "b"]))["nested_edges"]


class TestUpDown:
    def test_root(self, path3):
        d = path_decomposition(path3, ["ab", "bc"])
        assert up_down(d, "t00") == {"up": path3.vset, "down": frozenset("ab")}
        s = separation_given_by(d, "t00")
        assert (s.A, s.B) == (frozenset("ab"), path3.vset)

    def test_leaf(self, path3):
        d = path_decomposition(path3, ["ab", "bc"])
        assert up_down(d, "t01") == {"up": frozenset("bc"), "down": frozenset("abc")}
        s = separation_given_by(d, "t01")
        assert (s.A, s.B) == (frozenset("abc"), frozenset("bc"))

    def test_child_of_two_node_path(self, path3):
        d = path_decomposition(path3, ["bc", "ab"])
        assert up_down(d, "t01") == {"up": frozenset("ab"), "down": frozenset("abc")}
        d = path_decomposition(path3, ["abc", "bc"])
        s = separation_given_by(d, "t01")
        assert s.A == path3.vset and s.B == frozenset("bc")

    def test_leaf_with_everything(self, path3):
        d = path_decomposition(path3, ["ab", "abc"])
        s = separation_given_by(d, "t01")
        assert s.A == s.B == path3.vset


class TestPrecursor:
    def test_same_node(self, path3):
        d = path_decomposition(path3, ["ab", "bc"])
        assert not is_precursor(d, "t00", "t00")

    def test_equal_chain(self):
        g = make_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
        d = path_decomposition(g, ["ab", "bc", "cd"])
        assert is_precursor(d, "t00", "t01") and is_precursor(d, "t00", "t02")
        assert not is_precursor(d, "t02", "t00")

    def test_smaller_bag_between(self):
        g = make_graph("abcd", [("a", "b"), ("c", "d")])
        d = path_decomposition(g, ["ab", "b", "bc", "cd"])
        assert not is_precursor(d, "t00", "t02")
        assert is_precursor(d, "t02", "t03")


class TestCoherent:
    def test_no_edges(self):
        g = make_graph("v", [])
        d = path_decomposition(g, ["v", "v"])
        assert coherent_for(d, "v", "t00", "t01")

    def test_escape_clauses(self):
        # v has two edges into each side at both nodes
        g = make_graph(["v", "a", "b"], [("v", "a"), ("v", "a"), ("v", "b"), ("v", "b")])
        d = path_decomposition(g, ["va", "v", "v", "vb"])
        assert coherent_for(d, "v", "t01", "t02")

    def test_down_count_changes(self):
        g = make_graph("vw", [("v", "w")])
        d = path_decomposition(g, ["v", "vw", "v"])
        assert not coherent_for(d, "v", "t00", "t02")

    def test_requires_ancestor(self, path3):
        d = path_decomposition(path3, ["ab", "bc"])
        with pytest.raises(DecompositionError):
            coherent_for(d, "b", "t01", "t00")


@given(graph_with_decomposition())
def test_random_decompositions_validate(gd):
    g, d = gd
    assert validate(d) is None
    assert oracles.decomposition_is_valid(g, dict(d.parent), dict(d.bags))


@given(graph_with_decomposition())
def test_broken_bag_detected_by_both(gd):
    g, d = gd
    t = d.nodes[0]
    if not d.bags[t]:
        return
    v = sorted(d.bags[t])[0]
    bags = dict(d.bags)
    bags[t] = bags[t] - {v}
    broken = RootedDecomposition(g, d.root, d.parent, bags)
    assert (validate(broken) is None) == oracles.decomposition_is_valid(g, dict(d.parent), bags)


@given(graph_with_decomposition())
def test_up_down_invariants(gd):
    g, d = gd
    for t in d.nodes:
        s = separation_given_by(d, t)
        assert s.A & s.B == d.bags[t]
        assert oracles.is_separation(g, s.A, s.B)


@given(graph_with_decomposition())
def test_decomposition_round_trip(gd):
    g, d = gd
    text = serialize_decomposition(d)
    d2 = decomposition_from_obj(g, json.loads(text))
    assert d2 == d and serialize_decomposition(d2) == text


def test_greedy_on_empty_graph():
    d = greedy_decomposition(make_graph([], []))
    assert validate(d) is None
