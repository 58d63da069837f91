import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import multigraphs
from tmwqo import oracles
from tmwqo.blocks import block_decomposition, blocks_of, path_of_blocks
from tmwqo.flows import max_disjoint_paths, min_separation, two_edge_disjoint_paths
from tmwqo.graph import GraphError, make_graph, parse_graph, serialize_graph


def two_triangles():
    return make_graph(["a", "b", "v", "c", "d"],
                      [("a", "b"), ("b", "v"), ("v", "a"), ("v", "c"), ("c", "d"), ("d", "v")])


def k4():
    vs = ["1", "2", "3", "4"]
    return make_graph(vs, [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]])


class TestParse:
    def test_digon(self):
        g = parse_graph('{"vertices":["a","b"],"edges":[["a","b"],["a","b"]]}')
        assert g.n == 2 and g.m == 2
        assert g.multiplicity("a", "b") == 2

    def test_loop(self):
        g = parse_graph('{"vertices":["a"],"edges":[["a","a"]]}')
        assert g.m == 1 and g.degree("a") == 2

    def test_empty(self):
        g = parse_graph('{"vertices":[],"edges":[]}')
        assert g.n == 0 and g.m == 0
        assert json.loads(serialize_graph(g)) == {"vertices": [], "edges": []}

    def test_digon_serializes_two_identical_pairs(self):
        g = make_graph("ab", [("a", "b"), ("b", "a")])
        edges = json.loads(serialize_graph(g))["edges"]
        assert len(edges) == 2 and edges[0] == edges[1]

    @pytest.mark.parametrize("text", [
        "not json",
        '{"vertices":["a"]}',
        '{"vertices":["a","a"],"edges":[]}',
        '{"vertices":["a"],"edges":[["a","b"]]}',
    ])
    def test_rejects_malformed(self, text):
        with pytest.raises(GraphError):
            parse_graph(text)


@given(multigraphs(loops=True))
def test_serialize_round_trip(g):
    text = serialize_graph(g)
    g2 = parse_graph(text)
    assert g2 == g
    assert serialize_graph(g2) == text


class TestBlocks:
    def test_path(self, path3):
        bt = block_decomposition(path3)
        assert sorted(sorted(b.vertices) for b in bt.blocks) == [["a", "b"], ["b", "c"]]
        assert bt.cut_vertices == {"b"}

    def test_triangle(self):
        g = make_graph("abc", [("a", "b"), ("b", "c"), ("c", "a")])
        bt = block_decomposition(g)
        assert len(bt.blocks) == 1 and not bt.cut_vertices

    def test_two_triangles(self):
        g = two_triangles()
        bt = block_decomposition(g)
        assert len(bt.blocks) == 2
        assert bt.cut_vertices == oracles.cut_vertices(g) == {"v"}

    def test_path_of_blocks_degenerate(self):
        g = two_triangles()
        q = path_of_blocks(g, {"a", "b", "v"}, {"a", "b", "v"})
        assert q.vset == {"a", "b", "v"} and q.m == 3

    def test_path_of_blocks_both(self):
        g = two_triangles()
        q = path_of_blocks(g, {"a", "b", "v"}, {"v", "c", "d"})
        assert q.vset == g.vset and q.m == 6

    def test_path_of_blocks_whole_path(self):
        g = make_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
        q = path_of_blocks(g, {"a", "b"}, {"c", "d"})
        assert q.vset == g.vset and q.m == 3

    def test_disconnected_rejected(self):
        with pytest.raises(GraphError):
            block_decomposition(make_graph("ab", []))


@given(multigraphs(connected=True, loops=True))
def test_blocks_partition_edges_and_cut_vertices_match(g):
    if g.n == 0:
        return
    bt = blocks_of(g)
    seen = [e for b in bt.blocks for e in b.edges]
    assert sorted(seen) == list(range(g.m))
    if all(a != b for a, b in g.edges):
        assert bt.cut_vertices == oracles.cut_vertices(g)
    else:
        # a loop is its own block, so its vertex counts as a cut vertex
        for a, b in g.edges:
            if a == b and g.degree(a) > 2:
                assert a in bt.cut_vertices


class TestDisjointPaths:
    def test_k4(self):
        assert len(max_disjoint_paths(k4(), {"1", "2"}, {"3", "4"})) == 2

    def test_path(self, path3):
        assert len(max_disjoint_paths(path3, {"a"}, {"c"})) == 1

    def test_isolated(self):
        assert len(max_disjoint_paths(make_graph("ab", []), {"a"}, {"b"})) == 0

    def test_two_edge_disjoint(self, path3):
        digon = make_graph("uv", [("u", "v"), ("u", "v")])
        c4 = make_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
        assert two_edge_disjoint_paths(digon, "u", "v")
        assert not two_edge_disjoint_paths(path3, "a", "c")
        assert two_edge_disjoint_paths(c4, "a", "c")
        assert not two_edge_disjoint_paths(c4, "a", "c", avoid_internal={"b"})


@given(multigraphs(max_vertices=7), st.data())
def test_menger_against_brute_force(g, data):
    if g.n == 0:
        return
    X = frozenset(data.draw(st.sets(st.sampled_from(g.vertices), min_size=1)))
    Y = frozenset(data.draw(st.sets(st.sampled_from(g.vertices), min_size=1)))
    ps = max_disjoint_paths(g, X, Y)
    assert len(ps) == oracles.min_separator_size(g, X, Y)
    used = [v for p in ps.paths for v in p]
    assert len(used) == len(set(used))
    for p in ps.paths:
        assert p[0] in X and p[-1] in Y
        assert all(b in g.neighbours[a] for a, b in zip(p, p[1:]))
    A, B = min_separation(g, X, Y)
    assert oracles.is_separation(g, A, B)
    assert X <= A and Y <= B and len(A & B) == len(ps)
