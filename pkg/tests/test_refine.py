import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graph_with_decomposition
from tmwqo import oracles
from tmwqo.generators import rng_for, shift_instance, unlinked_instance
from tmwqo.graph import make_graph
from tmwqo.refine import (RefineError, Signature, compare_signatures, improve_unlinked,
                          is_incorporated, is_N_integrated, is_N_linked, linked_violations,
                          normalize_edges, refine_driver, shift_separation, signature,
                          witness_violation)
from tmwqo.separations import SeparationTable, make_separation
from tmwqo.treedecomp import metrics, path_decomposition, trivial_decomposition, validate


def p4():
    return make_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d")])


class TestIncorporated:
    def setup_method(self):
        self.g = make_graph("v", [])
        self.d = trivial_decomposition(self.g)

    def test_empty_b(self):
        w = is_incorporated(self.d, make_separation(self.g, "v", ""))
        assert w is not None and w.nodes == ()

    def test_root_witness(self):
        sep = make_separation(self.g, "v", "v")
        w = is_incorporated(self.d, sep)
        assert w.nodes == ("r",) and witness_violation(self.d, sep, w.nodes) is None

    def test_breadth_too_large(self):
        assert is_incorporated(self.d, make_separation(self.g, "", "v")) is None


class TestSignature:
    def test_single_vertex(self):
        d = trivial_decomposition(make_graph("v", []))
        sig = signature(d, 1)
        assert (sig.get(0, 0), sig.get(1, 0), sig.get(1, 1)) == (1, 1, 0)

    def test_empty_graph(self):
        sig = signature(trivial_decomposition(make_graph([], [])))
        assert sig.as_list() == [[0, 0, 1]]

    def test_max_order_zero(self):
        d = path_decomposition(p4(), ["ab", "bc", "cd"])
        assert signature(d, 0).as_list() == [[0, 0, 1]]

    def test_compare(self):
        a = Signature(1, {(0, 0): 1, (1, 0): 2})
        assert compare_signatures(a, Signature(1, {(0, 0): 1, (1, 0): 2})) == "equal"
        assert compare_signatures(a, Signature(1, {(0, 0): 2})) == "greater"
        assert compare_signatures(a, Signature(1, {(0, 0): 1, (1, 0): 2, (1, 1): 1})) == "greater"
        assert compare_signatures(a, Signature(1, {(0, 0): 1, (1, 0): 1, (1, 1): 5})) == "less"

    def test_mismatched_orders(self):
        with pytest.raises(RefineError):
            compare_signatures(Signature(1), Signature(2))


@given(graph_with_decomposition(max_vertices=6))
def test_signature_matches_brute_force(gd):
    g, d = gd
    sig = signature(d)
    ref = oracles.signature_counts(g, dict(d.parent), dict(d.bags))
    assert {k: v for k, v in sig.counts.items() if v} == {k: v for k, v in ref.items() if v}


@given(graph_with_decomposition(max_vertices=6), st.data())
def test_incorporation_matches_brute_force(gd, data):
    g, d = gd
    table = SeparationTable(g)
    sep = table.separation(data.draw(st.integers(0, len(table) - 1)))
    w = is_incorporated(d, sep)
    assert (w is not None) == oracles.incorporated(g, dict(d.parent), dict(d.bags), sep.A, sep.B)
    if w is not None:
        assert witness_violation(d, sep, w.nodes) is None


@given(st.integers(0, 10 ** 6))
def test_shift_separation_conclusions(seed):
    inst = shift_instance(rng_for(seed, "test-shift"))
    d, t1, t2, sep = inst.decomposition, inst.t1, inst.t2, inst.separation
    out = shift_separation(d, t1, t2, sep)
    g = d.host
    assert oracles.is_separation(g, out.A, out.B)
    assert out.A & out.B == sep.A & sep.B
    assert d.down(t1) <= out.A and d.up(t2) <= out.B
    for s in d.descendants(t1):
        if d.is_ancestor(s, t2) or d.is_ancestor(t2, s):
            continue
        if d.bags[s] <= out.A or d.bags[s] <= out.B:
            assert d.up(s) <= out.A or d.up(s) <= out.B


class TestImproveUnlinked:
    def test_p4(self):
        g = p4()
        d = path_decomposition(g, ["ab", "bc", "cd"])
        sep = make_separation(g, "abc", "cd")
        nd = improve_unlinked(d, "t00", "t02", sep)
        assert validate(nd) is None
        assert oracles.decomposition_is_valid(g, dict(nd.parent), dict(nd.bags))
        star = [t for t in nd.nodes if t not in {f"at0{i}" for i in range(3)} | {f"bt0{i}" for i in range(3)}]
        assert len(star) == 1 and nd.bags[star[0]] == frozenset("c")
        assert compare_signatures(signature(d), signature(nd)) == "greater"

    def test_order_too_large(self):
        g = p4()
        d = path_decomposition(g, ["ab", "bc", "cd"])
        with pytest.raises(RefineError):
            improve_unlinked(d, "t00", "t02", make_separation(g, "abcd", "cd"))


@given(st.integers(0, 10 ** 6))
def test_improve_unlinked_raises_signature(seed):
    inst = unlinked_instance(rng_for(seed, "test-unlinked"))
    d = inst.decomposition
    nd = improve_unlinked(d, inst.t1, inst.t2, inst.separation)
    g = d.host
    assert oracles.decomposition_is_valid(g, dict(nd.parent), dict(nd.bags))
    assert metrics(nd)["width"] <= metrics(d)["width"]
    old = oracles.signature_counts(g, dict(d.parent), dict(d.bags))
    new = oracles.signature_counts(g, dict(nd.parent), dict(nd.bags))
    assert oracles.compare_counts(old, new, g.n) == "greater"


class TestNormalize:
    def test_nested_unchanged(self):
        g = make_graph("ab", [("a", "b")])
        d = path_decomposition(g, ["ab", "b"])
        assert normalize_edges(d) == d

    def test_middle_node(self, path3):
        nd = normalize_edges(path_decomposition(path3, ["ab", "bc"]))
        assert nd.bags["t01^"] == frozenset("b") and nd.parent["t01"] == "t01^"
        assert metrics(nd)["nested_edges"] and validate(nd) is None

    def test_three_subdivisions(self):
        d = path_decomposition(make_graph("abcde", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")]),
                               ["ab", "bc", "cd", "de"])
        nd = normalize_edges(d)
        assert len(nd.nodes) == len(d.nodes) + 3 and metrics(nd)["nested_edges"]


class TestDriver:
    def test_already_fine(self):
        g = make_graph("ab", [("a", "b")])
        d = trivial_decomposition(g)
        out = refine_driver(g, d, 1)
        assert out.status == "done" and out.trace == [] and out.decomposition == d

    def test_huge_n_only_normalizes(self):
        g = p4()
        d = path_decomposition(g, ["ab", "bc", "cd"])
        out = refine_driver(g, d, 10 ** 6)
        assert out.status == "done"
        assert [t["step"] for t in out.trace] == ["normalize"]
        assert not linked_violations(d, 10 ** 6)

    def test_small_n_terminates(self):
        g = p4()
        d = path_decomposition(g, ["ab", "bc", "cd"])
        out = refine_driver(g, d, 1)
        D = out.decomposition
        assert out.status == "done"
        assert is_N_linked(D, 1) and is_N_integrated(D, 1) and metrics(D)["nested_edges"]
        assert oracles.n_linked(g, dict(D.parent), dict(D.bags), 1)
        assert oracles.n_integrated(g, dict(D.parent), dict(D.bags), 1)

    def test_invalid_initial(self, path3):
        with pytest.raises(RefineError):
            refine_driver(path3, path_decomposition(path3, ["ab"]), 1)
