import pytest
from hypothesis import given
from hypothesis import strategies as st

from tmwqo.decorated import (DecorationError, check_closure, comparability_graph, contract,
                             decorated_from_obj, decorated_to_obj, decorated_tree, is_decorated,
                             precedes)


def chain(phis, taus=None, mus=None, h=2, d=3, N=2):
    """A rooted path r-a-b-c... with edges named by their heads."""
    heads = "abcdefgh"[:len(phis)]
    edges = list(zip("r" + heads, heads))
    taus = taus or phis
    mus = mus or [0] * len(phis)
    return decorated_tree("r", edges, dict(zip(heads, phis)), dict(zip(heads, taus)),
                          dict(zip(heads, mus)), h, d, N)


class TestIsDecorated:
    def test_valid_chain(self):
        assert is_decorated(chain(["x", "x", "x"])) == (True, None)

    def test_interval_rule(self):
        ok, v = is_decorated(chain(["x", "y", "x"]))
        assert not ok and v.rule == "interval" and v.witness == ["r>a", "a>b", "b>c"]

    def test_length_rule(self):
        t = chain(["x", "y", "z"])
        assert is_decorated(t, 3)[0]
        ok, v = is_decorated(t, 2)
        assert not ok and v.rule == "length" and v.witness["Z"] == []

    def test_length_needs_tau_outside_z(self):
        assert is_decorated(chain(["x", "y", "z"], taus=["", "", ""]), 2)[0]

    def test_length_needs_equal_mu(self):
        assert is_decorated(chain(["x", "y", "z"], mus=[0, 1, 0]), 2)[0]

    @pytest.mark.parametrize("kw,phis,taus,mus", [
        ({}, ["x"], ["y"], [0]),
        ({"h": 1}, ["xy"], ["x"], [0]),
        ({"N": 1}, ["x"], ["x"], [2]),
    ])
    def test_field_rules(self, kw, phis, taus, mus):
        ok, v = is_decorated(chain(phis, taus, mus, **kw))
        assert not ok and v.rule == "fields"


class TestPrecedes:
    def test_chain(self):
        t = chain(["x", "x", "x"])
        assert precedes(t, "a", "c") and precedes(t, "b", "b")
        assert not precedes(t, "c", "a")
        assert not precedes(t, "r", "c")

    def test_smaller_edge_between(self):
        assert not precedes(chain(["x", "", "x"]), "a", "c")

    def test_lower_level_between(self):
        assert not precedes(chain(["xy", "xz", "xy"], mus=[1, 0, 1]), "a", "c")
        assert precedes(chain(["xy", "xz", "xy"], mus=[1, 2, 1]), "a", "c")

    def test_tau_must_match(self):
        assert not precedes(chain(["x", "x"], taus=["x", ""]), "a", "b")


def test_contract():
    t = chain(["x", "y", "z"])
    c = contract(t, {"a", "c"})
    assert c.parent == {"a": "r", "c": "a"}
    assert c.phi == {"a": frozenset("x"), "c": frozenset("z")}
    with pytest.raises(DecorationError):
        contract(t, {"q"})


class TestClosure:
    def setup_method(self):
        self.trees = [chain(["x"]), chain(["x", "x", "x"])]

    def test_violation(self):
        D = comparability_graph(self.trees, [((0, "a"), (1, "c"))])
        ok, bad = check_closure(D, self.trees)
        assert not ok and bad == ((0, "a"), (1, "a"), (1, "c"))

    def test_closed(self):
        D = comparability_graph(self.trees, [((0, "a"), (1, x)) for x in "abc"])
        assert check_closure(D, self.trees) == (True, None)

    def test_same_tree_edge_rejected(self):
        with pytest.raises(DecorationError):
            comparability_graph(self.trees, [((1, "a"), (1, "c"))])


@st.composite
def decorated_trees(draw):
    n = draw(st.integers(1, 7))
    heads = [f"e{i}" for i in range(n)]
    nodes = ["r"] + heads
    edges = [(draw(st.sampled_from(nodes[:i + 1])), heads[i]) for i in range(n)]
    phi = {c: draw(st.sets(st.sampled_from("xyz"), max_size=2)) for c in heads}
    tau = {c: draw(st.sets(st.sampled_from(sorted(phi[c])))) if phi[c] else set() for c in heads}
    mu = {c: draw(st.integers(0, 2)) for c in heads}
    return decorated_tree("r", edges, phi, tau, mu, 2, 3, 2)


@given(decorated_trees())
def test_precedes_is_a_quasi_order(t):
    nodes = [v for v in t.nodes if v != t.root]
    for v in nodes:
        assert precedes(t, v, v)
        for w in nodes:
            for x in nodes:
                if precedes(t, v, w) and precedes(t, w, x):
                    assert precedes(t, v, x)


@given(decorated_trees())
def test_round_trip(t):
    back = decorated_from_obj(decorated_to_obj(t))
    assert back == t and decorated_to_obj(back) == decorated_to_obj(t)
