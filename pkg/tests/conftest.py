import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tmwqo.graph import make_graph
from tmwqo.generators import random_decomposition, random_multigraph, rng_for

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def multigraphs(draw, max_vertices=7, max_extra=6, connected=None, loops=False):
    """Small multigraphs drawn vertex by vertex with explicit edge lists."""
    n = draw(st.integers(0, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    edges = []
    if n >= 2:
        pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
        for a, b in draw(st.lists(pairs, max_size=n + max_extra)):
            if a != b or loops:
                edges.append((vs[a], vs[b]))
    if connected and n >= 2:
        for i in range(1, n):
            j = draw(st.integers(0, i - 1))
            edges.append((vs[j], vs[i]))
    return make_graph(vs, edges)


@st.composite
def graph_with_decomposition(draw, max_vertices=7):
    seed = draw(st.integers(0, 10 ** 6))
    rng = rng_for(seed, "test-decomp")
    g = random_multigraph(rng, rng.randint(1, max_vertices), rng.randint(0, 5))
    return g, random_decomposition(rng, g)


@pytest.fixture
def path3():
    return make_graph("abc", [("a", "b"), ("b", "c")])
