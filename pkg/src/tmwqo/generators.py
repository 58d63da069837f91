"""Seeded instance samplers for the property suites."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .assemblage import (AnchoredDecomposition, AssemblageError, QAssemblage, anchored_violation,
                         decoration_from_decomposition, encoding_at, is_N_unimpeded, simulates)
from .graph import Multigraph, is_connected, make_graph
from .qorder import FiniteQuasiOrder, chain_order
from .refine import (RefineError, integrated_violations, integration_pairs, is_incorporated,
                     linked_violations, unlinked_separations)
from .separations import SeparationTable
from .strips import StripError, arrange_members, progress_hypotheses
from .topominor import EMPTY_MARCH, March
from .treedecomp import (RootedDecomposition, greedy_decomposition, is_precursor, metrics,
                         path_decomposition, validate)


def rng_for(seed: int, stream: str) -> random.Random:
    return random.Random(f"{stream}:{seed}")


def random_multigraph(rng: random.Random, n: int, extra: int, max_mult: int = 2,
                      loops: bool = False, connected: bool = True) -> Multigraph:
    vs = [f"v{i}" for i in range(n)]
    es = []
    if connected:
        for i in range(1, n):
            es.append((vs[i], vs[rng.randrange(i)]))
    for _ in range(extra if vs else 0):
        a, b = rng.choice(vs), rng.choice(vs)
        if a == b and not loops:
            continue
        es.extend([(a, b)] * rng.randint(1, max_mult))
    return make_graph(vs, es)


def random_decomposition(rng: random.Random, g: Multigraph) -> RootedDecomposition:
    order = list(g.vertices)
    rng.shuffle(order)
    return greedy_decomposition(g, order)


def random_vertex_sets(rng: random.Random, g: Multigraph) -> tuple[frozenset, frozenset]:
    vs = list(g.vertices)
    X = frozenset(rng.sample(vs, rng.randint(1, max(1, len(vs) // 2))))
    Y = frozenset(rng.sample(vs, rng.randint(1, max(1, len(vs) // 2))))
    return X, Y


# shifting --------------------------------------------------------------------------

@dataclass
class ShiftInstance:
    decomposition: RootedDecomposition
    t1: str
    t2: str
    separation: object


def shift_instance(rng: random.Random, max_vertices: int = 8) -> ShiftInstance:
    while True:
        g = random_multigraph(rng, rng.randint(3, max_vertices), rng.randint(0, 5))
        d = random_decomposition(rng, g)
        pairs = [(a, b) for a in d.nodes for b in d.nodes if a != b and d.is_ancestor(a, b)]
        if not pairs:
            continue
        t1, t2 = rng.choice(pairs)
        table = SeparationTable(g, d.bags[t1], d.bags[t2])
        if len(table):
            return ShiftInstance(d, t1, t2, table.separation(rng.randrange(len(table))))


# progress shift ----------------------------------------------------------------------

@dataclass
class ProgressInstance:
    decomposition: RootedDecomposition
    t1: str
    t2: str
    t3: str
    paths: list
    r: int


def _corridor(rng: random.Random):
    s = rng.randint(1, 3)
    layers = [[f"{c}{i}" for i in range(s)] for c in "abc"]
    vs = [v for layer in layers for v in layer]
    es = []
    mid_extra = [[], []]
    for i in range(s):
        for k in range(2):
            u, w = layers[k][i], layers[k + 1][i]
            if rng.random() < 0.3:
                x = f"m{k}{i}"
                vs.append(x)
                mid_extra[k].append(x)
                es.extend([(u, x)] * rng.randint(1, 2) + [(x, w)] * rng.randint(1, 2))
            else:
                es.extend([(u, w)] * rng.randint(1, 2))
    for k in range(2):
        pool = layers[k] + layers[k + 1] + mid_extra[k]
        for _ in range(rng.randint(0, 2)):
            a, b = rng.sample(pool, 2)
            es.append((a, b))
        if rng.random() < 0.4:
            p = f"p{k}"
            vs.append(p)
            mid_extra[k].append(p)
            es.append((p, rng.choice(pool)))
    bags = []
    head, tail = [], []
    if rng.random() < 0.5:
        head = ["h"]
        vs.append("h")
        es.extend([("h", layers[0][i]) for i in range(s)])
    if rng.random() < 0.5:
        tail = ["z"]
        vs.append("z")
        es.extend([("z", layers[2][i]) for i in range(s)])
    if head:
        bags.append(head + layers[0])
    bags.append(layers[0])
    bags.append(layers[0] + layers[1] + mid_extra[0])
    bags.append(layers[1])
    bags.append(layers[1] + layers[2] + mid_extra[1])
    bags.append(layers[2])
    if tail:
        bags.append(layers[2] + tail)
    g = make_graph(vs, es)
    d = path_decomposition(g, bags)
    off = 1 if head else 0
    names = [f"t{i:02d}" for i in range(len(bags))]
    t1, t2, t3 = names[off], names[off + 2], names[off + 4]
    paths = []
    for i in range(s):
        p = [layers[0][i]]
        for k in range(2):
            x = f"m{k}{i}"
            if x in g.vset:
                p.append(x)
            p.append(layers[k + 1][i])
        paths.append(tuple(p))
    return d, t1, t2, t3, paths


def progress_instance(rng: random.Random, attempts: int = 10000) -> ProgressInstance:
    for _ in range(attempts):
        d, t1, t2, t3, paths = _corridor(rng)
        if validate(d):
            continue
        try:
            arranged = arrange_members(d, t1, t2, t3, paths)
        except StripError:
            continue
        if arranged is None:
            continue
        ps, r = arranged
        if progress_hypotheses(d, t1, t2, t3, ps, r) is None:
            return ProgressInstance(d, t1, t2, t3, ps, r)
    raise RuntimeError("no corridor instance satisfied the hypotheses")


# decomposition improvements -----------------------------------------------------------

@dataclass
class UnlinkedInstance:
    decomposition: RootedDecomposition
    t1: str
    t2: str
    separation: object


def unlinked_instance(rng: random.Random, max_vertices: int = 8, N: int = 1) -> UnlinkedInstance:
    while True:
        g = random_multigraph(rng, rng.randint(3, max_vertices), rng.randint(0, 4))
        d = random_decomposition(rng, g)
        viol = linked_violations(d, N)
        if not viol:
            continue
        t1, t2 = rng.choice(viol)
        seps = [s for s in unlinked_separations(d, t1, t2) if is_incorporated(d, s) is None]
        if seps:
            return UnlinkedInstance(d, t1, t2, seps[0])


@dataclass
class UnintegratedInstance:
    decomposition: RootedDecomposition
    chain: tuple
    sep1: object
    sep2: object


def _template(rng: random.Random):
    """A path decomposition with a long thin corridor whose doubled edges
    point toward the root; random relabelling, multiplicities and pendants."""
    names = ["y", "z", "x0", "x1", "x2", "x3", "m"]
    perm = names[:]
    rng.shuffle(perm)
    lab = {a: f"v{perm.index(a)}" for a in names}
    mult = lambda: rng.randint(2, 3)
    es = [("y", "x0")] * mult() + [("y", "z")] + [("x0", "x1")] * mult() + [("x1", "m")] + \
         [("m", "x2")] * mult() + [("x2", "x3")] * mult()
    bags = [["y", "z", "x0"], ["z", "x0"], ["z", "x0", "x1"], ["z", "x1"], ["z", "x1", "m"],
            ["z", "m", "x2"], ["z", "x2"], ["z", "x2", "x3"], ["z", "x3"]]
    vs = list(names)
    if rng.random() < 0.5:
        vs.append("q")
        es.append(("q", "y"))
        bags.insert(0, ["q", "y"])
    if rng.random() < 0.5:
        vs.append("w")
        es.append(("w", "x3"))
        bags.append(["x3", "w"])
    for v in vs:
        lab.setdefault(v, f"v{len(lab)}")
    g = make_graph([lab[v] for v in vs], [(lab[a], lab[b]) for a, b in es])
    return path_decomposition(g, [[lab[v] for v in b] for b in bags])


def unintegrated_instance(rng: random.Random, N: int = 1, attempts: int = 1000) -> UnintegratedInstance:
    for _ in range(attempts):
        d = _template(rng)
        if validate(d):
            continue
        viols = integrated_violations(d, N)
        rng.shuffle(viols)
        for v in viols:
            pairs = integration_pairs(d, v["chain"], *v["breadth"])
            if pairs:
                p = pairs[rng.randrange(len(pairs))]
                return UnintegratedInstance(d, tuple(v["chain"]), p.sep1, p.sep2)
    raise RuntimeError("template family produced no integration violation")


def driver_graph(rng: random.Random, max_vertices: int = 8, max_width: int = 3):
    while True:
        g = random_multigraph(rng, rng.randint(2, max_vertices), rng.randint(0, 4))
        d = greedy_decomposition(g)
        if metrics(d)["width"] <= max_width:
            return g, d


# assemblages ----------------------------------------------------------------------------

LABELS = chain_order(("a", "b", "c"))


def _random_march(rng: random.Random, pool, max_len: int) -> March:
    pool = sorted(pool)
    k = rng.randint(1, min(max_len, len(pool))) if pool else 0
    vs = rng.sample(pool, k)
    return March(tuple(vs), tuple(rng.randint(0, 2) for _ in vs))


def random_anchored(rng: random.Random, max_vertices: int = 10, h: int = 3, max_nodes: int = 7,
                    max_gamma: int = 3, chain_bias: float = 0.6, order: FiniteQuasiOrder = LABELS):
    """A random assemblage built decomposition-first, with random marches."""
    count = 0

    def fresh():
        nonlocal count
        count += 1
        return f"v{count - 1}"

    root_bag = [fresh() for _ in range(rng.randint(1, 3))]
    bags = {"n00": root_bag}
    parent = {}
    order_nodes = ["n00"]
    es = []
    for i in range(1, rng.randint(1, max_nodes)):
        if count >= max_vertices:
            break
        p = order_nodes[-1] if rng.random() < chain_bias else rng.choice(order_nodes)
        pb = bags[p]
        k = rng.randint(1, min(h, len(pb)))
        adh = rng.sample(pb, k)
        new = [fresh() for _ in range(rng.randint(0, min(2, max_vertices - count)))]
        name = f"n{i:02d}"
        bags[name] = adh + new
        parent[name] = p
        order_nodes.append(name)
        for v in new:
            es.extend([(v, rng.choice(adh))] * rng.randint(1, 2))
    for t, b in bags.items():
        if len(b) >= 2:
            for _ in range(rng.randint(0, 2)):
                a, c = rng.sample(b, 2)
                es.extend([(a, c)] * rng.randint(1, 2))
    vs = [f"v{i}" for i in range(count)]
    g = make_graph(vs, es)
    d = RootedDecomposition(g, "n00", parent, {t: frozenset(b) for t, b in bags.items()})
    gamma0 = _random_march(rng, root_bag, 2) if rng.random() < 0.6 else EMPTY_MARCH
    marches, values, alpha = [], [], []
    for _ in range(rng.randint(0, max_gamma)):
        t = rng.choice(order_nodes)
        marches.append(_random_march(rng, bags[t], 2))
        values.append(rng.choice(order.elements))
        alpha.append(t)
    phi = {v: rng.choice(order.elements) for v in vs}
    S = QAssemblage(g, gamma0, tuple(marches), tuple(values), phi, order)
    return S, AnchoredDecomposition(d, tuple(alpha))


def unimpeded_instance(rng: random.Random, N: int = 1, h: int = 4, dmax: int = 3,
                       max_vertices: int = 10, min_vertices: int = 5):
    while True:
        S, ad = random_anchored(rng, max_vertices=max_vertices, h=min(h, 3), max_nodes=9)
        if S.graph.n < min_vertices:
            continue
        if anchored_violation(S, ad) or not is_N_unimpeded(ad, N):
            continue
        if metrics(ad.decomp)["adhesion"] > h:
            continue
        try:
            rep = decoration_from_decomposition(S, ad, N, h=h)
        except AssemblageError:
            continue
        if rep.d <= dmax:
            return S, ad, rep


def _grow(rng: random.Random, S: QAssemblage, ad: AnchoredDecomposition):
    """A variant of S expected to simulate it: raised labels, extra marches,
    extra pendant vertices in fresh leaf nodes."""
    order = S.order
    up = lambda x: rng.choice([y for y in order.elements if order.leq(x, y)])
    phi = {v: up(x) if rng.random() < 0.4 else x for v, x in S.phi.items()}
    f = [up(x) if rng.random() < 0.4 else x for x in S.f]
    d = ad.decomp
    bags = dict(d.bags)
    parent = dict(d.parent)
    marches, alpha = list(S.Gamma), list(ad.alpha)
    vs = list(S.graph.vertices)
    es = [tuple(e) for e in S.graph.edges]
    for j in range(rng.randint(0, 2)):
        t = rng.choice(d.nodes)
        if not bags[t]:
            continue
        a = rng.choice(sorted(bags[t]))
        u = f"w{j}"
        vs.append(u)
        es.append((a, u))
        phi[u] = rng.choice(order.elements)
        leaf = f"{t}w{j}"
        bags[leaf] = frozenset({a, u})
        parent[leaf] = t
    if rng.random() < 0.3:
        t = rng.choice(d.nodes)
        if bags[t]:
            marches.append(_random_march(rng, bags[t] & d.bags[t], 2))
            f.append(rng.choice(order.elements))
            alpha.append(t)
    g = make_graph(vs, es)
    S2 = QAssemblage(g, S.gamma0, tuple(marches), tuple(f), phi, order)
    return S2, AnchoredDecomposition(RootedDecomposition(g, d.root, parent, bags), tuple(alpha))


def simulation_pair(rng: random.Random, max_vertices: int = 10, max_gamma: int = 3,
                    attempts: int = 2000):
    """Two assemblages with decompositions whose root encodings stand in
    simulation (the second simulating the first)."""
    for _ in range(attempts):
        S, ad = random_anchored(rng, max_vertices=max_vertices - 2, max_gamma=max_gamma)
        if anchored_violation(S, ad):
            continue
        S2, ad2 = _grow(rng, S, ad)
        if S2.graph.n > max_vertices or len(S2.Gamma) > max_gamma or anchored_violation(S2, ad2):
            continue
        e1 = encoding_at(S, ad, ad.decomp.root)
        e2 = encoding_at(S2, ad2, ad2.decomp.root)
        if simulates(e1, e2) is not None:
            return (S, ad), (S2, ad2)
    raise RuntimeError("no simulating pair found")
