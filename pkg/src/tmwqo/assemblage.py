"""Q-assemblages, anchored decompositions, branches, encodings, simulation,
node-realizers, Gamma-elevation, unimpededness and decoration extraction."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .decorated import DecoratedTree, decoration_violation, precedes
from .flows import max_disjoint_count, max_disjoint_paths
from .graph import Multigraph, dumps, graph_from_obj, graph_to_obj
from .qorder import FiniteQuasiOrder, higman_leq, quasi_order_from_obj, quasi_order_violation
from .strips import _pec_node, depth_and_elevation
from .topominor import (EMPTY_MARCH, Embedding, March, SearchLimit, find_rooted_embedding,
                        march_from_obj, verify_rooted_embedding)
from .treedecomp import (RootedDecomposition, decomposition_from_obj, decomposition_to_obj,
                         is_precursor, metrics, validate)


class AssemblageError(ValueError):
    pass


# orders ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BranchValue:
    """A value (S_c, b_c) in the product part of a derived order."""
    branch: "QAssemblage"
    b: tuple[int, ...]

    def to_obj(self):
        return {"branch": assemblage_to_obj(self.branch), "b": list(self.b)}


class DerivedOrder:
    """Q disjoint-union (simulation x equality) on branch values, compared lazily."""

    def __init__(self, base):
        self.base = base

    def leq(self, a, b) -> bool:
        ba, bb = isinstance(a, BranchValue), isinstance(b, BranchValue)
        if ba and bb:
            return a.b == b.b and simulates(a.branch, b.branch) is not None
        if ba or bb:
            return False
        return self.base.leq(a, b)

    def to_obj(self):
        return {"derived": order_to_obj(self.base)}


def order_to_obj(order) -> dict:
    return order.to_obj()


def order_violation(q) -> str | None:
    """None when q is reflexive and transitive, else the first violation."""
    if isinstance(q, FiniteQuasiOrder):
        return quasi_order_violation(q.elements, q.relation)
    return quasi_order_violation(q["elements"], q["leq"])


def _value_obj(v):
    return v.to_obj() if isinstance(v, BranchValue) else v


# assemblages -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QAssemblage:
    graph: Multigraph
    gamma0: March
    Gamma: tuple[March, ...]
    f: tuple
    phi: Mapping[str, object]
    order: object

    def __post_init__(self):
        object.__setattr__(self, "Gamma", tuple(self.Gamma))
        object.__setattr__(self, "f", tuple(self.f))
        object.__setattr__(self, "phi", dict(self.phi))
        if len(self.f) != len(self.Gamma):
            raise AssemblageError("f must give one value per march")
        for m in (self.gamma0,) + self.Gamma:
            for v in m.vertices:
                if v not in self.graph.vset:
                    raise AssemblageError(f"march entry {v} not in graph")
        missing = self.graph.vset - set(self.phi)
        if missing:
            raise AssemblageError(f"phi undefined at {sorted(missing)[0]}")

    def key(self) -> str:
        return dumps(assemblage_to_obj(self))

    def __eq__(self, other):
        return isinstance(other, QAssemblage) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def assemblage_to_obj(S: QAssemblage) -> dict:
    return {
        "graph": graph_to_obj(S.graph),
        "gamma0": S.gamma0.to_obj(),
        "Gamma": [m.to_obj() for m in S.Gamma],
        "f": [_value_obj(v) for v in S.f],
        "phi": {v: _value_obj(S.phi[v]) for v in sorted(S.phi)},
        "order": order_to_obj(S.order),
    }


def assemblage_from_obj(obj) -> QAssemblage:
    try:
        order = quasi_order_from_obj(obj["order"])
        return QAssemblage(graph_from_obj(obj["graph"]), march_from_obj(obj["gamma0"]),
                           tuple(march_from_obj(m) for m in obj["Gamma"]), tuple(obj["f"]),
                           dict(obj["phi"]), order)
    except (KeyError, TypeError) as exc:
        raise AssemblageError(f"bad assemblage: {exc}") from exc


@dataclass(frozen=True, eq=False)
class AnchoredDecomposition:
    decomp: RootedDecomposition
    alpha: tuple[str, ...]  # parallel to Gamma

    def to_obj(self) -> dict:
        obj = decomposition_to_obj(self.decomp)
        obj.pop("alpha", None)
        obj["alpha"] = list(self.alpha)
        return obj


def anchored_from_obj(S: QAssemblage, obj) -> AnchoredDecomposition:
    body = {k: v for k, v in obj.items() if k != "alpha"}
    return AnchoredDecomposition(decomposition_from_obj(S.graph, body), tuple(obj.get("alpha", [])))


def anchored_violation(S: QAssemblage, ad: AnchoredDecomposition) -> str | None:
    d = ad.decomp
    bad = validate(d)
    if bad:
        return str(bad)
    if d.host != S.graph:
        return "decomposition is of a different graph"
    if not set(S.gamma0.vertices) <= d.bags[d.root]:
        return "root march not inside the root bag"
    if len(ad.alpha) != len(S.Gamma):
        return "alpha must give one node per march"
    for i, (m, t) in enumerate(zip(S.Gamma, ad.alpha)):
        if t not in d.bags:
            return f"march {i} anchored at unknown node {t}"
        if not set(m.vertices) <= d.bags[t]:
            return f"march {i} not inside the bag of {t}"
    return None


# branches and encodings ------------------------------------------------------------

def _outside_edges(g: Multigraph, v: str, inside: frozenset) -> int:
    return sum(1 for _, o in g.incidence[v] if o not in inside)


def essential_number(S: QAssemblage, ad: AnchoredDecomposition, t: str, v: str) -> int:
    d = ad.decomp
    desc = d.descendants(t)
    if any(v in m.vertices and a not in desc for m, a in zip(S.Gamma, ad.alpha)):
        return 2
    out = _outside_edges(S.graph, v, d.up(t))
    g0 = dict(zip(S.gamma0.vertices, S.gamma0.ess))
    e0 = g0.get(v, 0)
    if out == 0 and e0 == 0:
        return 0
    if (out == 1 and e0 == 0) or (out == 0 and e0 == 1):
        return 1
    return 2


def _check_ordering(d: RootedDecomposition, t: str, pi: Sequence[str] | None) -> tuple[str, ...]:
    if t == d.root:
        raise AssemblageError("branches are defined at non-root nodes")
    inter = d.bags[t] & d.bags[d.parent[t]]
    if pi is None:
        return tuple(sorted(inter))
    pi = tuple(pi)
    if len(set(pi)) != len(pi) or set(pi) != inter:
        raise AssemblageError(f"ordering at {t} is not a permutation of the adhesion set")
    return pi


def branch_march(S: QAssemblage, ad: AnchoredDecomposition, t: str, pi=None) -> March:
    pi = _check_ordering(ad.decomp, t, pi)
    return March(pi, tuple(essential_number(S, ad, t, v) for v in pi))


def branch_at(S: QAssemblage, ad: AnchoredDecomposition, t: str, pi=None) -> QAssemblage:
    d = ad.decomp
    gamma_t = branch_march(S, ad, t, pi)
    desc = d.descendants(t)
    keep = [i for i, a in enumerate(ad.alpha) if a in desc]
    up = d.up(t)
    return QAssemblage(S.graph.subgraph(up), gamma_t, tuple(S.Gamma[i] for i in keep),
                       tuple(S.f[i] for i in keep), {v: S.phi[v] for v in up}, S.order)


def sub_decomposition(S: QAssemblage, ad: AnchoredDecomposition, t: str, pi=None):
    """The branch at t with the subtree rooted at t as its anchored decomposition."""
    d = ad.decomp
    St = branch_at(S, ad, t, pi)
    desc = d.descendants(t)
    sub = RootedDecomposition(St.graph, t, {c: p for c, p in d.parent.items() if c in desc and c != t},
                              {x: d.bags[x] for x in desc})
    return St, AnchoredDecomposition(sub, tuple(a for a in ad.alpha if a in desc))


def b_sequence(S: QAssemblage, ad: AnchoredDecomposition, t: str, pi=None) -> tuple[int, ...]:
    d = ad.decomp
    gamma_t = branch_march(S, ad, t, pi)
    rest = d.up(t) - set(gamma_t.vertices)
    return tuple(1 if S.graph.neighbours[v] & rest else 0 for v in gamma_t.vertices)


def encoding_at(S: QAssemblage, ad: AnchoredDecomposition, t: str,
                orderings: Mapping[str, Sequence[str]] | None = None) -> QAssemblage:
    """Encoding at t; orderings map nodes to adhesion-set orderings (canonical
    order where missing)."""
    d = ad.decomp
    orderings = orderings or {}
    gamma_h = S.gamma0 if t == d.root else branch_march(S, ad, t, orderings.get(t))
    marches, values = [], []
    for c in d.children[t]:
        pc = orderings.get(c)
        marches.append(branch_march(S, ad, c, pc))
        values.append(BranchValue(branch_at(S, ad, c, pc), b_sequence(S, ad, c, pc)))
    for m, v, a in zip(S.Gamma, S.f, ad.alpha):
        if a == t:
            marches.append(m)
            values.append(v)
    X = d.bags[t]
    return QAssemblage(S.graph.subgraph(X), gamma_h, tuple(marches), tuple(values),
                       {v: S.phi[v] for v in X}, DerivedOrder(S.order))


# simulation --------------------------------------------------------------------

@dataclass
class SimulationWitness:
    embedding: Embedding
    iota: tuple[int, ...]  # index into Gamma' for each march of Gamma

    def to_obj(self):
        return {"embedding": self.embedding.to_obj(), "iota": list(self.iota)}


def _match_marches(S: QAssemblage, S2: QAssemblage, vmap: Mapping[str, str]) -> tuple[int, ...] | None:
    leq = S.order.leq
    cand = []
    for m, v in zip(S.Gamma, S.f):
        image = tuple(vmap[x] for x in m.vertices)
        cand.append([j for j, (m2, v2) in enumerate(zip(S2.Gamma, S2.f))
                     if m2.vertices == image and leq(v, v2)])
    match: dict[int, int] = {}

    def augment(i, seen):
        for j in cand[i]:
            if j not in seen:
                seen.add(j)
                if j not in match or augment(match[j], seen):
                    match[j] = i
                    return True
        return False

    for i in range(len(cand)):
        if not augment(i, set()):
            return None
    inv = {i: j for j, i in match.items()}
    return tuple(inv[i] for i in range(len(cand)))


_SIM_MEMO: dict[tuple[str, str], SimulationWitness | None] = {}


def simulates(S: QAssemblage, S2: QAssemblage, node_limit: int | None = None) -> SimulationWitness | None:
    """A witness that S2 simulates S, or None."""
    key = (S.key(), S2.key())
    if key in _SIM_MEMO:
        return _SIM_MEMO[key]
    res = _simulates(S, S2, node_limit)
    _SIM_MEMO[key] = res
    return res


def _simulates(S, S2, node_limit):
    if len(S.gamma0) != len(S2.gamma0) or len(S.Gamma) > len(S2.Gamma):
        return None
    leq = S.order.leq
    phi, phi2 = S.phi, S2.phi

    def vertex_ok(x, gx, vmap):
        return gx in phi2 and leq(phi[x], phi2[gx])

    def complete_ok(vmap):
        return _match_marches(S, S2, vmap) is not None

    emb = find_rooted_embedding(S.graph, S.gamma0, S2.graph, S2.gamma0, vertex_ok, complete_ok, node_limit)
    if emb is None:
        return None
    return SimulationWitness(emb, _match_marches(S, S2, emb.vmap))


def simulation_violation(S: QAssemblage, S2: QAssemblage, w: SimulationWitness) -> str | None:
    """Independent check of a simulation witness."""
    err = verify_rooted_embedding(w.embedding, S.graph, S.gamma0, S2.graph, S2.gamma0)
    if err:
        return err
    vmap = w.embedding.vmap
    for v in S.graph.vertices:
        if not S.order.leq(S.phi[v], S2.phi[vmap[v]]):
            return f"label of {v} not dominated"
    if len(set(w.iota)) != len(w.iota) or len(w.iota) != len(S.Gamma):
        return "iota is not an injection"
    for i, j in enumerate(w.iota):
        if tuple(vmap[x] for x in S.Gamma[i].vertices) != S2.Gamma[j].vertices:
            return f"march {i} not mapped onto march {j}"
        if not S.order.leq(S.f[i], S2.f[j]):
            return f"value of march {i} not dominated"
    return None


def clear_simulation_memo():
    _SIM_MEMO.clear()


def well_behaved_matrix(family: Sequence[QAssemblage], node_limit: int | None = None) -> list[list[bool]]:
    """M[i][j]: family[j] simulates family[i]."""
    return [[simulates(a, b, node_limit) is not None for b in family] for a in family]


# node-realizers and Gamma-elevation ----------------------------------------------------

def edge_node(c: str) -> str:
    return f"{c}^"


ROOT_NODE = "^root"


@dataclass(frozen=True, eq=False)
class Realizer:
    decomp: RootedDecomposition      # subdivided tree with the new root
    alpha: tuple[str, ...]
    edge_of: Mapping[str, str]       # realizer node -> head of the original edge


def node_realizer(S: QAssemblage, ad: AnchoredDecomposition) -> Realizer:
    d = ad.decomp
    bags = dict(d.bags)
    parent = {}
    edge_of = {}
    for c, p in d.parent.items():
        e = edge_node(c)
        bags[e] = d.bags[c] & d.bags[p]
        parent[e] = p
        parent[c] = e
        edge_of[e] = c
    bags[ROOT_NODE] = frozenset(S.gamma0.vertices)
    parent[d.root] = ROOT_NODE
    return Realizer(RootedDecomposition(d.host, ROOT_NODE, parent, bags), ad.alpha, edge_of)


def gamma_pec(S: QAssemblage, ad: AnchoredDecomposition, real: Realizer):
    """pec(d, node, Z) callback: edge nodes whose march has only essential
    numbers 0 or 1 outside Z; other nodes use the plain pointedness test of
    their own separation."""
    cache: dict = {}

    def pec(d, t, Z):
        if t not in real.edge_of:
            return _pec_node(d, t, Z)
        c = real.edge_of[t]
        if c not in cache:
            m = branch_march(S, ad, c)
            cache[c] = {v for v, a in zip(m.vertices, m.ess) if a == 2}
        return not (cache[c] - Z)

    return pec


def gamma_elevation(S: QAssemblage, ad: AnchoredDecomposition, max_vertices: int = 14) -> int:
    real = node_realizer(S, ad)
    return depth_and_elevation(real.decomp, max_vertices, pec=gamma_pec(S, ad, real))["elevation"]


# unimpededness ------------------------------------------------------------------

def _adhesion(d: RootedDecomposition, c: str) -> frozenset:
    return d.bags[c] & d.bags[d.parent[c]]


def unimpeded_violations(d: RootedDecomposition, N: int) -> list[tuple[str, str]]:
    """Pairs of edges (named by heads) whose adhesion sets start a qualifying
    chain of N+1 edges but are not fully linked."""
    out = []
    edges = [t for t in d.preorder if t in d.parent]
    for c1 in edges:
        I1 = _adhesion(d, c1)
        k = len(I1)
        # walk down from c1 through edges with adhesion at least k
        stack = [(c, (I1,)) for c in d.children[c1]]
        while stack:
            c, seen = stack.pop()
            I = _adhesion(d, c)
            if len(I) < k:
                continue
            if len(I) == k and I not in seen:
                seen = seen + (I,)
                if len(seen) == 2:
                    c2 = c
                    if _longest_tail(d, c, k, seen) >= N + 1 and \
                            max_disjoint_count(d.host, I1, I, limit=k) < k:
                        out.append((c1, c2))
                    continue
            stack.extend((x, seen) for x in d.children[c])
    return out


def _longest_tail(d: RootedDecomposition, c: str, k: int, seen: tuple) -> int:
    """Most distinct size-k adhesion sets on a downward walk from c (inclusive),
    counting those in `seen` and never crossing an edge of adhesion below k."""
    best = len(seen)
    stack = [(x, seen) for x in d.children[c]]
    while stack:
        x, s = stack.pop()
        I = _adhesion(d, x)
        if len(I) < k:
            continue
        if len(I) == k and I not in s:
            s = s + (I,)
        best = max(best, len(s))
        stack.extend((y, s) for y in d.children[x])
    return best


def is_N_unimpeded(ad: AnchoredDecomposition | RootedDecomposition, N: int) -> bool:
    d = ad.decomp if isinstance(ad, AnchoredDecomposition) else ad
    return not unimpeded_violations(d, N)


def graph_as_assemblage(g: Multigraph, d: RootedDecomposition, w: int, N: int,
                        max_vertices: int = 14) -> tuple[AnchoredDecomposition, QAssemblage, dict]:
    """The assemblage (G, empty, empty) with its report on 2N-unimpededness and
    the two elevations."""
    from .refine import is_N_linked
    if not metrics(d)["nested_edges"]:
        raise AssemblageError("decomposition has non-nested edges")
    if metrics(d)["width"] > w:
        raise AssemblageError("decomposition is wider than w")
    if not is_N_linked(d, N):
        raise AssemblageError("decomposition is not N-linked")
    base = FiniteQuasiOrder(("*",), frozenset({("*", "*")}))
    S = QAssemblage(g, EMPTY_MARCH, (), (), {v: "*" for v in g.vertices}, base)
    ad = AnchoredDecomposition(d, ())
    report = {
        "unimpeded_2N": is_N_unimpeded(ad, 2 * N),
        "realizer_elevation": gamma_elevation(S, ad, max_vertices),
        "elevation": depth_and_elevation(d, max_vertices)["elevation"],
    }
    return ad, S, report


# decoration extraction -----------------------------------------------------------

def _closest_precursor(d: RootedDecomposition, t: str) -> str | None:
    k = len(d.bags[t])
    for a in d.ancestors(t)[1:]:
        if len(d.bags[a]) < k:
            return None
        if len(d.bags[a]) == k:
            return a
    return None


def _outside_count_ext(S: QAssemblage, v: str, up: frozenset) -> int:
    """Edges at v leaving `up` in the rooted extension."""
    n = _outside_edges(S.graph, v, up)
    g0 = dict(zip(S.gamma0.vertices, S.gamma0.ess))
    return n + g0.get(v, 0)


def _profile(n: int) -> int:
    return 2 if n >= 2 else n


@dataclass
class DecorationReport:
    tree: DecoratedTree
    levels: dict
    choppers: list
    orderings: dict
    N_prime: int
    h: int
    d: int


def decoration_from_decomposition(S: QAssemblage, ad: AnchoredDecomposition, N: int,
                                  h: int | None = None, dmax: int | None = None,
                                  max_vertices: int = 14) -> DecorationReport:
    err = anchored_violation(S, ad)
    if err:
        raise AssemblageError(err)
    dec = ad.decomp
    adh = metrics(dec)["adhesion"]
    h = adh if h is None else h
    if adh > h:
        raise AssemblageError(f"adhesion {adh} exceeds h={h}")
    if not is_N_unimpeded(ad, N):
        raise AssemblageError("decomposition is not N-unimpeded")
    real = node_realizer(S, ad)
    R = real.decomp
    elev = depth_and_elevation(R, max_vertices, pec=gamma_pec(S, ad, real))["elevation"]
    dmax = elev if dmax is None else dmax
    if elev > dmax:
        raise AssemblageError(f"Gamma-elevation {elev} exceeds d={dmax}")
    Nprime = (3 ** h * (h + 1) ** 2 + 2) * (N + 1)
    g = S.graph
    anchors = [(set(m.vertices), a) for m, a in zip(S.Gamma, ad.alpha)]

    def anchored_outside(v, t):
        desc = R.descendants(t)
        return any(v in vs and a not in desc for vs, a in anchors)

    levels: dict[str, int] = {}
    choppers: list[str] = []
    orderings: dict[str, tuple[str, ...]] = {}
    bfs = []
    queue = deque([R.root])
    while queue:
        x = queue.popleft()
        bfs.append(x)
        queue.extend(R.children[x])
    is_chopper: dict[str, bool] = {}
    for t in bfs:
        Y = R.bags[t]
        tp = _closest_precursor(R, t)
        if tp is None:
            is_chopper[t] = True
        else:
            is_chopper[t] = max_disjoint_count(g, R.bags[tp], Y, limit=len(Y)) < len(Y)
        if is_chopper[t]:
            choppers.append(t)
        # level
        if tp is None:
            levels[t] = 0
        elif is_chopper[t]:
            levels[t] = levels[tp] + 1
        else:
            tpp = next(a for a in R.ancestors(t)[1:] if is_precursor(R, a, t) and is_chopper[a])
            same = R.bags[t] & R.bags[tpp] == R.bags[tp] & R.bags[tpp]
            if same:
                for v in R.bags[t] & R.bags[tpp]:
                    if anchored_outside(v, t) and not anchored_outside(v, tp):
                        same = False
                        break
                    n1 = _outside_count_ext(S, v, R.up(t))
                    n2 = _outside_count_ext(S, v, R.up(tp))
                    if _profile(n1) != _profile(n2):
                        same = False
                        break
            levels[t] = levels[tp] if same else levels[tp] + 1
        # ordering
        if t == R.root:
            orderings[t] = tuple(S.gamma0.vertices)
        elif is_chopper[t]:
            orderings[t] = tuple(sorted(Y))
        else:
            prev = orderings[tp]
            paths = max_disjoint_paths(g, R.bags[tp], Y).paths
            start = {p[0]: p[-1] for p in paths}
            orderings[t] = tuple(start[v] for v in prev)
    # decoration on the original tree, edges named by heads
    phi, tau, mu = {}, {}, {}
    for c in dec.parent:
        e = edge_node(c)
        phi[c] = R.bags[e]
        mu[c] = levels[e]
        if is_chopper[e]:
            tau[c] = R.bags[e]
        else:
            m = branch_march(S, ad, c, orderings[e])
            tau[c] = frozenset(v for v, a in zip(m.vertices, m.ess) if a == 2)
    tree = DecoratedTree(dec.root, dec.parent, phi, tau, mu, h, dmax + 1, Nprime)
    return DecorationReport(tree, levels, choppers, {c: orderings[edge_node(c)] for c in dec.parent},
                            Nprime, h, dmax)


def claim_checks(S: QAssemblage, ad: AnchoredDecomposition, rep: DecorationReport,
                 node_limit: int | None = None) -> dict:
    """Level bound, decoration validity and branch simulation along precedes pairs."""
    t = rep.tree
    over = [x for x, lv in rep.levels.items() if lv > rep.N_prime]
    viol = decoration_violation(t)
    sim_fail = []
    pairs = 0
    for v in t.nodes:
        for w in t.nodes:
            if v != w and precedes(t, v, w):
                pairs += 1
                bv = branch_at(S, ad, v, rep.orderings[v])
                bw = branch_at(S, ad, w, rep.orderings[w])
                try:
                    wit = simulates(bw, bv, node_limit)
                except SearchLimit:
                    sim_fail.append((v, w, "undecided"))
                    continue
                if wit is None:
                    sim_fail.append((v, w, "no simulation"))
                elif simulation_violation(bw, bv, wit):
                    sim_fail.append((v, w, "bad witness"))
    return {"levels_over_bound": over, "decoration_violation": viol, "precedes_pairs": pairs,
            "simulation_failures": sim_fail}


def higman(xs, ys, q) -> bool:
    for x in list(xs) + list(ys):
        if isinstance(q, FiniteQuasiOrder) and x not in q.elements:
            raise AssemblageError(f"element {x} not in the order")
    return higman_leq(xs, ys, q.leq)
