"""Topological-minor containment: plain, label-constrained and rooted."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .graph import GraphError, Multigraph, make_graph


@dataclass(frozen=True)
class March:
    vertices: tuple[str, ...]
    ess: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "ess", tuple(int(a) for a in self.ess))
        if len(self.vertices) != len(self.ess):
            raise GraphError("march entries and essential numbers differ in length")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("march entries must be distinct")
        if any(a not in (0, 1, 2) for a in self.ess):
            raise GraphError("essential numbers must be 0, 1 or 2")

    def __len__(self):
        return len(self.vertices)

    def to_obj(self):
        return {"vertices": list(self.vertices), "ess": list(self.ess)}


EMPTY_MARCH = March((), ())


def march_from_obj(obj) -> March:
    return March(tuple(obj["vertices"]), tuple(obj["ess"]))


@dataclass
class Embedding:
    vmap: dict[str, str]
    emap: dict[int, tuple[str, ...]]
    eids: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def to_obj(self, h: Multigraph | None = None):
        out = {"vmap": {k: self.vmap[k] for k in sorted(self.vmap)},
               "emap": [[i, list(self.emap[i])] for i in sorted(self.emap)]}
        if h is not None:
            out["hedges"] = [list(h.edges[i]) for i in sorted(self.emap)]
        return out


# constructions ---------------------------------------------------------------

def robertson_chain(k: int) -> Multigraph:
    if k < 1:
        raise GraphError("Robertson chain length must be positive")
    vs = [f"v{i}" for i in range(k + 1)]
    es = []
    for i in range(k):
        es += [(vs[i], vs[i + 1])] * 2
    return make_graph(vs, es)


def antichain_member(i: int) -> Multigraph:
    """Robertson chain of length i with two pendant leaves at each end."""
    g = robertson_chain(i)
    vs = list(g.vertices) + ["a0", "a1", "b0", "b1"]
    es = list(g.edges) + [("v0", "a0"), ("v0", "a1"), (f"v{i}", "b0"), (f"v{i}", "b1")]
    return make_graph(vs, es)


def labelled_antichain_member(i: int, subdivisions: int = 1) -> Multigraph:
    """Robertson chain of length i with each edge subdivided, ends labelled x,
    every other vertex labelled y."""
    vs = [f"v{j}" for j in range(i + 1)]
    es = []
    for j in range(i):
        for copy in range(2):
            prev = vs[j]
            for s in range(subdivisions):
                w = f"s{j}_{copy}_{s}"
                vs.append(w)
                es.append((prev, w))
                prev = w
            es.append((prev, f"v{j + 1}"))
    labels = {v: "y" for v in vs}
    labels["v0"] = "x"
    labels[f"v{i}"] = "x"
    return make_graph(vs, es, labels)


# search -----------------------------------------------------------------------

VertexOk = Callable[[str, str, Mapping[str, str]], bool]
InternalOk = Callable[[int, str], bool]
CompleteOk = Callable[[Mapping[str, str]], bool]


class _Search:
    def __init__(self, h: Multigraph, g: Multigraph, fixed: Mapping[str, str] | None = None,
                 vertex_ok: VertexOk | None = None, internal_ok: InternalOk | None = None,
                 complete_ok: CompleteOk | None = None, node_limit: int | None = None):
        self.h, self.g = h, g
        self.fixed = dict(fixed or {})
        self.vertex_ok = vertex_ok
        self.internal_ok = internal_ok
        self.complete_ok = complete_ok
        self.node_limit = node_limit
        self.nodes = 0
        self.hdeg = {v: h.degree(v) for v in h.vertices}
        self.gdeg = {v: g.degree(v) for v in g.vertices}
        self.gpos = g.index
        # neighbour -> list of parallel edge ids, per vertex, canonical order
        self.gadj: dict[str, list[tuple[str, list[int]]]] = {}
        for v in g.vertices:
            groups: dict[str, list[int]] = {}
            for eid, o in g.incidence[v]:
                groups.setdefault(o, []).append(eid)
            self.gadj[v] = sorted(groups.items(), key=lambda kv: self.gpos[kv[0]])
        self.order = self._vertex_order()
        self.vmap: dict[str, str] = {}
        self.image: set[str] = set()
        self.internal: set[str] = set()
        self.used_e: set[int] = set()
        self.emap: dict[int, tuple[str, ...]] = {}
        self.eids: dict[int, tuple[int, ...]] = {}
        self.failed: set = set()
        # H edges grouped by the later-placed endpoint
        pos = {v: i for i, v in enumerate(self.order)}
        self.edges_at: list[list[int]] = [[] for _ in self.order]
        for i, (a, b) in enumerate(h.edges):
            self.edges_at[max(pos[a], pos[b])].append(i)
        for lst in self.edges_at:
            lst.sort(key=lambda i: (tuple(sorted((pos[h.edges[i][0]], pos[h.edges[i][1]]))), i))
        self.pending = {v: self.hdeg[v] for v in h.vertices}

    def _vertex_order(self) -> list[str]:
        h = self.h
        order = [v for v in h.vertices if v in self.fixed]
        placed = set(order)
        rest = [v for v in h.vertices if v not in placed]
        while rest:
            def key(v):
                link = sum(1 for _, o in h.incidence[v] if o in placed)
                return (-link, -self.hdeg[v], h.index[v])
            v = min(rest, key=key)
            order.append(v)
            placed.add(v)
            rest.remove(v)
        return order

    def free_ends(self, gv: str) -> int:
        c = 0
        for o, eids in self.gadj[gv]:
            if o in self.internal:
                continue
            k = sum(1 for e in eids if e not in self.used_e)
            c += 2 * k if o == gv else k
        return c

    def feasible(self) -> bool:
        for x, gx in self.vmap.items():
            if self.pending[x] > self.free_ends(gx):
                return False
        return True

    def run(self) -> Embedding | None:
        hs = sorted(self.hdeg.values(), reverse=True)
        gs = sorted(self.gdeg.values(), reverse=True)
        if len(hs) > len(gs) or any(a > b for a, b in zip(hs, gs)):
            return None
        if self.h.m > self.g.m:
            return None
        if self._place(0):
            return Embedding(dict(self.vmap), dict(self.emap), dict(self.eids))
        return None

    def _tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise SearchLimit()

    def _place(self, k: int) -> bool:
        if k == len(self.order):
            return self.complete_ok is None or self.complete_ok(self.vmap)
        key = (k, tuple(self.vmap[x] for x in self.order[:k]), frozenset(self.used_e), frozenset(self.internal))
        if key in self.failed:
            return False
        x = self.order[k]
        if x in self.fixed:
            cands = [self.fixed[x]]
        else:
            cands = self.g.vertices
        for gx in cands:
            if gx in self.image or gx in self.internal:
                continue
            if self.gdeg[gx] < self.hdeg[x] or self.free_ends(gx) < self.hdeg[x]:
                continue
            if self.vertex_ok is not None and not self.vertex_ok(x, gx, self.vmap):
                continue
            self._tick()
            self.vmap[x] = gx
            self.image.add(gx)
            if self._route(k, 0, None):
                return True
            del self.vmap[x]
            self.image.discard(gx)
        self.failed.add(key)
        return False

    def _route(self, k: int, j: int, prev_key) -> bool:
        lst = self.edges_at[k]
        if j == len(lst):
            if not self.feasible():
                return False
            return self._place(k + 1)
        e = lst[j]
        a, b = self.h.edges[e]
        ga, gb = self.vmap[a], self.vmap[b]
        if self.h.index[a] > self.h.index[b]:
            ga, gb = gb, ga
        twin = j > 0 and sorted(self.h.edges[lst[j - 1]]) == sorted(self.h.edges[e])
        for verts, eids in self._paths(ga, gb, e):
            pkey = (verts, eids)
            if twin and prev_key is not None and pkey <= prev_key:
                continue
            self._tick()
            inner = verts[1:-1]
            self.internal.update(inner)
            self.used_e.update(eids)
            self.emap[e] = verts
            self.eids[e] = eids
            x, y = self.h.edges[e]
            self.pending[x] -= 1
            self.pending[y] -= 1
            if self._route(k, j + 1, pkey):
                return True
            self.pending[x] += 1
            self.pending[y] += 1
            del self.emap[e]
            del self.eids[e]
            self.used_e.difference_update(eids)
            self.internal.difference_update(inner)
        return False

    def _paths(self, ga: str, gb: str, e: int):
        """Paths (or cycles when ga == gb) from ga to gb through unused vertices and edges."""
        path = [ga]
        eids: list[int] = []
        on_path = {ga}
        loop = ga == gb
        internal_ok = self.internal_ok

        def step(u):
            for w, group in self.gadj[u]:
                free = [x for x in group if x not in self.used_e and x not in eids]
                if not free:
                    continue
                eid = free[0]
                if w == gb:
                    if loop and w == u and len(path) > 1:
                        continue
                    if loop and len(path) > 2 and self.gpos[path[1]] > self.gpos[path[-1]]:
                        continue  # each cycle once, in one direction
                    if loop and w == u:
                        yield (ga, ga), (eid,)
                        continue
                    yield tuple(path) + (w,), tuple(eids) + (eid,)
                    continue
                if w in on_path or w in self.image or w in self.internal:
                    continue
                if internal_ok is not None and not internal_ok(e, w):
                    continue
                path.append(w)
                eids.append(eid)
                on_path.add(w)
                yield from step(w)
                on_path.discard(w)
                eids.pop()
                path.pop()

        yield from step(ga)


class SearchLimit(RuntimeError):
    pass


def find_embedding(h: Multigraph, g: Multigraph, label_order=None, node_limit: int | None = None) -> Embedding | None:
    """A homeomorphic embedding of h into g, or None. With a label order, each
    branch vertex v needs label_h(v) <= label_g(image of v)."""
    vertex_ok = None
    if label_order is not None:
        if (h.labels is None and h.n) or (g.labels is None and g.n):
            raise GraphError("label_order needs labelled graphs")
        hl, gl = h.labels or {}, g.labels or {}

        def vertex_ok(x, gx, vmap):
            return label_order.leq(hl[x], gl[gx])
    return _Search(h, g, vertex_ok=vertex_ok, node_limit=node_limit).run()


def verify_embedding(emb: Embedding, h: Multigraph, g: Multigraph, label_order=None) -> str | None:
    """None if emb is a homeomorphic embedding of h into g, else a violation."""
    vm = emb.vmap
    if set(vm) != set(h.vertices):
        return "vertex map does not cover H"
    if len(set(vm.values())) != len(vm):
        return "vertex map is not injective"
    for v, gv in vm.items():
        if gv not in g.vset:
            return f"image of {v} is not a vertex of G"
        if label_order is not None and not label_order.leq(h.labels[v], g.labels[gv]):
            return f"label of {v} not dominated"
    if set(emb.emap) != set(range(h.m)):
        return "edge map does not cover H"
    inv = {gv: v for v, gv in vm.items()}
    used_edges: dict[int, int] = {}
    vsets = {}
    for i, (a, b) in enumerate(h.edges):
        p = list(emb.emap[i])
        ids = list(emb.eids.get(i, ()))
        if len(p) < 2:
            return f"edge {i} maps to a path without edges"
        if a == b:
            if p[0] != vm[a] or p[-1] != vm[a]:
                return f"loop {i} does not map to a cycle through its vertex"
            inner = p[1:-1]
            if len(set(inner)) != len(inner) or vm[a] in inner:
                return f"loop {i} image is not a cycle"
        else:
            if {p[0], p[-1]} != {vm[a], vm[b]}:
                return f"edge {i} image has wrong ends"
            if len(set(p)) != len(p):
                return f"edge {i} image is not a path"
        # choose concrete host edges if the embedding did not name them
        if not ids:
            ids = []
            for x, y in zip(p, p[1:]):
                cands = [eid for eid, o in g.incidence[x] if o == y and eid not in ids and eid not in used_edges]
                if not cands:
                    return f"edge {i} image uses a missing host edge {x}-{y}"
                ids.append(cands[0])
        if len(ids) != len(p) - 1 or len(set(ids)) != len(ids):
            return f"edge {i} image repeats a host edge"
        for (x, y), eid in zip(zip(p, p[1:]), ids):
            if sorted(g.edges[eid]) != sorted((x, y)):
                return f"edge {i} image step {x}-{y} is not host edge {eid}"
            if eid in used_edges:
                return f"host edge {eid} used by edges {used_edges[eid]} and {i}"
            used_edges[eid] = i
        vsets[i] = set(p)
        for w in p:
            if w in inv and inv[w] not in (a, b):
                return f"branch vertex {inv[w]} lies on the image of edge {i}"
    for i in range(h.m):
        for j in range(i + 1, h.m):
            shared = {vm[v] for v in set(h.edges[i]) & set(h.edges[j])}
            extra = (vsets[i] & vsets[j]) - shared
            if extra:
                return f"images of edges {i} and {j} meet at {sorted(extra)[0]}"
    return None


def contains_rc(g: Multigraph, k: int) -> bool:
    if k < 1:
        raise GraphError("k must be positive")
    return find_embedding(robertson_chain(k), g) is not None


# rooted graphs -----------------------------------------------------------------

def _fresh(g: Multigraph, count: int, stem: str = "~u") -> list[str]:
    out = []
    i = 0
    while len(out) < count:
        name = f"{stem}{i}"
        if name not in g.vset:
            out.append(name)
        i += 1
    return out


def rooted_extension(g: Multigraph, march: March) -> tuple[Multigraph, tuple[str, ...]]:
    for v in march.vertices:
        if v not in g.vset:
            raise GraphError(f"march entry {v} not in graph")
    ind = _fresh(g, len(march))
    es = list(g.edges)
    for v, u, a in zip(march.vertices, ind, march.ess):
        es += [(v, u)] * a
    labels = None
    if g.labels:
        labels = dict(g.labels)
        for u in ind:
            labels[u] = ""
    return Multigraph(g.vertices + tuple(ind), tuple(es), labels), tuple(ind)


def find_rooted_embedding(h: Multigraph, gamma1: March, g: Multigraph, gamma2: March,
                          vertex_ok: VertexOk | None = None,
                          complete_ok: CompleteOk | None = None,
                          node_limit: int | None = None) -> Embedding | None:
    """Embedding of the rooted extension of (h, gamma1) into that of (g, gamma2)
    obeying the indicator and root-march clauses; vmap includes indicators."""
    if len(gamma1) != len(gamma2):
        return None
    h1, i1 = rooted_extension(h, gamma1)
    g2, i2 = rooted_extension(g, gamma2)
    fixed = dict(zip(i1, i2))
    pos2 = {v: i for i, v in enumerate(gamma2.vertices)}
    ind1 = set(i1)

    def vok(x, gx, vmap):
        i = pos2.get(gx)
        if i is not None and gamma1.vertices[i] != x:
            return False
        if x in ind1:
            return True
        return vertex_ok is None or vertex_ok(x, gx, vmap)

    def iok(e, w):
        i = pos2.get(w)
        if i is None:
            return True
        ends = h1.edges[e]
        if i1[i] in ends:
            return True
        return gamma1.ess[i] == 0 and gamma1.vertices[i] in ends

    return _Search(h1, g2, fixed=fixed, vertex_ok=vok, internal_ok=iok,
                   complete_ok=complete_ok, node_limit=node_limit).run()


def verify_rooted_embedding(emb: Embedding, h: Multigraph, gamma1: March, g: Multigraph, gamma2: March) -> str | None:
    if len(gamma1) != len(gamma2):
        return "march lengths differ"
    h1, i1 = rooted_extension(h, gamma1)
    g2, i2 = rooted_extension(g, gamma2)
    err = verify_embedding(emb, h1, g2)
    if err:
        return err
    for a, b in zip(i1, i2):
        if emb.vmap[a] != b:
            return f"indicator {a} not mapped to {b}"
    inv = {gv: v for v, gv in emb.vmap.items()}
    for i, w in enumerate(gamma2.vertices):
        if w in inv and inv[w] != gamma1.vertices[i]:
            return f"root vertex {w} is the image of {inv[w]}"
        for e, p in emb.emap.items():
            if w in p[1:-1]:
                ends = h1.edges[e]
                if not (i1[i] in ends or (gamma1.ess[i] == 0 and gamma1.vertices[i] in ends)):
                    return f"root vertex {w} is internal to the image of edge {e}"
    return None
