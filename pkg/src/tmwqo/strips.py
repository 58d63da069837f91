"""Strips, depth and elevation, foundation paths, side graphs, jumps, static
members, side progresses and the strip-breaking constructions."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .blocks import blocks_of, blocks_on_path
from .flows import PathSystem, max_disjoint_count, max_disjoint_paths, two_edge_disjoint_paths
from .graph import GraphError, Multigraph, component_of, components
from .separations import (Separation, SeparationError, SeparationTable, is_pseudo_edge_cut,
                          make_separation, separation_violation)
from .treedecomp import RootedDecomposition, is_precursor


class StripError(ValueError):
    pass


@dataclass(frozen=True)
class Strip:
    nodes: tuple[str, ...]
    Z: frozenset[str]
    s: int

    def to_obj(self):
        return {"nodes": list(self.nodes), "Z": sorted(self.Z), "s": self.s}


# strips ------------------------------------------------------------------------

def _pec_node(d: RootedDecomposition, t: str, Z) -> bool:
    return is_pseudo_edge_cut(d.separation(t), Z, d.host)


def _linked(d: RootedDecomposition, a: str, b: str) -> bool:
    k = len(d.bags[a])
    return max_disjoint_count(d.host, d.bags[a], d.bags[b], limit=k) >= k


def _candidate(d: RootedDecomposition, t: str, Z: frozenset, s: int, pec=_pec_node) -> bool:
    bag = d.bags[t]
    return Z <= bag and len(bag - Z) == s and not pec(d, t, Z)


def _step_ok(d: RootedDecomposition, a: str, b: str, Z: frozenset, pec_cache: dict, pec=_pec_node) -> bool:
    """Consecutive-pair strip conditions (a precedes b)."""
    if not is_precursor(d, a, b):
        return False
    if (d.bags[a] - Z) & (d.bags[b] - Z):
        return False
    k = len(d.bags[a])
    for t in d.tree_path(a, b):
        if len(d.bags[t]) == k:
            if t not in pec_cache:
                pec_cache[t] = pec(d, t, Z)
            if pec_cache[t]:
                return False
    return _linked(d, a, b)


def strip_violation(d: RootedDecomposition, strip: Strip, pec=_pec_node) -> str | None:
    """Independent check of the five strip conditions on the whole sequence."""
    ns, Z, s = strip.nodes, strip.Z, strip.s
    if not ns:
        return "empty strip"
    for a, b in zip(ns, ns[1:]):
        if not is_precursor(d, a, b):
            return f"{a} is not a precursor of {b}"
    for t in ns:
        if not Z <= d.bags[t] or len(d.bags[t] - Z) != s:
            return f"bag of {t} does not have the form Z plus s vertices"
    for a, b in combinations(ns, 2):
        if (d.bags[a] - Z) & (d.bags[b] - Z):
            return f"bags of {a} and {b} overlap outside Z"
    k = len(d.bags[ns[0]])
    for t in d.tree_path(ns[0], ns[-1]):
        if len(d.bags[t]) == k and pec(d, t, Z):
            return f"node {t} gives a pseudo-edge-cut modulo Z"
    if max_disjoint_count(d.host, d.bags[ns[0]], d.bags[ns[-1]]) < k:
        return "first and last bags are not linked"
    return None


def _strip_dag(d: RootedDecomposition, Z: frozenset, s: int, pec=_pec_node):
    cands = [t for t in d.preorder if _candidate(d, t, Z, s, pec)]
    pec_cache: dict = {}
    succ: dict[str, list[str]] = {t: [] for t in cands}
    for a in cands:
        for b in cands:
            if a != b and d.is_ancestor(a, b) and _step_ok(d, a, b, Z, pec_cache, pec):
                succ[a].append(b)
    return cands, succ


def find_strips(d: RootedDecomposition, Z: Iterable[str], s: int, limit: int = 10000,
                pec=_pec_node) -> list[Strip]:
    """All inclusion-maximal (Z,s)-strips."""
    Z = frozenset(Z)
    if s < 1:
        return []
    cands, succ = _strip_dag(d, Z, s, pec)
    pred: dict[str, list[str]] = {t: [] for t in cands}
    for a, bs in succ.items():
        for b in bs:
            pred[b].append(a)
    sset = {t: set(v) for t, v in succ.items()}
    out: list[Strip] = []

    def extend(chain: list[str]):
        last = chain[-1]
        if not succ[last]:
            if _maximal(chain):
                out.append(Strip(tuple(chain), Z, s))
                if len(out) > limit:
                    raise StripError("too many strips")
            return
        for b in succ[last]:
            chain.append(b)
            extend(chain)
            chain.pop()

    def _maximal(chain):
        for a, b in zip(chain, chain[1:]):
            if any(b in sset[x] for x in sset[a]):
                return False
        return True

    for t in cands:
        if not pred[t]:
            extend([t])
    return out


def strip_depth(d: RootedDecomposition, Z: Iterable[str], s: int, pec=_pec_node) -> int:
    Z = frozenset(Z)
    if s < 1:
        return 0
    cands, succ = _strip_dag(d, Z, s, pec)
    best: dict[str, int] = {}
    for t in reversed(cands):  # preorder reversed: descendants first
        best[t] = 1 + max((best[b] for b in succ[t]), default=0)
    return max(best.values(), default=0)


def depth_and_elevation(d: RootedDecomposition, max_vertices: int = 14, pec=_pec_node) -> dict:
    """Depth per (Z, s) and the elevation; `pec(d, t, Z)` decides which nodes
    count as pseudo-edge-cuts."""
    if d.host.n > max_vertices:
        raise StripError(f"host has {d.host.n} vertices, above the limit {max_vertices}")
    Zs = set()
    for bag in d.bags.values():
        b = sorted(bag)
        for r in range(len(b) + 1):
            for c in combinations(b, r):
                Zs.add(frozenset(c))
    depths = {}
    for Z in sorted(Zs, key=lambda z: (len(z), sorted(z))):
        sizes = sorted({len(bag) - len(Z) for bag in d.bags.values() if Z <= bag and len(bag) > len(Z)})
        for s in sizes:
            dep = strip_depth(d, Z, s, pec)
            if dep:
                depths[(Z, s)] = dep
    return {"depth": depths, "elevation": max(depths.values(), default=0)}


def alpha_breaks(sep: Separation, strip: Strip, alpha: int, d: RootedDecomposition) -> bool:
    ns = strip.nodes
    h = len(ns)
    for p in range(alpha - 1, h):  # p = index of the alpha-th left node
        if p + 1 < alpha:
            continue
        if not d.down(ns[p]) <= sep.A:
            continue
        for q in range(p + 1, h):  # q = index of the first right node
            if h - q < alpha:
                break
            if d.up(ns[q]) <= sep.B:
                return True
    return False


# foundation paths and side graphs -------------------------------------------------

def foundation_paths(d: RootedDecomposition, t1: str, t2: str) -> PathSystem | None:
    if not is_precursor(d, t1, t2):
        raise StripError(f"{t1} is not a precursor of {t2}")
    ps = max_disjoint_paths(d.host, d.bags[t1], d.bags[t2])
    return ps if len(ps) == len(d.bags[t2]) else None


def subpath(p: Sequence[str], X1, X2) -> tuple[str, ...]:
    """The piece of p from its vertex in X1 to its vertex in X2."""
    i = next(i for i, v in enumerate(p) if v in X1)
    j = next(j for j in range(i, len(p)) if p[j] in X2)
    return tuple(p[i:j + 1])


@dataclass(frozen=True)
class SideGraphs:
    Q: Multigraph
    L: frozenset[str]
    R: frozenset[str]
    single_edges: tuple[tuple[frozenset[str], int], ...]  # (vertices, host edge id)


def qlr_graphs(g: Multigraph, paths: Sequence[Sequence[str]], P: int, X1=None, X2=None) -> SideGraphs:
    """(Q,L,R) graphs of member P of a disjoint path system; edge ids in
    single_edges refer to g."""
    p = tuple(paths[P])
    if len(p) < 2:
        raise StripError("member has no edge")
    v1, v2 = p[0], p[-1]
    others = set().union(*(set(w) for i, w in enumerate(paths) if i != P)) if len(paths) > 1 else set()
    h = g.subgraph(g.vset - others)

    def edge_between(a, b):
        for eid, o in h.incidence[a]:
            if o == b:
                return eid
        raise StripError(f"member uses missing edge {a}-{b}")

    e1 = edge_between(p[0], p[1])
    e2 = edge_between(p[-2], p[-1])
    bt = blocks_of(h)
    blks = blocks_on_path(bt, e1, e2)
    q_vs = set().union(*(b.vertices for b in blks))
    q_es = set().union(*(b.edges for b in blks))
    Q = h.edge_subgraph(q_es, q_vs)
    singles = [b for b in blks if b.is_single_edge]
    if not singles:
        L = R = frozenset(q_vs)
    else:
        drop_local = {next(iter(b.edges)) for b in singles}
        qloc = {orig: i for i, orig in enumerate(Q.origin)}
        drop_q = [qloc[h.origin[e]] for e in drop_local]
        L = component_of(Q, [v1], drop_edges=drop_q)
        R = component_of(Q, [v2], drop_edges=drop_q)
    single_edges = tuple((b.vertices, h.origin[next(iter(b.edges))]) for b in singles)
    return SideGraphs(Q, frozenset(L), frozenset(R), single_edges)


def restricted_vertices(d: RootedDecomposition, tp: str, t: str) -> frozenset[str]:
    """Vertex set of the restricted graph between t' (ancestor) and t."""
    path = d.tree_path(tp, t)
    vs = set(d.bags[tp]) | set(d.bags[t])
    inner = path[1:-1]
    if inner:
        adj: dict[str, set[str]] = {x: set() for x in d.bags}
        for c, p in d.parent.items():
            adj[c].add(p)
            adj[p].add(c)
        seen = {inner[0]}
        queue = deque([inner[0]])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y in (tp, t) or y in seen:
                    continue
                seen.add(y)
                queue.append(y)
        for x in seen:
            vs |= d.bags[x]
    return frozenset(vs)


@dataclass(frozen=True)
class Jump:
    path: tuple[str, ...]
    ambiguous: bool


def _jumps(d: RootedDecomposition, tp: str, t: str, paths, P: int, side_set: frozenset[str]) -> list[Jump]:
    g = d.host
    gp = restricted_vertices(d, tp, t)
    all_path_vs = set().union(*(set(w) for w in paths))
    other_vs = set().union(*(set(w) for i, w in enumerate(paths) if i != P)) if len(paths) > 1 else set()
    shared = d.bags[tp] & d.bags[t]
    targets = sorted((other_vs - shared) & gp)
    interior = (gp - side_set) - all_path_vs
    starts = sorted(side_set & gp)
    out = []
    comp_list = components(g, within=interior)
    comp_of = {v: i for i, c in enumerate(comp_list) for v in c}
    Xt = d.bags[t]
    for s in starts:
        near = {}
        for _, o in g.incidence[s]:
            if o in comp_of:
                near.setdefault(comp_of[o], o)
        for y in targets:
            if y == s:
                continue
            path = None
            if y in g.neighbours[s]:
                path = (s, y)
            else:
                for ci, entry in sorted(near.items()):
                    if g.neighbours[y] & comp_list[ci]:
                        mid = _bfs(g, entry, g.neighbours[y] & comp_list[ci], comp_list[ci])
                        path = (s,) + mid + (y,)
                        break
            if path is not None:
                out.append(Jump(path, s in Xt and y in Xt))
    return out


def _bfs(g: Multigraph, start: str, goals, allowed) -> tuple[str, ...]:
    prev = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if x in goals:
            out = [x]
            while prev[out[-1]] is not None:
                out.append(prev[out[-1]])
            return tuple(out[::-1])
        for y in sorted(g.neighbours[x]):
            if y in allowed and y not in prev:
                prev[y] = x
                queue.append(y)
    raise GraphError("no path")


def _pair_paths(d, tp, t, paths):
    return [subpath(p, d.bags[tp], d.bags[t]) for p in paths]


def find_jumps(d: RootedDecomposition, tp: str, t: str, paths, P: int, side: str) -> list[Jump]:
    """One representative jump per (start, end) pair; ambiguity depends only on the ends.
    `paths` may span a longer range; the pieces between X_t' and X_t are used."""
    sub = _pair_paths(d, tp, t, paths)
    if set(sub[P]) & d.bags[t] == set(sub[P]) & d.bags[tp]:
        raise StripError("member meets both bags in the same vertices")
    sg = qlr_graphs(d.host, sub, P)
    if side == "parent":
        return _jumps(d, tp, t, sub, P, sg.R)
    if side == "child":
        return _jumps(d, tp, t, sub, P, sg.L)
    raise StripError("side must be 'parent' or 'child'")


def _no_two_paths(d, tp, t, sub, P) -> bool:
    g = d.host
    p = sub[P]
    others = set().union(*(set(w) for i, w in enumerate(sub) if i != P)) if len(sub) > 1 else set()
    h = g.subgraph(g.vset - others)
    avoid = (d.bags[t] | d.bags[tp]) - {p[0], p[-1]}
    return not two_edge_disjoint_paths(h, p[0], p[-1], avoid & h.vset)


def classify_static(d: RootedDecomposition, tp: str, t: str, paths) -> list[dict]:
    sub = _pair_paths(d, tp, t, paths)
    out = []
    for i, p in enumerate(sub):
        if set(p) & d.bags[t] == set(p) & d.bags[tp]:
            out.append({"parent_side_static": False, "child_side_static": False, "applicable": False})
            continue
        bridge = _no_two_paths(d, tp, t, sub, i)
        sg = qlr_graphs(d.host, sub, i)
        pj = _jumps(d, tp, t, sub, i, sg.R)
        cj = [j for j in _jumps(d, tp, t, sub, i, sg.L) if not j.ambiguous]
        out.append({"parent_side_static": bridge and not pj,
                    "child_side_static": bridge and not cj,
                    "applicable": True})
    return out


def _unique_single(sg: SideGraphs, side_set: frozenset[str], g: Multigraph):
    hits = [(v, eid) for vs, eid in sg.single_edges for v in vs if v in side_set]
    if len(hits) != 1:
        raise StripError("no unique single-edge block next to the side graph")
    return hits[0]


def member_parent_separation(d: RootedDecomposition, tp: str, t: str, paths, P: int) -> Separation:
    """(L_P, M_P) for a parent-side static member."""
    g = d.host
    sub = _pair_paths(d, tp, t, paths)
    sg = qlr_graphs(g, sub, P)
    w, e = _unique_single(sg, sg.R, g)
    vP = sub[P][-1]
    keep = g.vset - (d.bags[t] - {vP})
    Rp = component_of(g, sg.R, within=keep, drop_edges=[e])
    L = d.down(t) - (Rp - {w})
    M = d.up(t) | Rp
    return make_separation(g, L, M)


def member_child_separation(d: RootedDecomposition, tp: str, t: str, paths, P: int) -> Separation:
    """(L'_P, M'_P) for a child-side static member, taken around t'."""
    g = d.host
    sub = _pair_paths(d, tp, t, paths)
    sg = qlr_graphs(g, sub, P)
    w, e = _unique_single(sg, sg.L, g)
    a, b = g.edges[e]
    w2 = b if a == w else a
    uP = sub[P][0]
    keep = g.vset - (d.bags[tp] - {uP})
    Lp = component_of(g, sg.L, within=keep, drop_edges=[e])
    L = d.down(tp) | Lp | {w2}
    M = d.up(tp) - Lp
    return make_separation(g, L, M)


def side_progress(d: RootedDecomposition, t: str, tp: str, tpp: str | None, paths, side: str,
                  allow_empty: bool = False) -> Separation:
    """Parent side: progress of t w.r.t. t'. Child side: progress of t' w.r.t. t and t''.
    `paths` must run from the earliest involved bag to X_t."""
    g = d.host
    if side == "parent":
        flags = classify_static(d, tp, t, paths)
        members = [i for i, f in enumerate(flags) if f["parent_side_static"]]
        if not members:
            if allow_empty:
                return d.separation(t)
            raise StripError("no parent-side static member")
        seps = [member_parent_separation(d, tp, t, paths, i) for i in members]
        A = frozenset.intersection(*(s.A for s in seps))
        B = frozenset.union(*(s.B for s in seps))
        return make_separation(g, A, B)
    if side == "child":
        if tpp is None:
            raise StripError("child-side progress needs t''")
        cflags = classify_static(d, tp, t, paths)
        pflags = classify_static(d, tpp, tp, paths)
        members = [i for i in range(len(paths))
                   if cflags[i]["child_side_static"] and not pflags[i]["parent_side_static"]]
        if not members:
            if allow_empty:
                return d.separation(tp)
            raise StripError("no qualifying child-side static member")
        seps = [member_child_separation(d, tp, t, paths, i) for i in members]
        A = frozenset.union(*(s.A for s in seps))
        B = frozenset.intersection(*(s.B for s in seps))
        return make_separation(g, A, B)
    raise StripError("side must be 'parent' or 'child'")


def progress_hypotheses(d: RootedDecomposition, t1: str, t2: str, t3: str, paths, r: int) -> str | None:
    """None if the progress-shift hypotheses hold, else the failing clause."""
    if not (is_precursor(d, t1, t2) and is_precursor(d, t2, t3)):
        return "precursor chain"
    X1, X2, X3 = d.bags[t1], d.bags[t2], d.bags[t3]
    s = len(X1)
    if s < 1 or (X1 & X2) or (X1 & X3) or (X2 & X3):
        return "pairwise disjoint bags"
    if len(paths) != s:
        return "foundation path count"
    seen = set()
    for p in paths:
        if p[0] not in X1 or p[-1] not in X3 or seen & set(p):
            return "foundation paths"
        seen |= set(p)
        for x, y in zip(p, p[1:]):
            if y not in d.host.neighbours[x]:
                return "foundation paths"
    if not 0 <= r <= s:
        return "split index"
    pf = classify_static(d, t1, t2, paths)
    cf = classify_static(d, t2, t3, paths)
    for i in range(s):
        if i < r and not pf[i]["parent_side_static"]:
            return f"member {i} not parent-side static"
        if i >= r and (pf[i]["parent_side_static"] or not cf[i]["child_side_static"]):
            return f"member {i} not in the child-side static pattern"
    return None


def arrange_members(d: RootedDecomposition, t1: str, t2: str, t3: str, paths):
    """Reorder members as the progress-shift pattern needs; None if impossible."""
    pf = classify_static(d, t1, t2, paths)
    cf = classify_static(d, t2, t3, paths)
    first = [p for p, f in zip(paths, pf) if f["parent_side_static"]]
    rest = [p for p, f, c in zip(paths, pf, cf) if not f["parent_side_static"] and c["child_side_static"]]
    if len(first) + len(rest) != len(paths):
        return None
    return first + rest, len(first)


def progress_shift(d: RootedDecomposition, t1: str, t2: str, t3: str, paths, r: int) -> Separation:
    err = progress_hypotheses(d, t1, t2, t3, paths, r)
    if err:
        raise StripError(f"hypothesis fails: {err}")
    g = d.host
    X2 = d.bags[t2]
    L, M = _progress_pair(d, t1, t2, t3, paths, "parent")
    L2, M2 = _progress_pair(d, t1, t2, t3, paths, "child")
    left_vs = set().union(*(set(p) for p in paths[:r])) if r else set()
    right_vs = set().union(*(set(p) for p in paths[r:])) if r < len(paths) else set()
    Ls = L | ((d.up(t2) & L2) - (X2 & left_vs))
    Ms = M2 | ((d.down(t2) & M) - (X2 & right_vs))
    err = separation_violation(g, Ls, Ms)
    if err:
        raise StripError(f"conclusion fails: {err}")
    sep = Separation(frozenset(Ls), frozenset(Ms), g)
    if sep.order != len(X2) or not is_pseudo_edge_cut(sep, ()):
        raise StripError("conclusion fails: order or pointedness")
    if not (d.down(t1) <= sep.A and d.up(t3) <= sep.B):
        raise StripError("conclusion fails: containment")
    return sep


def _progress_pair(d, t1, t2, t3, paths, side):
    if side == "parent":
        s = side_progress(d, t2, t1, None, paths, "parent", allow_empty=True)
    else:
        s = side_progress(d, t3, t2, t1, paths, "child", allow_empty=True)
    return s.A, s.B


# breaking --------------------------------------------------------------------

def without(d: RootedDecomposition, Z: Iterable[str]) -> RootedDecomposition:
    """The decomposition of host - Z with Z removed from every bag."""
    Z = set(Z)
    g = d.host.subgraph(d.host.vset - Z)
    return RootedDecomposition(g, d.root, d.parent, {t: b - Z for t, b in d.bags.items()})


def coherent_subsequence(d: RootedDecomposition, strip: Strip) -> tuple[str, ...]:
    """Largest class of strip nodes with equal capped edge counts at every
    vertex of Z; every vertex of Z is coherent for all pairs in it."""
    from .separations import edges_into
    g = d.host
    classes: dict[tuple, list[str]] = {}
    for t in strip.nodes:
        s = d.separation(t)
        key = tuple((min(edges_into(g, z, s.A - s.B), 2), min(edges_into(g, z, s.B - s.A), 2))
                    for z in sorted(strip.Z))
        classes.setdefault(key, []).append(t)
    best = max(classes.values(), key=lambda c: (len(c), [-strip.nodes.index(x) for x in c]))
    return tuple(best)


def break_strip(d: RootedDecomposition, strip: Strip, alpha: int, max_vertices: int = 16):
    """A pseudo-edge-cut modulo Z of order |X_t1| that alpha-breaks the strip,
    with the stage that produced it ("progress" or "exhaustive"); None if none exists."""
    ns = strip.nodes
    h = len(ns)
    if h < 2 * alpha:
        return None
    k = len(d.bags[ns[0]])
    Z = strip.Z
    g = d.host
    # progress pipeline on the coherent subsequence, then on the full strip
    for seq in (coherent_subsequence(d, strip), ns):
        if len(seq) < 2 * alpha or alpha < 1:
            continue
        dz = without(d, Z)
        t1, t3 = seq[alpha - 1], seq[len(seq) - alpha]
        for t2 in seq[alpha:len(seq) - alpha]:
            ps = max_disjoint_paths(dz.host, dz.bags[t1], dz.bags[t3])
            if len(ps) != strip.s:
                continue
            try:
                arranged = arrange_members(dz, t1, t2, t3, list(ps.paths))
                if arranged is None:
                    continue
                paths, r = arranged
                sep = progress_shift(dz, t1, t2, t3, paths, r)
            except (StripError, SeparationError, GraphError):
                continue
            full = Separation(sep.A | Z, sep.B | Z, g)
            if (separation_violation(g, full.A, full.B) is None and full.order == k
                    and is_pseudo_edge_cut(full, Z) and alpha_breaks(full, strip, alpha, d)):
                return full, "progress"
    if g.n > max_vertices:
        raise StripError("host too large for exhaustive search")
    must_a = d.down(ns[alpha - 1])
    must_b = d.up(ns[h - alpha])
    table = SeparationTable(g, must_a, must_b, max_order=k)
    ok = table.pseudo_edge_cut_mask(Z) & (table.order == k)
    for i in range(len(table)):
        if ok[i]:
            sep = table.separation(i)
            if alpha_breaks(sep, strip, alpha, d):
                return sep, "exhaustive"
    return None
