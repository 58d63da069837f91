"""Separation shifting, incorporation, signatures, the two decomposition
improvements, edge normalisation and the refinement driver."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .flows import max_disjoint_count, max_disjoint_paths
from .graph import Multigraph, components
from .separations import (Separation, SeparationError, SeparationTable, anti_pointed, breadth_of,
                          from_mask, make_separation, pointed, reflection, separates,
                          separation_violation, strongly_separates, to_mask)
from .treedecomp import (RootedDecomposition, coherent_for, is_precursor, metrics, validate)


class RefineError(ValueError):
    pass


class SearchCapExceeded(RuntimeError):
    pass


# Lemma: shifting a separation onto subtrees ------------------------------------

def side_nodes(d: RootedDecomposition, t1: str, t2: str) -> list[str]:
    """Descendants of t1 that are neither ancestors nor descendants of t2."""
    anc2 = set(d.ancestors(t2))
    desc2 = d.descendants(t2)
    return [s for s in d.preorder if s in d.descendants(t1) and s not in anc2 and s not in desc2]


def _bad_nodes(d, t1, t2, A, B, sides):
    bad = []
    if not d.down(t1) <= A:
        bad.append(t1)
    if not d.up(t2) <= B:
        bad.append(t2)
    for s in sides:
        X, up = d.bags[s], d.up(s)
        if (X <= A or X <= B) and not (up <= A or up <= B):
            bad.append(s)
    return bad


def shift_separation(d: RootedDecomposition, t1: str, t2: str, sep: Separation) -> Separation:
    """Move components of G-(A&B) until t1, t2 and the side nodes are good."""
    g = d.host
    if not d.is_ancestor(t1, t2):
        raise RefineError(f"{t1} is not an ancestor of {t2}")
    A, B = set(sep.A), set(sep.B)
    if not d.bags[t1] <= A or not d.bags[t2] <= B:
        raise RefineError("need X_t1 inside A and X_t2 inside B")
    err = separation_violation(g, A, B)
    if err:
        raise RefineError(err)
    C = A & B
    comps = components(g, within=g.vset - C)
    sides = side_nodes(d, t1, t2)

    def move(target: set, other: set, region: frozenset):
        for comp in comps:
            if comp & (region - target):
                target |= comp
                other -= comp

    for _ in range(len(d.bags) * (len(comps) + 1) + 2):
        bad = _bad_nodes(d, t1, t2, A, B, sides)
        if not bad:
            return make_separation(g, A, B)
        s = bad[0]
        if s == t1 and not d.down(t1) <= A:
            move(A, B, d.down(t1))
        elif s == t2 and not d.up(t2) <= B:
            move(B, A, d.up(t2))
        elif d.bags[s] <= A:
            move(A, B, d.up(s))
        else:
            move(B, A, d.up(s))
    raise RefineError("shifting did not terminate")


def shift_conclusion_violation(d: RootedDecomposition, t1: str, t2: str, before: Separation,
                               after: Separation) -> str | None:
    """Check the three shifting conclusions verbatim."""
    if separation_violation(d.host, after.A, after.B):
        return "not a separation"
    if after.A & after.B != before.A & before.B:
        return "(i) boundary changed"
    if not (d.down(t1) <= after.A and d.up(t2) <= after.B):
        return "(ii) containment"
    for s in side_nodes(d, t1, t2):
        X, up = d.bags[s], d.up(s)
        if (X <= after.A or X <= after.B) and not (up <= after.A or up <= after.B):
            return f"(iii) side node {s}"
    return None


# incorporation and signatures ------------------------------------------------------

@dataclass(frozen=True)
class WitnessSet:
    nodes: tuple[str, ...]


class _NodeIndex:
    """Per-node separations as bitmasks with breadths and weights."""

    def __init__(self, d: RootedDecomposition):
        self.d = d
        g = d.host
        self.nodes = list(d.nodes)
        self.B = []
        self.breadth = []
        for t in self.nodes:
            s = d.separation(t)
            b = breadth_of(s, g)
            self.B.append(to_mask(g, s.B))
            self.breadth.append((b.order, b.thickness))
        self.weight = [1 << (i * i + j) for i, j in self.breadth]
        self.Barr = np.array(self.B, dtype=np.int64) if self.nodes else np.zeros(0, np.int64)
        self.border = np.array([b[0] for b in self.breadth], dtype=np.int64)
        self.bthick = np.array([b[1] for b in self.breadth], dtype=np.int64)


def _min_cover(target: int, cands: list[tuple[int, int, int]], budget: int, cap: int):
    """Minimum-weight cover of `target` by candidate masks (mask, weight, id);
    returns (weight, ids) or None when the minimum exceeds budget."""
    steps = [0]

    @lru_cache(maxsize=None)
    def best(unc: int):
        steps[0] += 1
        if steps[0] > cap:
            raise SearchCapExceeded("incorporation search cap exceeded")
        if unc == 0:
            return (0, ())
        low = unc & -unc
        out = None
        for mask, w, i in cands:
            if mask & low:
                sub = best(unc & ~mask)
                if sub is None:
                    continue
                tot = sub[0] + w
                if tot <= budget and (out is None or tot < out[0] or (tot == out[0] and (i,) + sub[1] < out[1])):
                    out = (tot, tuple(sorted((i,) + sub[1])))
        return out

    return best(target)


def _incorporated_masks(idx: _NodeIndex, Bmask: int, order: int, thick: int, cap: int):
    budget = 1 << (order * order + thick)
    if Bmask == 0:
        return ()
    cands = []
    union = 0
    for i, (bm, br, w) in enumerate(zip(idx.B, idx.breadth, idx.weight)):
        if bm & ~Bmask == 0 and br <= (order, thick) and bm:
            cands.append((bm, w, i))
            union |= bm
    if union != Bmask:
        return None
    cands.sort(key=lambda c: (c[1], c[2]))
    res = _min_cover(Bmask, cands, budget, cap)
    if res is None:
        return None
    return res[1]


def _antichain(d: RootedDecomposition, nodes: list[str]) -> list[str]:
    keep = []
    for t in nodes:
        if not any(o != t and d.is_ancestor(o, t) for o in nodes):
            keep.append(t)
    return keep


def is_incorporated(d: RootedDecomposition, sep: Separation, cap: int = 200000,
                    index: _NodeIndex | None = None) -> WitnessSet | None:
    g = d.host
    idx = index or _NodeIndex(d)
    b = breadth_of(sep, g)
    res = _incorporated_masks(idx, to_mask(g, sep.B), b.order, b.thickness, cap)
    if res is None:
        return None
    nodes = _antichain(d, [idx.nodes[i] for i in res])
    return WitnessSet(tuple(sorted(nodes)))


def witness_violation(d: RootedDecomposition, sep: Separation, S: Iterable[str]) -> str | None:
    """Independent INC1-INC3 check."""
    g = d.host
    S = list(S)
    b = breadth_of(sep, g)
    total = 0
    union = set()
    for t in S:
        bt = breadth_of(d.separation(t), g)
        if bt.key() > b.key():
            return f"INC1 fails at {t}"
        union |= d.up(t)
        total += 2 ** (bt.order ** 2 + bt.thickness)
    if union != set(sep.B):
        return "INC2 fails"
    if total > 2 ** (b.order ** 2 + b.thickness):
        return "INC3 fails"
    return None


@dataclass
class Signature:
    max_order: int
    counts: dict = field(default_factory=dict)  # (i, j) -> count

    def get(self, i, j):
        return self.counts.get((i, j), 0)

    def as_list(self) -> list[list[int]]:
        return [[i, j, self.get(i, j)] for i in range(self.max_order + 1) for j in range(i + 1)]

    def __eq__(self, other):
        return isinstance(other, Signature) and self.as_list() == other.as_list()


MAX_SIGNATURE_VERTICES = 11


def signature(d: RootedDecomposition, max_order: int | None = None, cap: int = 200000) -> Signature:
    """Counts of incorporated separations by breadth, over all separations of
    order at most max_order (default: all orders)."""
    g = d.host
    if g.n > MAX_SIGNATURE_VERTICES:
        raise RefineError(f"signature enumeration is capped at {MAX_SIGNATURE_VERTICES} vertices")
    mo = g.n if max_order is None else max_order
    table = SeparationTable(g, max_order=mo)
    idx = _NodeIndex(d)
    counts: dict = {}
    for r in range(len(table)):
        o, th = int(table.order[r]), int(table.thickness[r])
        if _incorporated_masks(idx, int(table.B[r]), o, th, cap) is not None:
            counts[(o, th)] = counts.get((o, th), 0) + 1
    return Signature(mo, counts)


def compare_signatures(b: Signature, b2: Signature) -> str:
    """'greater' if b2 is greater than b, 'less' if b is greater, else 'equal'."""
    if b.max_order != b2.max_order:
        raise RefineError("signatures have different max orders")
    for i in range(b.max_order + 1):
        for j in range(i + 1):
            x, y = b.get(i, j), b2.get(i, j)
            if x != y:
                return "greater" if y > x else "less"
    return "equal"


# linkedness ------------------------------------------------------------------

def inseparable_vertices(d: RootedDecomposition, X: Iterable[str], candidates: Iterable[str], below) -> list[str]:
    """Vertices of `candidates` that no node separation with key below `below`
    separates from X. `below` is a callable on (order, thickness)."""
    g = d.host
    X = frozenset(X)
    seps = []
    for t in d.nodes:
        s = d.separation(t)
        b = breadth_of(s, g)
        if below((b.order, b.thickness)):
            seps.append(s)
    out = []
    for v in sorted(candidates):
        if not any(separates(s, X, {v}) for s in seps):
            out.append(v)
    return out


def precursor_pairs(d: RootedDecomposition) -> list[tuple[str, str]]:
    out = []
    for t1 in d.preorder:
        for t2 in d.preorder:
            if is_precursor(d, t1, t2):
                out.append((t1, t2))
    return out


def linked_violations(d: RootedDecomposition, N: int) -> list[tuple[str, str]]:
    out = []
    for t1, t2 in precursor_pairs(d):
        k = len(d.bags[t1])
        if max_disjoint_count(d.host, d.down(t1), d.up(t2), limit=k) >= k:
            continue
        free = inseparable_vertices(d, d.down(t1), d.up(t2), lambda b, k=k: b[0] < k)
        if len(free) >= N:
            out.append((t1, t2))
    return out


def is_N_linked(d: RootedDecomposition, N: int) -> bool:
    return not linked_violations(d, N)


def weakly_linked_failures(d: RootedDecomposition, N: int) -> list[tuple[str, ...]]:
    """Precursor chains of N+1 distinct bags whose first two bags are not fully linked."""
    fails = []
    succ: dict[str, list[str]] = {t: [] for t in d.nodes}
    for a, b in precursor_pairs(d):
        succ[a].append(b)

    def chains(prefix):
        if len(prefix) == N + 1:
            yield tuple(prefix)
            return
        for b in succ[prefix[-1]]:
            if all(d.bags[b] != d.bags[x] for x in prefix):
                prefix.append(b)
                yield from chains(prefix)
                prefix.pop()

    for t in d.preorder:
        for ch in chains([t]):
            k = len(d.bags[ch[0]])
            if max_disjoint_count(d.host, d.bags[ch[0]], d.bags[ch[1]], limit=k) < k:
                fails.append(ch)
    return fails


def _tree_distances(d: RootedDecomposition, sources: Iterable[str]) -> dict[str, int]:
    adj: dict[str, list[str]] = {t: [] for t in d.bags}
    for c, p in d.parent.items():
        adj[c].append(p)
        adj[p].append(c)
    dist = {s: 0 for s in sources}
    queue = deque(sorted(dist))
    while queue:
        x = queue.popleft()
        for y in sorted(adj[x]):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def _anchor_nodes(d: RootedDecomposition, path_nodes) -> dict[str, str]:
    """t_v: a node containing v closest to the given tree path."""
    dist = _tree_distances(d, path_nodes)
    out = {}
    for v in d.host.vertices:
        holders = [t for t in d.nodes if v in d.bags[t]]
        out[v] = min(holders, key=lambda t: (dist[t], t))
    return out


def unlinked_separations(d: RootedDecomposition, t1: str, t2: str) -> list[Separation]:
    """Minimum-order separations with down(t1) in A and up(t2) in B, least
    total anchor distance first, each shifted onto the subtrees."""
    g = d.host
    k = max_disjoint_count(g, d.down(t1), d.up(t2))
    if k >= len(d.bags[t1]):
        return []
    table = SeparationTable(g, d.down(t1), d.up(t2), max_order=k)
    dist = _tree_distances(d, d.tree_path(t1, t2))
    dv = {v: min(dist[t] for t in d.nodes if v in d.bags[t]) for v in g.vertices}
    rows = [r for r in range(len(table)) if table.order[r] == k]
    rows.sort(key=lambda r: sum(dv[v] for v in from_mask(g, int(table.A[r]) & int(table.B[r]))))
    out = []
    best = None
    for r in rows:
        s = table.separation(r)
        cost = sum(dv[v] for v in s.boundary)
        if best is None:
            best = cost
        if cost > best:
            break
        out.append(shift_separation(d, t1, t2, s))
    uniq = []
    for s in out:
        if s not in uniq:
            uniq.append(s)
    return uniq


def relabel(d: RootedDecomposition, prefix: str = "n") -> RootedDecomposition:
    names = {t: f"{prefix}{i:03d}" for i, t in enumerate(d.preorder)}
    return RootedDecomposition(d.host, names[d.root], {names[c]: names[p] for c, p in d.parent.items()},
                               {names[t]: b for t, b in d.bags.items()}, d.alpha)


def improve_unlinked(d: RootedDecomposition, t1: str, t2: str, sep: Separation) -> RootedDecomposition:
    g = d.host
    if not is_precursor(d, t1, t2):
        raise RefineError(f"{t1} is not a precursor of {t2}")
    A, B = sep.A, sep.B
    if separation_violation(g, A, B):
        raise RefineError("witness is not a separation")
    if sep.order >= len(d.bags[t1]):
        raise RefineError("witness order must be below the bag size")
    if not (d.down(t1) <= A and d.up(t2) <= B):
        raise RefineError("witness must contain down(t1) and up(t2)")
    C = A & B
    tv = _anchor_nodes(d, d.tree_path(t1, t2))
    path_to_t2 = {v: set(d.tree_path(tv[v], t2)) for v in C}
    path_from_t1 = {v: set(d.tree_path(t1, tv[v])) for v in C}
    sub = d.descendants(t1)
    bags, parent = {}, {}
    for t in d.nodes:
        bags["a" + t] = (d.bags[t] & A) | {v for v in C if t in path_to_t2[v]}
        if t in d.parent:
            parent["a" + t] = "a" + d.parent[t]
    for t in sub:
        bags["b" + t] = (d.bags[t] & B) | {v for v in C if t in path_from_t1[v]}
        if t != t1:
            parent["b" + t] = "b" + d.parent[t]
    bags["star"] = frozenset(C)
    parent["star"] = "a" + t2
    parent["b" + t1] = "star"
    out = RootedDecomposition(g, "a" + d.root, parent, bags)
    bad = validate(out)
    if bad:
        raise RefineError(f"construction is not a decomposition: {bad}")
    return out


# integration -------------------------------------------------------------------

def _breadth_key(d: RootedDecomposition, t: str) -> tuple[int, int]:
    b = breadth_of(d.separation(t), d.host)
    return (b.order, b.thickness)


def integration_chains(d: RootedDecomposition):
    """Ancestor chains t0..t3 with equal bag sizes, full linkage between the
    ends, equal pairwise intersections and coherent common vertices."""
    g = d.host
    for t0 in d.preorder:
        k = len(d.bags[t0])
        desc0 = [t for t in d.preorder if t in d.descendants(t0) and len(d.bags[t]) == k]
        for t1 in desc0:
            for t2 in [t for t in desc0 if t in d.descendants(t1)]:
                for t3 in [t for t in desc0 if t in d.descendants(t2)]:
                    ts = (t0, t1, t2, t3)
                    common = frozenset.intersection(*(d.bags[t] for t in ts))
                    if any(d.bags[a] & d.bags[b] != common for a, b in combinations(ts, 2)):
                        continue
                    if max_disjoint_count(g, d.bags[t0], d.bags[t3], limit=k) < k:
                        continue
                    if not all(coherent_for(d, v, t0, t3) for v in common):
                        continue
                    yield ts


def _strong_separations(d: RootedDecomposition, t1: str, t2: str, order: int, thick: int) -> list[Separation]:
    g = d.host
    table = SeparationTable(g, d.down(t1), d.up(t2), max_order=order)
    out = []
    U, V = d.down(t1), d.up(t2)
    for r in range(len(table)):
        if table.order[r] == order and table.thickness[r] == thick:
            s = table.separation(r)
            if strongly_separates(s, U, V, g):
                out.append(s)
    return out


def integrated_violations(d: RootedDecomposition, N: int) -> list[dict]:
    g = d.host
    out = []
    for ts in integration_chains(d):
        t0, t1, t2, t3 = ts
        s3 = d.separation(t3)
        k = sum(1 for v in d.bags[t0] & d.bags[t3] if not pointed(g, s3, v))
        beta = (len(d.bags[t1]), k)
        seps = _strong_separations(d, t1, t2, beta[0], beta[1])
        if not seps:
            continue
        free = inseparable_vertices(d, d.down(t0), d.up(t3), lambda b, beta=beta: b < beta)
        if len(free) < N:
            continue
        if any(_breadth_key(d, t) == beta for t in d.tree_path(t0, t3)):
            continue
        out.append({"chain": ts, "breadth": beta, "separations": seps})
    return out


def is_N_integrated(d: RootedDecomposition, N: int) -> bool:
    return not integrated_violations(d, N)


def _doubly(g, s, v):
    return pointed(g, s, v) and anti_pointed(g, s, v)


def _matching(g: Multigraph, us: list[str], vs: list[str]) -> dict[str, str] | None:
    """Perfect matching u -> v along edges, or None."""
    match: dict[str, str] = {}

    def try_u(u, seen):
        for v in vs:
            if v in g.neighbours[u] and v not in seen:
                seen.add(v)
                if v not in match or try_u(match[v], seen):
                    match[v] = u
                    return True
        return False

    for u in us:
        if not try_u(u, set()):
            return None
    return {u: v for v, u in match.items()}


@dataclass
class IntegrationPair:
    sep1: Separation
    sep2: Separation
    rank: tuple


def integration_pairs(d: RootedDecomposition, ts: Sequence[str], order: int, thick: int,
                      require_unincorporated: bool = True) -> list[IntegrationPair]:
    """All pairs ((A1,B1),(A2,B2)) meeting conditions (a)-(e), ranked by (f),(g),(h)."""
    g = d.host
    t0, t1, t2, t3 = ts
    Z = d.bags[t0] & d.bags[t3]
    paths = max_disjoint_paths(g, d.bags[t0], d.bags[t3]).paths
    pv = set().union(*(set(p) for p in paths)) if paths else set()
    GA = d.down(t0) | (d.down(t1) & pv)
    GB = d.up(t3) | (d.up(t2) & pv)
    anc3 = set(d.ancestors(t3))
    e_nodes = [t for t in d.preorder if t in d.descendants(t0) and t not in anc3]
    sides = side_nodes(d, t0, t3)
    dist = _tree_distances(d, d.tree_path(t0, t3))
    idx = _NodeIndex(d)
    node_seps = {d.separation(t) for t in d.nodes}
    table = SeparationTable(g, GA, d.up(t3), max_order=order)
    out = []
    for r in range(len(table)):
        if table.order[r] != order or table.thickness[r] != thick:
            continue
        s2 = table.separation(r)
        bd = s2.boundary
        if not Z <= bd or any(not pointed(g, s2, v) for v in bd - Z):
            continue
        if require_unincorporated:
            if s2 in node_seps:
                continue
            if _incorporated_masks(idx, int(table.B[r]), order, thick, 200000) is not None:
                continue
        dbl = sorted(v for v in bd - Z if _doubly(g, s2, v))
        for size in range(len(dbl) + 1):
            for W in combinations(dbl, size):
                W = frozenset(W)
                rest = bd - (W | Z)
                if any(g.neighbours[w] & rest for w in W):
                    continue
                try:
                    s1 = reflection(s2, Z, W, g)
                except SeparationError:
                    continue
                if any(not anti_pointed(g, s1, v) for v in s1.boundary - Z):
                    continue
                if not (d.down(t0) <= s1.A and d.up(t3) <= s2.B):
                    continue
                if not (GA <= s2.A and GB <= s1.B):
                    continue
                if not _cond_e(d, e_nodes, s1, s2):
                    continue
                us = sorted(s1.boundary - s2.boundary)
                vs = sorted(s2.boundary - s1.boundary)
                if len(us) != len(vs) or _matching(g, us, vs) is None:
                    continue
                out.append(IntegrationPair(s1, s2, _rank(d, g, sides, dist, s1, s2, pv)))
    out.sort(key=lambda p: p.rank)
    return out


def _cond_e(d, nodes, s1, s2) -> bool:
    for t in nodes:
        X, up = d.bags[t], d.up(t)
        if (X <= s1.A or X <= s2.B) and not (up <= s1.A or up <= s2.B):
            return False
    return True


def _rank(d, g, sides, dist, s1, s2, pv):
    C1, C2 = s1.boundary, s2.boundary
    nT = len(d.bags)
    f_bad, g_sum, h_bad = 0, 0, 0
    for t in sides:
        At = d.down(t)
        fb = bool((C1 & C2) - At)
        if not fb:
            for u in C1 - (C2 | At):
                if g.neighbours[u] & (C2 - (C1 | At)):
                    fb = True
                    break
        if fb:
            f_bad += 1
            continue
        gb = False
        for x in (C2 & d.bags[t]) - C1:
            if g.neighbours[x] & (C1 - (C2 | At)) and g.neighbours[x] & (s2.B - (s2.A | At | pv)):
                gb = True
        for x in (C1 & d.bags[t]) - C2:
            if g.neighbours[x] & (C2 - (C1 | At)) and g.neighbours[x] & (s1.A - (s1.B | At | pv)):
                gb = True
        if gb:
            g_sum += (nT + 1) ** dist[t]
        if (C1 - At) or (C2 - At):
            h_bad += 1
    return (f_bad, g_sum, h_bad, sorted(s2.A), sorted(s2.B), sorted(s1.A), sorted(s1.B))


def improve_unintegrated(d: RootedDecomposition, ts: Sequence[str], sep1: Separation,
                         sep2: Separation) -> RootedDecomposition:
    """Tree T' + path q0..q(k+1) + T'' with the four bag rules."""
    g = d.host
    t0, t1, t2, t3 = ts
    C1, C2 = sep1.boundary, sep2.boundary
    us = sorted(C1 - C2)
    vs = sorted(C2 - C1)
    if len(us) != len(vs):
        raise RefineError("boundaries differ in size")
    m = _matching(g, us, vs)
    if m is None:
        raise RefineError("no matching between the boundaries")
    k = len(us)
    vlist = [m[u] for u in us]
    common = C1 & C2
    tv = _anchor_nodes(d, d.tree_path(t0, t3))
    to_t3 = {v: set(d.tree_path(tv[v], t3)) for v in C1}
    to_t0 = {v: set(d.tree_path(tv[v], t0)) for v in C2}
    bags, parent = {}, {}
    for t in d.nodes:
        bags["a" + t] = (d.bags[t] & sep1.A) | {v for v in C1 if t in to_t3[v]}
        if t in d.parent:
            parent["a" + t] = "a" + d.parent[t]
    for t in d.descendants(t0):
        bags["b" + t] = (d.bags[t] & sep2.B) | {v for v in C2 if t in to_t0[v]}
        if t != t0:
            parent["b" + t] = "b" + d.parent[t]
    q = [f"q{i:02d}" for i in range(k + 2)]
    bags[q[0]] = frozenset(C1)
    bags[q[-1]] = frozenset(C2)
    for i in range(1, k + 1):
        bags[q[i]] = frozenset(vlist[:i]) | frozenset(us[i - 1:]) | common
    parent[q[0]] = "a" + t3
    for i in range(1, k + 2):
        parent[q[i]] = q[i - 1]
    parent["b" + t0] = q[-1]
    out = RootedDecomposition(g, "a" + d.root, parent, bags)
    bad = validate(out)
    if bad:
        raise RefineError(f"construction is not a decomposition: {bad}")
    return out


# normalisation and driver --------------------------------------------------------

def normalize_edges(d: RootedDecomposition) -> RootedDecomposition:
    bags = dict(d.bags)
    parent = dict(d.parent)
    for c, p in sorted(d.parent.items()):
        if not (d.bags[c] <= d.bags[p] or d.bags[p] <= d.bags[c]):
            mid = f"{c}^"
            while mid in bags:
                mid += "^"
            bags[mid] = d.bags[c] & d.bags[p]
            parent[mid] = p
            parent[c] = mid
    return RootedDecomposition(d.host, d.root, parent, bags, d.alpha)


@dataclass
class DriverResult:
    decomposition: RootedDecomposition
    trace: list
    status: str  # "done", "stuck" or "step-limit"


def _width(d):
    return metrics(d)["width"]


def improvement_candidates(d: RootedDecomposition, N: int):
    """Yield (kind, witness, new decomposition) in canonical order."""
    for t1, t2 in linked_violations(d, N):
        for sep in unlinked_separations(d, t1, t2):
            if is_incorporated(d, sep) is not None:
                continue
            try:
                nd = improve_unlinked(d, t1, t2, sep)
            except RefineError:
                continue
            yield "unlinked", {"nodes": [t1, t2], "separation": sep.to_obj()}, nd
    for viol in integrated_violations(d, N):
        ts = viol["chain"]
        for pair in integration_pairs(d, ts, *viol["breadth"]):
            try:
                nd = improve_unintegrated(d, ts, pair.sep1, pair.sep2)
            except RefineError:
                continue
            yield "unintegrated", {"nodes": list(ts), "separation": pair.sep2.to_obj(),
                                   "reflection": pair.sep1.to_obj()}, nd
            break


def refine_driver(g: Multigraph, initial: RootedDecomposition, N: int, max_order: int | None = None,
                  max_steps: int = 200, max_backtracks: int = 32) -> DriverResult:
    """Improve until N-linked, N-integrated and edge-nested.

    Each improvement must raise the signature without raising the width.
    When no candidate of the current state works, the search backs up to
    the most recent state with an untried candidate, up to max_backtracks
    times; the returned trace is the successful path only.
    """
    if validate(initial):
        raise RefineError(f"initial decomposition invalid: {validate(initial)}")
    w0 = _width(initial)

    def successors(d, sig):
        for kind, witness, nd in improvement_candidates(d, N):
            if _width(nd) > w0:
                continue
            nsig = signature(nd, max_order)
            if compare_signatures(sig, nsig) != "greater":
                continue
            yield relabel(nd), nsig, {"step": kind, "witness": witness, "signature": nsig.as_list()}

    # stack frames: (decomposition, signature, trace so far, candidate iterator)
    d, sig, trace = initial, signature(initial, max_order), []
    stack = []
    backtracks = 0
    steps = 0
    deepest = (d, trace)
    while steps < max_steps:
        steps += 1
        if linked_violations(d, N) or integrated_violations(d, N):
            it = successors(d, sig)
            stack.append((d, sig, trace, it))
        elif not metrics(d)["nested_edges"]:
            d = relabel(normalize_edges(d))
            sig = signature(d, max_order)
            trace = trace + [{"step": "normalize", "witness": None, "signature": sig.as_list()}]
            continue
        else:
            return DriverResult(d, trace, "done")
        while stack:
            _, _, base, it = stack[-1]
            nxt = next(it, None)
            if nxt is not None:
                d, sig, entry = nxt
                trace = base + [entry]
                if len(trace) > len(deepest[1]):
                    deepest = (d, trace)
                break
            stack.pop()
            if stack:
                backtracks += 1
                if backtracks > max_backtracks:
                    stack.clear()
        else:
            return DriverResult(deepest[0], deepest[1], "stuck")
    return DriverResult(d, trace, "step-limit")
