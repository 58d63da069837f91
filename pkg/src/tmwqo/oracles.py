"""Exhaustive reference implementations for small instances.

Nothing here calls the search or flow code it is used to check."""
from __future__ import annotations

from itertools import combinations, permutations, product

from .graph import Multigraph


def _reaches(g: Multigraph, X, Y, removed) -> bool:
    seen = {x for x in X if x not in removed}
    if seen & set(Y):
        return True
    stack = list(seen)
    while stack:
        x = stack.pop()
        for a, b in g.edges:
            for u, w in ((a, b), (b, a)):
                if u == x and w not in removed and w not in seen:
                    if w in Y:
                        return True
                    seen.add(w)
                    stack.append(w)
    return False


def min_separator_size(g: Multigraph, X, Y) -> int:
    """Smallest vertex set meeting every X-Y path (X and Y may overlap)."""
    vs = list(g.vertices)
    for k in range(len(vs) + 1):
        for S in combinations(vs, k):
            if not _reaches(g, X, Y, set(S)):
                return k
    return len(vs)


def cut_vertices(g: Multigraph) -> set[str]:
    def comps(removed):
        left = set(g.vertices) - removed
        n = 0
        while left:
            n += 1
            stack = [left.pop()]
            while stack:
                x = stack.pop()
                for a, b in g.edges:
                    for u, w in ((a, b), (b, a)):
                        if u == x and w in left:
                            left.discard(w)
                            stack.append(w)
        return n

    base = comps(set())
    return {v for v in g.vertices if comps({v}) > base}


def decomposition_is_valid(g: Multigraph, parent: dict, bags: dict) -> bool:
    nodes = set(bags)
    if not nodes:
        return False
    roots = nodes - set(parent)
    if len(roots) != 1 or any(p not in nodes for p in parent.values()):
        return False
    # acyclic
    for t in nodes:
        seen, x = set(), t
        while x in parent:
            if x in seen:
                return False
            seen.add(x)
            x = parent[x]
    if set().union(*bags.values()) != set(g.vertices):
        return False
    for a, b in g.edges:
        if not any(a in B and b in B for B in bags.values()):
            return False
    for v in g.vertices:
        hold = {t for t in nodes if v in bags[t]}
        # connected iff exactly one holder has its parent outside the set
        tops = [t for t in hold if parent.get(t) not in hold]
        if len(tops) != 1:
            return False
    return True


def _side_edges(g: Multigraph, v: str, side) -> int:
    return sum((a == v and b in side) + (b == v and a in side) - (a == v and b == v and v in side)
               for a, b in g.edges)


def breadth(g: Multigraph, A, B) -> tuple[int, int]:
    A, B = set(A), set(B)
    C = A & B
    thick = sum(1 for v in C if _side_edges(g, v, A - B) >= 2)
    return len(C), thick


def all_separations(g: Multigraph):
    """Every (A, B) with A | B = V and no edge between A-B and B-A."""
    vs = list(g.vertices)
    for assign in product((0, 1, 2), repeat=len(vs)):  # 0: A-B, 1: B-A, 2: both
        A = {v for v, s in zip(vs, assign) if s != 1}
        B = {v for v, s in zip(vs, assign) if s != 0}
        if any((a in A - B and b in B - A) or (b in A - B and a in B - A) for a, b in g.edges):
            continue
        yield frozenset(A), frozenset(B)


def _up_down(parent: dict, bags: dict, t: str):
    desc = {t}
    changed = True
    while changed:
        changed = False
        for c, p in parent.items():
            if p in desc and c not in desc:
                desc.add(c)
                changed = True
    up = set().union(*(bags[s] for s in desc))
    down = set(bags[t]).union(*(bags[s] for s in bags if s not in desc))
    return frozenset(down), frozenset(up)


def _node_info(parent: dict, bags: dict, g: Multigraph):
    out = []
    for t in sorted(bags):
        down, up = _up_down(parent, bags, t)
        out.append((up, breadth(g, down, up)))
    return out


def incorporated(g: Multigraph, parent: dict, bags: dict, A, B, info=None) -> bool:
    """Witness-set existence by enumerating node subsets (nodes that cannot
    belong to any witness set are dropped first)."""
    b = breadth(g, A, B)
    B = frozenset(B)
    limit = 2 ** (b[0] ** 2 + b[1])
    info = info if info is not None else _node_info(parent, bags, g)
    cands = [(up, 2 ** (i * i + j)) for up, (i, j) in info if (i, j) <= b and up <= B]
    if frozenset().union(*(u for u, _ in cands)) != B:
        return False

    def search(i, covered, weight):
        if covered == B:
            return True
        if i == len(cands):
            return False
        up, w = cands[i]
        if weight + w <= limit and not up <= covered and search(i + 1, covered | up, weight + w):
            return True
        return search(i + 1, covered, weight)

    return search(0, frozenset(), 0)


def signature_counts(g: Multigraph, parent: dict, bags: dict) -> dict:
    info = _node_info(parent, bags, g)
    out: dict = {}
    for A, B in all_separations(g):
        if incorporated(g, parent, bags, A, B, info):
            key = breadth(g, A, B)
            out[key] = out.get(key, 0) + 1
    return out


def compare_counts(old: dict, new: dict, max_order: int) -> str:
    """'greater' if new is lexicographically greater over breadths (0,0),(1,0),(1,1),..."""
    for i in range(max_order + 1):
        for j in range(i + 1):
            x, y = old.get((i, j), 0), new.get((i, j), 0)
            if x != y:
                return "greater" if y > x else "less"
    return "equal"


def _edge_paths(g: Multigraph, start: str, end: str, blocked: set, used: set):
    """Simple paths (or cycles when loop) from start to end as (vertices, edge ids)."""
    inc: dict = {}
    for i, (a, b) in enumerate(g.edges):
        if i in used:
            continue
        inc.setdefault(a, []).append((i, b))
        if a != b:
            inc.setdefault(b, []).append((i, a))

    def walk(x, vs, es):
        for i, y in inc.get(x, ()):
            if i in es:
                continue
            if y == end:
                yield vs + [y], es + [i]
                continue
            if y == start or y in vs or y in blocked:
                continue
            yield from walk(y, vs + [y], es + [i])

    yield from walk(start, [start], [])


def embeds(h: Multigraph, g: Multigraph, label_order=None) -> bool:
    """Exhaustive search over injections and edge routings."""
    hv = list(h.vertices)
    if len(hv) > g.n or h.m > g.m:
        return False
    for img in permutations(g.vertices, len(hv)):
        vm = dict(zip(hv, img))
        if label_order is not None and not all(label_order.leq(h.labels[v], g.labels[vm[v]]) for v in hv):
            continue
        branch = set(img)
        if _route(h, g, vm, branch, 0, set(), set()):
            return True
    return False


def _route(h, g, vm, branch, i, used_edges, used_inner) -> bool:
    if i == h.m:
        return True
    a, b = h.edges[i]
    s, t = vm[a], vm[b]
    blocked = (branch - {s, t}) | used_inner
    for vs, es in _edge_paths(g, s, t, blocked, used_edges):
        inner = set(vs[1:-1])
        if inner & blocked:
            continue
        if _route(h, g, vm, branch, i + 1, used_edges | set(es), used_inner | inner):
            return True
    return False


# decomposition properties ------------------------------------------------------------

class _Tree:
    def __init__(self, g: Multigraph, parent: dict, bags: dict):
        self.g, self.parent, self.bags = g, dict(parent), {t: frozenset(b) for t, b in bags.items()}
        self.sep = {t: _up_down(self.parent, self.bags, t) for t in self.bags}
        self.breadth = {t: breadth(g, *self.sep[t]) for t in self.bags}

    def anc(self, t):
        out = [t]
        while out[-1] in self.parent:
            out.append(self.parent[out[-1]])
        return out

    def between(self, a, b):
        """Nodes on the tree path from ancestor a down to b, both included."""
        chain = self.anc(b)
        return chain[:chain.index(a) + 1]

    def precursor(self, a, b):
        if a == b or a not in self.anc(b):
            return False
        k = len(self.bags[a])
        return len(self.bags[b]) == k and all(len(self.bags[t]) >= k for t in self.between(a, b))


def _separates(A, B, X, Y) -> bool:
    C = A & B
    if X <= C or Y <= C:
        return False
    return (X <= A and Y <= B) or (X <= B and Y <= A)


def _pointed(g, A, B, v) -> bool:
    return _side_edges(g, v, A - B) <= 1


def n_linked(g: Multigraph, parent: dict, bags: dict, N: int) -> bool:
    T = _Tree(g, parent, bags)
    seps = list(all_separations(g))
    for t1 in T.bags:
        for t2 in T.bags:
            if not T.precursor(t1, t2):
                continue
            k = len(T.bags[t1])
            down1, up2 = T.sep[t1][0], T.sep[t2][1]
            small = [T.sep[t] for t in T.bags if T.breadth[t][0] < k]
            free = [v for v in up2 if not any(_separates(A, B, down1, {v}) for A, B in small)]
            if len(free) < N:
                continue
            if any(len(A & B) < k and down1 <= A and up2 <= B for A, B in seps):
                return False
    return True


def weakly_linked(g: Multigraph, parent: dict, bags: dict, N: int) -> bool:
    T = _Tree(g, parent, bags)

    def chains(prefix):
        if len(prefix) == N + 1:
            yield prefix
            return
        for b in T.bags:
            if T.precursor(prefix[-1], b) and all(T.bags[b] != T.bags[x] for x in prefix):
                yield from chains(prefix + [b])

    for t in T.bags:
        for ch in chains([t]):
            X1, X2 = T.bags[ch[0]], T.bags[ch[1]]
            if min_separator_size(g, X1, X2) < len(X1):
                return False
    return True


def _coherent(T: _Tree, v, t1, t2) -> bool:
    g = T.g
    (A1, B1), (A2, B2) = T.sep[t1], T.sep[t2]
    d1, d2 = _side_edges(g, v, A1 - B1), _side_edges(g, v, A2 - B2)
    u1, u2 = _side_edges(g, v, B1 - A1), _side_edges(g, v, B2 - A2)
    first = d1 >= 2 or (d1 == d2 and d1 in (0, 1))
    second = u2 >= 2 or (u1 == u2 and u1 in (0, 1))
    return first and second


def n_integrated(g: Multigraph, parent: dict, bags: dict, N: int) -> bool:
    T = _Tree(g, parent, bags)
    seps = [(A, B, breadth(g, A, B)) for A, B in all_separations(g)]
    nodes = sorted(T.bags)
    for t3 in nodes:
        chain = T.anc(t3)
        k = len(T.bags[t3])
        for i2 in range(len(chain)):
            for i1 in range(i2, len(chain)):
                for i0 in range(i1, len(chain)):
                    ts = (chain[i0], chain[i1], chain[i2], t3)
                    if any(len(T.bags[t]) != k for t in ts):
                        continue
                    common = frozenset.intersection(*(T.bags[t] for t in ts))
                    if any(T.bags[a] & T.bags[b] != common for a, b in combinations(ts, 2)):
                        continue
                    if min_separator_size(g, T.bags[ts[0]], T.bags[t3]) < k:
                        continue
                    if not all(_coherent(T, v, ts[0], t3) for v in common):
                        continue
                    A3, B3 = T.sep[t3]
                    kk = sum(1 for v in T.bags[ts[0]] & T.bags[t3] if not _pointed(g, A3, B3, v))
                    target = (k, kk)
                    down1, up2 = T.sep[ts[1]][0], T.sep[ts[2]][1]
                    strong = False
                    for A, B, b in seps:
                        if b != target or not (down1 <= A and up2 <= B):
                            continue
                        if all(v not in down1 and _pointed(g, A, B, v) for v in (A & B) - (down1 & up2)):
                            strong = True
                            break
                    if not strong:
                        continue
                    down0, up3 = T.sep[ts[0]][0], T.sep[t3][1]
                    low = [T.sep[t] for t in nodes if T.breadth[t] < target]
                    free = [v for v in up3 if not any(_separates(A, B, down0, {v}) for A, B in low)]
                    if len(free) < N:
                        continue
                    path = T.between(ts[0], t3)
                    if not any(T.breadth[t] == target for t in path):
                        return False
    return True


def is_separation(g: Multigraph, A, B) -> bool:
    A, B = set(A), set(B)
    if A | B != set(g.vertices):
        return False
    return not any((a in A - B and b in B - A) or (b in A - B and a in B - A) for a, b in g.edges)
