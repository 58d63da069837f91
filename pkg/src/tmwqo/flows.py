"""Disjoint paths by unit-capacity augmenting paths (Menger duality)."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .graph import GraphError, Multigraph

INF = 1 << 30


@dataclass(frozen=True)
class PathSystem:
    paths: tuple[tuple[str, ...], ...]
    X: frozenset[str]
    Y: frozenset[str]

    def __len__(self):
        return len(self.paths)

    def vertices(self) -> frozenset[str]:
        return frozenset(v for p in self.paths for v in p)

    def to_obj(self):
        return {"paths": [list(p) for p in self.paths], "X": sorted(self.X), "Y": sorted(self.Y)}


class _Flow:
    def __init__(self, size: int):
        self.cap: list[dict[int, int]] = [dict() for _ in range(size)]

    def add(self, u: int, v: int, c: int):
        self.cap[u][v] = self.cap[u].get(v, 0) + c
        self.cap[v].setdefault(u, 0)

    def augment(self, s: int, t: int) -> bool:
        prev = {s: -1}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if x == t:
                break
            for y, c in self.cap[x].items():
                if c > 0 and y not in prev:
                    prev[y] = x
                    queue.append(y)
        if t not in prev:
            return False
        y = t
        while prev[y] != -1:
            x = prev[y]
            self.cap[x][y] -= 1
            self.cap[y][x] += 1
            y = x
        return True

    def run(self, s: int, t: int, limit: int | None = None) -> int:
        total = 0
        while (limit is None or total < limit) and self.augment(s, t):
            total += 1
        return total

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y, c in self.cap[x].items():
                if c > 0 and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen


def _vertex_network(g: Multigraph, X, Y, allowed):
    ok = g.vset if allowed is None else set(allowed) & g.vset
    idx = {v: i for i, v in enumerate(g.vertices)}
    n = len(idx)
    s, t = 2 * n, 2 * n + 1
    fl = _Flow(2 * n + 2)
    for v in g.vertices:
        if v in ok:
            fl.add(2 * idx[v], 2 * idx[v] + 1, 1)
    for a, b in g.edges:
        if a == b or a not in ok or b not in ok:
            continue
        fl.add(2 * idx[a] + 1, 2 * idx[b], INF)
        fl.add(2 * idx[b] + 1, 2 * idx[a], INF)
    for x in sorted(set(X) & ok):
        fl.add(s, 2 * idx[x], INF)
    for y in sorted(set(Y) & ok):
        fl.add(2 * idx[y] + 1, t, INF)
    return fl, idx, s, t, ok


def max_disjoint_paths(g: Multigraph, X: Iterable[str], Y: Iterable[str],
                       allowed: Iterable[str] | None = None) -> PathSystem:
    """Maximum system of vertex-disjoint X-Y paths inside g[allowed].

    Each path meets X only in its first vertex and Y only in its last; a
    vertex of X and Y is a one-vertex path."""
    X, Y = frozenset(X), frozenset(Y)
    fl, idx, s, t, ok = _vertex_network(g, X, Y, allowed)
    fl.run(s, t)
    verts = g.vertices
    # flow on an arc is its original capacity minus its residual
    flow_out: dict[int, list[int]] = {}
    orig = _vertex_network(g, X, Y, allowed)[0].cap
    for u in range(len(fl.cap)):
        for v, c in fl.cap[u].items():
            f = orig[u].get(v, 0) - c
            if f > 0:
                flow_out.setdefault(u, []).extend([v] * f)
    paths = []
    while flow_out.get(s):
        x = flow_out[s].pop()
        seq = []
        while x != t:
            if x % 2 == 0:
                seq.append(verts[x // 2])
            x = flow_out[x].pop()
        # cancel cycles
        clean: list[str] = []
        for v in seq:
            if v in clean:
                del clean[clean.index(v) + 1:]
            else:
                clean.append(v)
        last_x = max(i for i, v in enumerate(clean) if v in X)
        clean = clean[last_x:]
        first_y = min(i for i, v in enumerate(clean) if v in Y)
        paths.append(tuple(clean[:first_y + 1]))
    paths.sort()
    return PathSystem(tuple(paths), X, Y)


def max_disjoint_count(g: Multigraph, X, Y, allowed=None, limit: int | None = None) -> int:
    fl, _, s, t, _ = _vertex_network(g, X, Y, allowed)
    return fl.run(s, t, limit)


def min_separation(g: Multigraph, X, Y) -> tuple[frozenset[str], frozenset[str]]:
    """A separation (A,B) of minimum order with X within A and Y within B."""
    fl, idx, s, t, _ = _vertex_network(g, X, Y, None)
    fl.run(s, t)
    reach = fl.reachable(s)
    src = {v for v, i in idx.items() if 2 * i + 1 in reach}
    cut = {v for v, i in idx.items() if 2 * i in reach and 2 * i + 1 not in reach}
    A = frozenset(src | cut)
    B = frozenset(v for v in g.vertices if v not in src)
    return A, B


def edge_disjoint_count(g: Multigraph, u: str, v: str, avoid_internal: Iterable[str] = (),
                        limit: int | None = None) -> int:
    avoid = set(avoid_internal) - {u, v}
    idx = {x: i for i, x in enumerate(g.vertices)}
    fl = _Flow(len(idx))
    for a, b in g.edges:
        if a == b or a in avoid or b in avoid:
            continue
        fl.add(idx[a], idx[b], 1)
        fl.add(idx[b], idx[a], 1)
    return fl.run(idx[u], idx[v], limit)


def two_edge_disjoint_paths(g: Multigraph, u: str, v: str, avoid_internal: Iterable[str] = ()) -> bool:
    """True iff two edge-disjoint u-v paths with interiors avoiding the set exist."""
    for x in (u, v):
        if x not in g.vset:
            raise GraphError(f"vertex {x} not in graph")
    avoid = set(avoid_internal)
    if u in avoid or v in avoid:
        raise GraphError("endpoints must not be in avoid_internal")
    if u == v:
        return True
    return edge_disjoint_count(g, u, v, avoid, limit=2) >= 2
