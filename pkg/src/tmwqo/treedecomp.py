"""Rooted tree-decompositions: validation, metrics, node separations."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .graph import GraphError, Multigraph, components, dumps
from .separations import Separation, edges_into, pointed, anti_pointed


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RootedDecomposition:
    host: Multigraph
    root: str
    parent: Mapping[str, str]
    bags: Mapping[str, frozenset[str]]
    alpha: Mapping | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "bags", {t: frozenset(b) for t, b in self.bags.items()})
        object.__setattr__(self, "parent", dict(self.parent))

    def _key(self):
        return (self.host, self.root, tuple(sorted(self.parent.items())),
                tuple(sorted((t, tuple(sorted(b))) for t, b in self.bags.items())))

    def __eq__(self, other):
        return isinstance(other, RootedDecomposition) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @cached_property
    def nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self.bags))

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        ch: dict[str, list[str]] = {t: [] for t in self.bags}
        for c, p in self.parent.items():
            if p in ch:
                ch[p].append(c)
        return {t: tuple(sorted(x)) for t, x in ch.items()}

    @cached_property
    def depth(self) -> dict[str, int]:
        out = {self.root: 0}
        queue = deque([self.root])
        while queue:
            t = queue.popleft()
            for c in self.children[t]:
                out[c] = out[t] + 1
                queue.append(c)
        return out

    @cached_property
    def preorder(self) -> tuple[str, ...]:
        out, stack = [], [self.root]
        while stack:
            t = stack.pop()
            out.append(t)
            stack.extend(reversed(self.children[t]))
        return tuple(out)

    @cached_property
    def _descendants(self) -> dict[str, frozenset[str]]:
        out: dict[str, frozenset[str]] = {}
        for t in reversed(self.preorder):
            s = {t}
            for c in self.children[t]:
                s |= out[c]
            out[t] = frozenset(s)
        return out

    def descendants(self, t: str) -> frozenset[str]:
        self._check_node(t)
        return self._descendants[t]

    def ancestors(self, t: str) -> list[str]:
        """t, its parent, ..., the root."""
        self._check_node(t)
        out = [t]
        while out[-1] in self.parent:
            out.append(self.parent[out[-1]])
        return out

    def is_ancestor(self, a: str, b: str) -> bool:
        return b in self.descendants(a)

    def tree_path(self, x: str, y: str) -> list[str]:
        """Nodes of xTy in order from x to y."""
        ax, ay = self.ancestors(x), self.ancestors(y)
        sy = set(ay)
        up = []
        for t in ax:
            up.append(t)
            if t in sy:
                break
        meet = up[-1]
        down = ay[:ay.index(meet)]
        return up + down[::-1]

    def _check_node(self, t: str):
        if t not in self.bags:
            raise DecompositionError(f"unknown node {t}")

    @cached_property
    def _updown(self) -> dict[str, tuple[frozenset[str], frozenset[str]]]:
        up: dict[str, frozenset[str]] = {}
        for t in reversed(self.preorder):
            s = set(self.bags[t])
            for c in self.children[t]:
                s |= up[c]
            up[t] = frozenset(s)
        out = {}
        for t in self.preorder:
            desc = self._descendants[t]
            down = set(self.bags[t])
            for s in self.bags:
                if s not in desc:
                    down |= self.bags[s]
            out[t] = (up[t], frozenset(down))
        return out

    def up(self, t: str) -> frozenset[str]:
        self._check_node(t)
        return self._updown[t][0]

    def down(self, t: str) -> frozenset[str]:
        self._check_node(t)
        return self._updown[t][1]

    def separation(self, t: str) -> Separation:
        return Separation(self.down(t), self.up(t), self.host)

    def with_alpha(self, alpha):
        return RootedDecomposition(self.host, self.root, self.parent, self.bags, alpha)


def make_decomposition(host: Multigraph, root: str, edges: Iterable, bags: Mapping) -> RootedDecomposition:
    parent = {}
    for p, c in edges:
        if c in parent:
            raise DecompositionError(f"node {c} has two parents")
        parent[str(c)] = str(p)
    return RootedDecomposition(host, str(root), parent, {str(t): frozenset(map(str, b)) for t, b in bags.items()})


def decomposition_to_obj(d: RootedDecomposition) -> dict:
    obj = {
        "root": d.root,
        "bags": {t: sorted(d.bags[t]) for t in d.nodes},
        "edges": sorted([d.parent[c], c] for c in d.parent),
    }
    if d.alpha:
        obj["alpha"] = {k: d.alpha[k] for k in sorted(d.alpha)}
    return obj


def decomposition_from_obj(host: Multigraph, obj) -> RootedDecomposition:
    if not isinstance(obj, dict) or not {"root", "bags", "edges"} <= set(obj):
        raise DecompositionError("decomposition needs 'root', 'bags' and 'edges'")
    d = make_decomposition(host, obj["root"], obj["edges"], obj["bags"])
    if "alpha" in obj:
        d = d.with_alpha(dict(obj["alpha"]))
    return d


def serialize_decomposition(d: RootedDecomposition) -> str:
    return dumps(decomposition_to_obj(d))


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: object

    def __str__(self):
        return f"{self.axiom}: {self.witness}"


def validate(d: RootedDecomposition) -> Violation | None:
    """None when d is a rooted tree-decomposition of its host, else the first
    failing axiom (tree, bags, cover, edge, connected) with a witness."""
    g = d.host
    nodes = set(d.bags)
    if d.root not in nodes:
        return Violation("tree", f"root {d.root} has no bag")
    if d.root in d.parent:
        return Violation("tree", f"root {d.root} has a parent")
    for c, p in sorted(d.parent.items()):
        if c not in nodes or p not in nodes:
            return Violation("tree", f"edge {p}>{c} uses an unknown node")
    for t in sorted(nodes):
        if t != d.root and t not in d.parent:
            return Violation("tree", f"node {t} has no parent")
    # every node must reach the root without cycling
    for t in sorted(nodes):
        seen = {t}
        x = t
        while x in d.parent:
            x = d.parent[x]
            if x in seen:
                return Violation("tree", f"cycle through node {x}")
            seen.add(x)
    for t in d.nodes:
        extra = d.bags[t] - g.vset
        if extra:
            return Violation("bags", f"bag {t} has unknown vertex {sorted(extra)[0]}")
    covered = set().union(*d.bags.values()) if d.bags else set()
    for v in g.vertices:
        if v not in covered:
            return Violation("cover", f"vertex {v} in no bag")
    for a, b in g.edges:
        if not any(a in bag and b in bag for bag in d.bags.values()):
            return Violation("edge", f"edge {a}-{b} in no bag")
    for v in g.vertices:
        holding = {t for t in nodes if v in d.bags[t]}
        # a set of nodes is connected in a rooted tree iff exactly one has its parent outside
        tops = [t for t in holding if d.parent.get(t) not in holding]
        if len(tops) != 1:
            return Violation("connected", f"nodes holding {v} are disconnected")
    return None


def metrics(d: RootedDecomposition) -> dict:
    width = max((len(b) for b in d.bags.values()), default=0) - 1
    inter = [len(d.bags[c] & d.bags[p]) for c, p in d.parent.items()]
    nested = all(d.bags[c] <= d.bags[p] or d.bags[p] <= d.bags[c] for c, p in d.parent.items())
    return {"width": width, "adhesion": max(inter, default=0), "nested_edges": nested}


def up_down(d: RootedDecomposition, t: str) -> dict:
    return {"up": d.up(t), "down": d.down(t)}


def separation_given_by(d: RootedDecomposition, t: str) -> Separation:
    return d.separation(t)


def is_precursor(d: RootedDecomposition, t1: str, t2: str) -> bool:
    if t1 == t2 or not d.is_ancestor(t1, t2):
        return False
    k = len(d.bags[t1])
    if len(d.bags[t2]) != k:
        return False
    return all(len(d.bags[t]) >= k for t in d.tree_path(t1, t2))


def coherent_for(d: RootedDecomposition, v: str, t1: str, t2: str) -> bool:
    if not d.is_ancestor(t1, t2):
        raise DecompositionError(f"{t1} is not an ancestor of {t2}")
    if v not in d.bags[t1] or v not in d.bags[t2]:
        raise DecompositionError(f"vertex {v} is not in both bags")
    g = d.host
    s1, s2 = d.separation(t1), d.separation(t2)
    d1 = edges_into(g, v, s1.A - s1.B)
    d2 = edges_into(g, v, s2.A - s2.B)
    u1 = edges_into(g, v, s1.B - s1.A)
    u2 = edges_into(g, v, s2.B - s2.A)
    first = not pointed(g, s1, v) or (d1 == d2 and d1 in (0, 1))
    second = not anti_pointed(g, s2, v) or (u1 == u2 and u1 in (0, 1))
    return first and second


def trivial_decomposition(g: Multigraph, node: str = "r") -> RootedDecomposition:
    return RootedDecomposition(g, node, {}, {node: frozenset(g.vertices)})


def path_decomposition(g: Multigraph, bags: list[Iterable[str]]) -> RootedDecomposition:
    """Decomposition on a path t0 - t1 - ... rooted at t0."""
    names = [f"t{i:02d}" for i in range(len(bags))]
    parent = {names[i + 1]: names[i] for i in range(len(bags) - 1)}
    return RootedDecomposition(g, names[0], parent, {n: frozenset(b) for n, b in zip(names, bags)})


def greedy_decomposition(g: Multigraph, order: list[str] | None = None) -> RootedDecomposition:
    """Elimination-ordering decomposition (min-degree heuristic by default)."""
    if g.n == 0:
        return RootedDecomposition(g, "r", {}, {"r": frozenset()})
    nb = {v: set(g.neighbours[v]) for v in g.vertices}
    if order is None:
        order = []
        live = {v: set(s) for v, s in nb.items()}
        while live:
            v = min(live, key=lambda x: (len(live[x]), g.index[x]))
            order.append(v)
            ns = live.pop(v)
            for a in ns:
                live[a] |= ns - {a}
                live[a].discard(v)
    pos = {v: i for i, v in enumerate(order)}
    live = {v: set(s) for v, s in nb.items()}
    bag_of, higher = {}, {}
    for v in order:
        ns = {u for u in live[v] if pos[u] > pos[v]}
        bag_of[v] = frozenset(ns | {v})
        higher[v] = ns
        for a in ns:
            live[a] |= ns - {a}
    parent = {}
    roots = []
    for v in order:
        if higher[v]:
            parent[v] = min(higher[v], key=lambda u: pos[u])
        else:
            roots.append(v)
    names = {v: f"n{pos[v]:02d}" for v in order}
    root = roots[-1]
    pmap = {names[c]: names[p] for c, p in parent.items()}
    for r in roots[:-1]:
        pmap[names[r]] = names[root]
    return RootedDecomposition(g, names[root], pmap, {names[v]: bag_of[v] for v in order})
