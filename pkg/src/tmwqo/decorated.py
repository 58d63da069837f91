"""Decorated rooted trees: validity, the precedes relation, contractions and
the closure property of comparability graphs."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping


class DecorationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DecoratedTree:
    """Edges are identified by their head (child) node."""
    root: str
    parent: Mapping[str, str]
    phi: Mapping[str, frozenset]
    tau: Mapping[str, frozenset]
    mu: Mapping[str, int]
    h: int
    d: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "parent", dict(self.parent))
        object.__setattr__(self, "phi", {k: frozenset(v) for k, v in self.phi.items()})
        object.__setattr__(self, "tau", {k: frozenset(v) for k, v in self.tau.items()})
        object.__setattr__(self, "mu", {k: int(v) for k, v in self.mu.items()})

    def _key(self):
        return (self.root, sorted(self.parent.items()),
                sorted((k, sorted(v)) for k, v in self.phi.items()),
                sorted((k, sorted(v)) for k, v in self.tau.items()),
                sorted(self.mu.items()), self.h, self.d, self.N)

    def __eq__(self, other):
        return isinstance(other, DecoratedTree) and self._key() == other._key()

    @cached_property
    def nodes(self) -> tuple[str, ...]:
        return tuple(sorted({self.root} | set(self.parent) | set(self.parent.values())))

    @cached_property
    def edges(self) -> tuple[str, ...]:
        return tuple(sorted(self.parent))

    def ancestors(self, v: str) -> list[str]:
        out = [v]
        while out[-1] in self.parent:
            out.append(self.parent[out[-1]])
        return out

    def is_ancestor(self, a: str, b: str) -> bool:
        return a in self.ancestors(b)

    def path_edges(self, v: str, w: str) -> list[str]:
        """Edges of vTw for an ancestor v of w, top-down, named by heads."""
        anc = self.ancestors(w)
        if v not in anc:
            raise DecorationError(f"{v} is not an ancestor of {w}")
        return anc[:anc.index(v)][::-1]

    @cached_property
    def children(self) -> dict[str, list[str]]:
        ch: dict[str, list[str]] = {v: [] for v in self.nodes}
        for c, p in self.parent.items():
            ch[p].append(c)
        return {v: sorted(c) for v, c in ch.items()}


def decorated_tree(root, edges: Iterable, phi, tau, mu, h, d, N) -> DecoratedTree:
    parent = {}
    for p, c in edges:
        if c in parent:
            raise DecorationError(f"node {c} has two parents")
        parent[str(c)] = str(p)
    return DecoratedTree(str(root), parent, phi, tau, mu, h, d, N)


def _edge_key(t: DecoratedTree, c: str) -> str:
    return f"{t.parent[c]}>{c}"


def decorated_to_obj(t: DecoratedTree) -> dict:
    return {
        "tree": {"root": t.root, "edges": sorted([t.parent[c], c] for c in t.parent)},
        "phi": {_edge_key(t, c): sorted(t.phi[c]) for c in t.edges},
        "tau": {_edge_key(t, c): sorted(t.tau[c]) for c in t.edges},
        "mu": {_edge_key(t, c): t.mu[c] for c in t.edges},
        "h": t.h, "d": t.d, "N": t.N,
    }


def decorated_from_obj(obj) -> DecoratedTree:
    try:
        tree = obj["tree"]
        edges = [tuple(e) for e in tree["edges"]]

        def by_head(m):
            out = {}
            for k, v in m.items():
                p, c = k.split(">")
                out[c] = v
            return out

        return decorated_tree(tree["root"], edges, by_head(obj["phi"]), by_head(obj["tau"]),
                              by_head(obj["mu"]), obj["h"], obj["d"], obj["N"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DecorationError(f"bad decorated tree: {exc}") from exc


@dataclass(frozen=True)
class DecorationViolation:
    rule: str
    witness: object


def _field_violation(t: DecoratedTree) -> DecorationViolation | None:
    for c in t.edges:
        if c not in t.phi or c not in t.tau or c not in t.mu:
            return DecorationViolation("fields", f"edge {_edge_key(t, c)} lacks a value")
        if not t.tau[c] <= t.phi[c]:
            return DecorationViolation("fields", f"tau not inside phi at {_edge_key(t, c)}")
        if len(t.phi[c]) > t.h:
            return DecorationViolation("fields", f"phi larger than h at {_edge_key(t, c)}")
        if not 0 <= t.mu[c] <= t.N:
            return DecorationViolation("fields", f"mu out of range at {_edge_key(t, c)}")
    return None


def _max_clique_with(edges: list[str], phi, Z: frozenset, must: tuple[str, str]) -> list[str]:
    """Largest subset containing both `must` edges with all pairwise phi
    intersections equal to Z."""
    ok = lambda a, b: phi[a] & phi[b] == Z
    pool = [e for e in edges if e not in must and all(ok(e, m) for m in must)]
    best: list[str] = []

    def grow(chosen, rest):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        for i, e in enumerate(rest):
            if len(chosen) + len(rest) - i <= len(best):
                return
            if all(ok(e, x) for x in chosen):
                chosen.append(e)
                grow(chosen, rest[i + 1:])
                chosen.pop()

    grow([], pool)
    return list(must) + best


def decoration_violation(t: DecoratedTree, m: int | None = None) -> DecorationViolation | None:
    """None if t is (h, m, N)-decorated (m defaults to t.d), else a witness."""
    m = t.d if m is None else m
    bad = _field_violation(t)
    if bad:
        return bad
    for w in t.nodes:
        chain = t.path_edges(t.root, w)
        for i, j, k in combinations(range(len(chain)), 3):
            a, b, c = chain[i], chain[j], chain[k]
            if not t.phi[a] & t.phi[c] <= t.phi[b]:
                return DecorationViolation("interval", [_edge_key(t, x) for x in (a, b, c)])
    # a violating configuration can be trimmed to the path between its first and last edge
    for w in t.nodes:
        chain = t.path_edges(t.root, w)
        if not chain:
            continue
        b = chain[-1]
        for i in range(len(chain) - 1):
            a = chain[i]
            s = len(t.phi[a])
            if len(t.phi[b]) != s:
                continue
            P = chain[i:]
            if any(len(t.phi[e]) < s for e in P):
                continue
            Z = t.phi[a] & t.phi[b]
            same = [e for e in P if len(t.phi[e]) == s]
            if any(t.tau[e] <= Z or t.mu[e] != t.mu[a] for e in same):
                continue
            chosen = _max_clique_with(same, t.phi, Z, (a, b))
            if len(chosen) > m:
                return DecorationViolation("length", {"edges": [_edge_key(t, e) for e in P if e in chosen],
                                                      "Z": sorted(Z)})
    return None


def is_decorated(t: DecoratedTree, m: int | None = None) -> tuple[bool, DecorationViolation | None]:
    v = decoration_violation(t, m)
    return v is None, v


def precedes(t: DecoratedTree, v: str, w: str) -> bool:
    if v == t.root or v not in t.nodes or w not in t.nodes:
        return False
    if not t.is_ancestor(v, w):
        return False
    e, f = v, w
    if len(t.phi[e]) != len(t.phi[f]) or t.tau[e] != t.tau[f] or t.mu[e] != t.mu[f]:
        return False
    for g in t.path_edges(v, w):
        if len(t.phi[g]) < len(t.phi[f]):
            return False
        if len(t.phi[g]) == len(t.phi[e]) and t.mu[g] < t.mu[e]:
            return False
    return True


def component_roots(t: DecoratedTree, F: Iterable[str]) -> dict[str, str]:
    """Map each node to the root of its component of T - F."""
    F = set(F)
    out: dict[str, str] = {}
    stack = [t.root]
    out[t.root] = t.root
    while stack:
        x = stack.pop()
        for c in t.children[x]:
            out[c] = c if c in F else out[x]
            stack.append(c)
    return out


def contract(t: DecoratedTree, F: Iterable[str]) -> DecoratedTree:
    """F-contraction; F is a set of edges named by their heads."""
    F = set(F)
    unknown = F - set(t.edges)
    if unknown:
        raise DecorationError(f"unknown edge {sorted(unknown)[0]}")
    comp = component_roots(t, F)
    parent = {c: comp[t.parent[c]] for c in F}
    return DecoratedTree(t.root, parent, {c: t.phi[c] for c in F}, {c: t.tau[c] for c in F},
                         {c: t.mu[c] for c in F}, t.h, t.d, t.N)


@dataclass
class ComparabilityGraph:
    """Nodes are (tree index, node) pairs; edges join nodes of distinct trees."""
    nodes: list[tuple[int, str]]
    adjacent: set[frozenset] = field(default_factory=set)

    def add(self, a: tuple[int, str], b: tuple[int, str]):
        if a[0] == b[0]:
            raise DecorationError("edges must join distinct trees")
        self.adjacent.add(frozenset((a, b)))

    def has(self, a, b) -> bool:
        return frozenset((a, b)) in self.adjacent


def comparability_graph(trees: list[DecoratedTree], pairs: Iterable) -> ComparabilityGraph:
    D = ComparabilityGraph([(i, v) for i, t in enumerate(trees) for v in t.nodes])
    for a, b in pairs:
        D.add(tuple(a), tuple(b))
    return D


def contract_comparability(D: ComparabilityGraph, trees: list[DecoratedTree],
                           Fs: list[Iterable[str]]) -> tuple[list[DecoratedTree], ComparabilityGraph]:
    new_trees = [contract(t, F) for t, F in zip(trees, Fs)]
    out = ComparabilityGraph([(i, v) for i, t in enumerate(new_trees) for v in t.nodes])
    # contracted nodes are named by the roots of their components
    for i, j in combinations(range(len(new_trees)), 2):
        for x in new_trees[i].nodes:
            for y in new_trees[j].nodes:
                if D.has((i, x), (j, y)):
                    out.add((i, x), (j, y))
    return new_trees, out


def closure_violation(D: ComparabilityGraph, trees: list[DecoratedTree]):
    """First (u, v, w) with u adjacent to w in a later tree, v preceding w,
    and u not adjacent to v; None if closed."""
    for pair in sorted(D.adjacent, key=lambda p: sorted(p)):
        a, b = sorted(pair)
        u, w = (a, b) if a[0] < b[0] else (b, a)
        tw = trees[w[0]]
        for v in tw.nodes:
            if precedes(tw, v, w[1]) and not D.has(u, (w[0], v)):
                return (u, (w[0], v), w)
    return None


def check_closure(D: ComparabilityGraph, trees: list[DecoratedTree]) -> tuple[bool, object]:
    bad = closure_violation(D, trees)
    return bad is None, bad
