"""Separations, pointedness, breadth, pseudo-edge-cuts and reflections."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .graph import GraphError, Multigraph


class SeparationError(ValueError):
    pass


@dataclass(frozen=True)
class Separation:
    A: frozenset[str]
    B: frozenset[str]
    host: Multigraph | None = field(default=None, compare=False, repr=False, hash=False)

    @property
    def boundary(self) -> frozenset[str]:
        return self.A & self.B

    @property
    def order(self) -> int:
        return len(self.A & self.B)

    def to_obj(self) -> dict:
        return {"A": sorted(self.A), "B": sorted(self.B)}


def separation_violation(g: Multigraph, A, B) -> str | None:
    A, B = set(A), set(B)
    if not A | B == set(g.vertices):
        missing = sorted(g.vset - (A | B))
        if missing:
            return f"vertex {missing[0]} in neither side"
        return f"unknown vertex {sorted((A | B) - g.vset)[0]}"
    for a, b in g.edges:
        if (a in A - B and b in B - A) or (b in A - B and a in B - A):
            return f"edge {a}-{b} crosses the separation"
    return None


def make_separation(g: Multigraph, A: Iterable[str], B: Iterable[str]) -> Separation:
    A, B = frozenset(A), frozenset(B)
    err = separation_violation(g, A, B)
    if err:
        raise SeparationError(err)
    return Separation(A, B, g)


def separation_from_obj(g: Multigraph, obj) -> Separation:
    return make_separation(g, obj["A"], obj["B"])


@dataclass(frozen=True)
class Breadth:
    order: int
    thickness: int
    flags: dict = field(compare=False, hash=False, default_factory=dict)

    def key(self) -> tuple[int, int]:
        return (self.order, self.thickness)

    def __lt__(self, other: "Breadth"):
        return self.key() < other.key()

    def __le__(self, other: "Breadth"):
        return self.key() <= other.key()


def edges_into(g: Multigraph, v: str, side: Iterable[str]) -> int:
    """Number of non-loop edges from v to a vertex of `side`, with multiplicity."""
    side = side if isinstance(side, (set, frozenset)) else set(side)
    return sum(1 for _, o in g.incidence[v] if o != v and o in side)


def pointed(g: Multigraph, s: Separation, v: str) -> bool:
    return edges_into(g, v, s.A - s.B) <= 1


def anti_pointed(g: Multigraph, s: Separation, v: str) -> bool:
    return edges_into(g, v, s.B - s.A) <= 1


def _host(s: Separation, g: Multigraph | None) -> Multigraph:
    h = g if g is not None else s.host
    if h is None:
        raise SeparationError("separation has no host graph")
    return h


def breadth_of(s: Separation, g: Multigraph | None = None) -> Breadth:
    g = _host(s, g)
    flags = {}
    thick = 0
    for v in sorted(s.boundary):
        p = pointed(g, s, v)
        ap = anti_pointed(g, s, v)
        flags[v] = {"pointed": p, "anti_pointed": ap, "doubly_pointed": p and ap}
        thick += not p
    return Breadth(s.order, thick, flags)


def is_pseudo_edge_cut(s: Separation, Z: Iterable[str], g: Multigraph | None = None) -> bool:
    g = _host(s, g)
    Z = set(Z)
    return all(pointed(g, s, v) for v in s.boundary if v not in Z)


def separates(s: Separation, X, Y) -> bool:
    X, Y = set(X), set(Y)
    bd = s.boundary
    if X <= bd or Y <= bd:
        return False
    return (X <= s.A and Y <= s.B) or (X <= s.B and Y <= s.A)


def weakly_separates(s: Separation, X, Y) -> bool:
    X, Y = set(X), set(Y)
    return (X <= s.A and Y <= s.B) or (X <= s.B and Y <= s.A)


def strongly_separates(s: Separation, U, V, g: Multigraph | None = None) -> bool:
    g = _host(s, g)
    U, V = set(U), set(V)
    if not (U <= s.A and V <= s.B):
        return False
    for v in s.boundary - (U & V):
        if v in U or not pointed(g, s, v):
            return False
    return True


def separation_predicates(s: Separation, X, Y, g: Multigraph | None = None) -> dict:
    return {
        "separates": separates(s, X, Y),
        "weakly_separates": weakly_separates(s, X, Y),
        "strongly_separates": strongly_separates(s, X, Y, g),
    }


def reflection(s2: Separation, Z: Iterable[str], W: Iterable[str], g: Multigraph | None = None) -> Separation:
    """Reflection of s2 with respect to Z and W."""
    g = _host(s2, g)
    Z, W = frozenset(Z), frozenset(W)
    A2, B2 = s2.A, s2.B
    bd = A2 & B2
    for v in sorted(Z):
        if v not in bd:
            raise SeparationError(f"vertex {v} of Z is not in the boundary")
    for v in sorted(bd - Z):
        if not pointed(g, s2, v):
            raise SeparationError(f"boundary vertex {v} outside Z is not pointed")
    rest = bd - (W | Z)
    for v in sorted(W):
        if v not in bd:
            raise SeparationError(f"vertex {v} of W is not in the boundary")
        if not (pointed(g, s2, v) and anti_pointed(g, s2, v)):
            raise SeparationError(f"vertex {v} of W is not doubly pointed")
        if g.neighbours[v] & rest:
            raise SeparationError(f"vertex {v} of W is adjacent to the removed boundary")
    A1 = A2 - rest
    B1 = B2 | frozenset(u for u in A2 - B2 if g.neighbours[u] & rest)
    return make_separation(g, A1, B1)


# exhaustive enumeration -----------------------------------------------------

def _masks(g: Multigraph):
    n = g.n
    adj = np.zeros(n, dtype=np.int64)
    mult = np.zeros((n, n), dtype=np.int64)
    idx = g.index
    for a, b in g.edges:
        if a == b:
            continue
        i, j = idx[a], idx[b]
        adj[i] |= np.int64(1) << j
        adj[j] |= np.int64(1) << i
        mult[i, j] += 1
        mult[j, i] += 1
    return adj, mult


def to_mask(g: Multigraph, vs: Iterable[str]) -> int:
    idx = g.index
    m = 0
    for v in vs:
        m |= 1 << idx[v]
    return m


def from_mask(g: Multigraph, m: int) -> frozenset[str]:
    return frozenset(v for i, v in enumerate(g.vertices) if m >> i & 1)


class SeparationTable:
    """All separations of a host (optionally constrained), with breadths.

    Rows are sorted by (A mask, B mask) so iteration order is canonical."""

    def __init__(self, g: Multigraph, must_a=(), must_b=(), max_order: int | None = None):
        self.g = g
        adj, mult = _masks(g)
        self.A, self.B = _kernels.enumerate_separation_masks(
            adj, g.n, to_mask(g, must_a), to_mask(g, must_b), max_order)
        self.to_amb, self.to_bma = _kernels.side_edge_counts(self.A, self.B, mult, g.n)
        bits = np.int64(1) << np.arange(g.n, dtype=np.int64)
        self.boundary = ((self.A & self.B)[:, None] & bits) != 0
        self.order = self.boundary.sum(axis=1)
        self.thickness = (self.boundary & (self.to_amb >= 2)).sum(axis=1)

    def __len__(self):
        return int(self.A.shape[0])

    def separation(self, i: int) -> Separation:
        return Separation(from_mask(self.g, int(self.A[i])), from_mask(self.g, int(self.B[i])), self.g)

    def pseudo_edge_cut_mask(self, Z=()) -> np.ndarray:
        z = np.zeros(self.g.n, dtype=bool)
        idx = self.g.index
        for v in Z:
            z[idx[v]] = True
        bad = self.boundary & (self.to_amb >= 2) & ~z[None, :]
        return ~bad.any(axis=1)

    def __iter__(self) -> Iterator[Separation]:
        for i in range(len(self)):
            yield self.separation(i)


def enumerate_separations(g: Multigraph, must_a=(), must_b=(), max_order: int | None = None) -> list[Separation]:
    if g.n > 16:
        raise GraphError("exhaustive separation enumeration is capped at 16 vertices")
    return list(SeparationTable(g, must_a, must_b, max_order))
