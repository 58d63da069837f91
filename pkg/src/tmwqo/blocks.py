"""Blocks, block trees and paths of blocks for multigraphs.

Loops form their own one-edge blocks, so blocks partition the edge set and
the cut vertices are the vertices lying in at least two blocks.
"""
from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass

from .graph import GraphError, Multigraph, components


@dataclass(frozen=True)
class Block:
    vertices: frozenset[str]
    edges: frozenset[int]

    @property
    def is_single_edge(self) -> bool:
        return len(self.edges) == 1


@dataclass(frozen=True)
class BlockTree:
    blocks: tuple[Block, ...]
    cut_vertices: frozenset[str]
    tree_edges: tuple[tuple[str, int], ...]  # (cut vertex, block index)

    def block_index(self, b) -> int:
        """Index of a block given as a Block, a vertex set or an edge id."""
        if isinstance(b, int):
            for i, blk in enumerate(self.blocks):
                if b in blk.edges:
                    return i
            raise GraphError(f"edge {b} lies in no block")
        if isinstance(b, Block):
            b = b.vertices
        b = frozenset(b)
        hits = [i for i, blk in enumerate(self.blocks) if blk.vertices == b]
        if not hits:
            raise GraphError("not a block")
        return hits[0]


def _sort_key(g: Multigraph, blk: Block):
    idx = g.index
    return (min(idx[v] for v in blk.vertices), min(blk.edges) if blk.edges else -1)


def blocks_of(g: Multigraph) -> BlockTree:
    """Block forest of any multigraph (components handled independently)."""
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    found: list[Block] = []
    stack: list[int] = []
    counter = [0]
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * g.n + 100))

    def dfs(v: str, via: int | None):
        disc[v] = low[v] = counter[0]
        counter[0] += 1
        for eid, w in g.incidence[v]:
            if eid == via or w == v:
                continue
            if w not in disc:
                stack.append(eid)
                dfs(w, eid)
                low[v] = min(low[v], low[w])
                if low[w] >= disc[v]:
                    es = set()
                    while True:
                        e = stack.pop()
                        es.add(e)
                        if e == eid:
                            break
                    vs = set()
                    for e in es:
                        vs.update(g.edges[e])
                    found.append(Block(frozenset(vs), frozenset(es)))
            elif disc[w] < disc[v]:
                stack.append(eid)
                low[v] = min(low[v], disc[w])

    try:
        for v in g.vertices:
            if v not in disc:
                dfs(v, None)
                if not any(w != v for _, w in g.incidence[v]) and not any(
                        a == v and b == v for a, b in g.edges):
                    found.append(Block(frozenset([v]), frozenset()))
    finally:
        sys.setrecursionlimit(old)
    for i, (a, b) in enumerate(g.edges):
        if a == b:
            found.append(Block(frozenset([a]), frozenset([i])))
    found.sort(key=lambda b: _sort_key(g, b))
    count: dict[str, int] = {}
    for blk in found:
        for v in blk.vertices:
            count[v] = count.get(v, 0) + 1
    cuts = frozenset(v for v, c in count.items() if c >= 2)
    tree_edges = tuple((v, i) for i, blk in enumerate(found) for v in g.vertices
                       if v in cuts and v in blk.vertices)
    return BlockTree(tuple(found), cuts, tree_edges)


def block_decomposition(g: Multigraph) -> BlockTree:
    if len(components(g)) > 1:
        raise GraphError("block_decomposition needs a connected graph")
    return blocks_of(g)


def _tree_path(bt: BlockTree, i: int, j: int) -> list[int]:
    """Block indices on the block-tree path from block i to block j."""
    adj: dict[object, list] = {}
    for v, b in bt.tree_edges:
        adj.setdefault(("c", v), []).append(("b", b))
        adj.setdefault(("b", b), []).append(("c", v))
    start, goal = ("b", i), ("b", j)
    prev = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if x == goal:
            break
        for y in adj.get(x, ()):
            if y not in prev:
                prev[y] = x
                queue.append(y)
    if goal not in prev:
        raise GraphError("blocks lie in different components")
    out = []
    x = goal
    while x is not None:
        if x[0] == "b":
            out.append(x[1])
        x = prev[x]
    return out[::-1]


def blocks_on_path(bt: BlockTree, b1, b2) -> list[Block]:
    i, j = bt.block_index(b1), bt.block_index(b2)
    return [bt.blocks[k] for k in _tree_path(bt, i, j)]


def path_of_blocks(g: Multigraph, b1, b2, bt: BlockTree | None = None) -> Multigraph:
    """Union of the blocks on the block-tree path from b1 to b2."""
    bt = blocks_of(g) if bt is None else bt
    blks = blocks_on_path(bt, b1, b2)
    vs = set().union(*(b.vertices for b in blks))
    es = set().union(*(b.edges for b in blks))
    return g.edge_subgraph(es, vs)
