"""Multigraph carrier type, JSON round-trip and small traversal helpers."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Multigraph:
    """Vertex-labelled multigraph. Edges are identified by their index."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    labels: Mapping[str, str] | None = None
    # edge index in some parent graph, for subgraphs; not part of equality
    origin: tuple[int, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        vs = tuple(self.vertices)
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", tuple((a, b) for a, b in self.edges))
        if len(set(vs)) != len(vs):
            raise GraphError("duplicate vertex")
        vset = set(vs)
        for a, b in self.edges:
            if a not in vset or b not in vset:
                raise GraphError(f"edge endpoint not declared: {a if a not in vset else b}")
        if self.labels is not None:
            labels = dict(self.labels)
            missing = [v for v in vs if v not in labels]
            if missing and len(missing) != len(vs):
                raise GraphError(f"label map misses vertex {missing[0]}")
            extra = [v for v in labels if v not in vset]
            if extra:
                raise GraphError(f"label for unknown vertex {extra[0]}")
            object.__setattr__(self, "labels", labels if labels else None)

    # equality is structural on canonical form
    def _key(self):
        edges = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        labels = tuple(sorted(self.labels.items())) if self.labels else ()
        return (tuple(sorted(self.vertices)), edges, labels)

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def vset(self) -> frozenset[str]:
        return frozenset(self.vertices)

    @cached_property
    def incidence(self) -> dict[str, tuple[tuple[int, str], ...]]:
        """vertex -> ((edge id, other end), ...); a loop appears once."""
        inc: dict[str, list] = {v: [] for v in self.vertices}
        for i, (a, b) in enumerate(self.edges):
            inc[a].append((i, b))
            if a != b:
                inc[b].append((i, a))
        return {v: tuple(x) for v, x in inc.items()}

    @cached_property
    def neighbours(self) -> dict[str, frozenset[str]]:
        return {v: frozenset(o for _, o in inc if o != v) for v, inc in self.incidence.items()}

    def degree(self, v: str) -> int:
        return sum(2 if o == v else 1 for _, o in self.incidence[v])

    def label(self, v: str) -> str | None:
        return None if self.labels is None else self.labels[v]

    def multiplicity(self, u: str, v: str) -> int:
        return sum(1 for _, o in self.incidence[u] if o == v)

    def subgraph(self, keep: Iterable[str] | None = None, drop_edges: Iterable[int] = ()) -> "Multigraph":
        """Induced subgraph on `keep` minus the given edge ids; `origin` maps back."""
        keep_set = self.vset if keep is None else set(keep)
        drop = set(drop_edges)
        base = self.origin
        vs = tuple(v for v in self.vertices if v in keep_set)
        es, orig = [], []
        for i, (a, b) in enumerate(self.edges):
            if i in drop or a not in keep_set or b not in keep_set:
                continue
            es.append((a, b))
            orig.append(base[i] if base is not None else i)
        labels = {v: self.labels[v] for v in vs} if self.labels else None
        return Multigraph(vs, tuple(es), labels, tuple(orig))

    def edge_subgraph(self, edge_ids: Iterable[int], extra_vertices: Iterable[str] = ()) -> "Multigraph":
        ids = sorted(set(edge_ids))
        keep = set(extra_vertices)
        for i in ids:
            keep.update(self.edges[i])
        vs = tuple(v for v in self.vertices if v in keep)
        base = self.origin
        labels = {v: self.labels[v] for v in vs} if self.labels else None
        return Multigraph(vs, tuple(self.edges[i] for i in ids), labels,
                          tuple(base[i] if base is not None else i for i in ids))

    def with_labels(self, labels: Mapping[str, str] | None) -> "Multigraph":
        return Multigraph(self.vertices, self.edges, labels)

    def canonical(self) -> "Multigraph":
        vs = tuple(sorted(self.vertices))
        es = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        return Multigraph(vs, es, self.labels)


def make_graph(vertices: Iterable, edges: Iterable, labels: Mapping | None = None) -> Multigraph:
    return Multigraph(tuple(str(v) for v in vertices), tuple((str(a), str(b)) for a, b in edges),
                      None if labels is None else {str(k): str(x) for k, x in labels.items()})


def graph_to_obj(g: Multigraph) -> dict:
    c = g.canonical()
    obj = {"vertices": list(c.vertices), "edges": [list(e) for e in c.edges]}
    if c.labels:
        obj["labels"] = {v: c.labels[v] for v in c.vertices}
    return obj


def graph_from_obj(obj) -> Multigraph:
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise GraphError("graph object needs 'vertices' and 'edges'")
    vs = obj["vertices"]
    es = obj["edges"]
    if not isinstance(vs, list) or not all(isinstance(v, str) for v in vs):
        raise GraphError("vertices must be a list of strings")
    if not isinstance(es, list) or not all(isinstance(e, list) and len(e) == 2 for e in es):
        raise GraphError("edges must be a list of pairs")
    labels = obj.get("labels")
    if labels is not None and not isinstance(labels, dict):
        raise GraphError("labels must be an object")
    return Multigraph(tuple(vs), tuple((str(a), str(b)) for a, b in es), labels)


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def parse_graph(text: str) -> Multigraph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed JSON: {exc}") from exc
    return graph_from_obj(obj)


def serialize_graph(g: Multigraph) -> str:
    return dumps(graph_to_obj(g))


def components(g: Multigraph, within: Iterable[str] | None = None,
               drop_edges: Iterable[int] = ()) -> list[frozenset[str]]:
    """Connected components of g[within] minus drop_edges, in canonical order."""
    allowed = g.vset if within is None else set(within)
    drop = set(drop_edges)
    seen: set[str] = set()
    out = []
    for s in g.vertices:
        if s not in allowed or s in seen:
            continue
        comp = {s}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for eid, y in g.incidence[x]:
                if eid in drop or y not in allowed or y in comp:
                    continue
                comp.add(y)
                queue.append(y)
        seen |= comp
        out.append(frozenset(comp))
    return out


def component_of(g: Multigraph, start: Iterable[str], within: Iterable[str] | None = None,
                 drop_edges: Iterable[int] = ()) -> frozenset[str]:
    """Union of the components of g[within] - drop_edges meeting `start`."""
    allowed = g.vset if within is None else set(within)
    drop = set(drop_edges)
    comp = {s for s in start if s in allowed}
    queue = deque(comp)
    while queue:
        x = queue.popleft()
        for eid, y in g.incidence[x]:
            if eid in drop or y not in allowed or y in comp:
                continue
            comp.add(y)
            queue.append(y)
    return frozenset(comp)


def is_connected(g: Multigraph) -> bool:
    return len(components(g)) <= 1


def find_path(g: Multigraph, sources: Iterable[str], targets: Iterable[str],
              allowed: Iterable[str] | None = None) -> list[str] | None:
    """Shortest path from sources to targets using only `allowed` vertices
    (endpoints included), or None."""
    ok = g.vset if allowed is None else set(allowed)
    tg = set(targets)
    prev: dict[str, str | None] = {}
    queue = deque()
    for s in sorted(set(sources)):
        if s in ok and s not in prev:
            prev[s] = None
            queue.append(s)
    while queue:
        x = queue.popleft()
        if x in tg:
            path = [x]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return path[::-1]
        for _, y in g.incidence[x]:
            if y in ok and y not in prev:
                prev[y] = x
                queue.append(y)
    return None
