"""Finite quasi-orders given by an explicit relation."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable


class QuasiOrderError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteQuasiOrder:
    elements: tuple[str, ...]
    relation: frozenset[tuple[str, str]]

    def leq(self, a, b) -> bool:
        return (a, b) in self.relation

    def to_obj(self) -> dict:
        return {"elements": list(self.elements), "leq": [list(p) for p in sorted(self.relation)]}


def quasi_order_violation(elements: Iterable[str], leq: Iterable) -> str | None:
    els = list(elements)
    rel = {tuple(p) for p in leq}
    es = set(els)
    for a, b in sorted(rel):
        if a not in es or b not in es:
            return f"pair ({a},{b}) uses an unknown element"
    for a in els:
        if (a, a) not in rel:
            return f"missing reflexive pair ({a},{a})"
    for a, b, c in product(els, repeat=3):
        if (a, b) in rel and (b, c) in rel and (a, c) not in rel:
            return f"not transitive: ({a},{b}),({b},{c}) without ({a},{c})"
    return None


def validate_quasi_order(elements: Iterable[str], leq: Iterable) -> FiniteQuasiOrder:
    els = tuple(elements)
    rel = frozenset(tuple(p) for p in leq)
    err = quasi_order_violation(els, rel)
    if err:
        raise QuasiOrderError(err)
    return FiniteQuasiOrder(els, rel)


def quasi_order_from_obj(obj) -> FiniteQuasiOrder:
    if not isinstance(obj, dict) or "elements" not in obj or "leq" not in obj:
        raise QuasiOrderError("quasi-order needs 'elements' and 'leq'")
    return validate_quasi_order(obj["elements"], obj["leq"])


def antichain_order(elements: Iterable[str]) -> FiniteQuasiOrder:
    els = tuple(elements)
    return FiniteQuasiOrder(els, frozenset((a, a) for a in els))


def chain_order(elements: Iterable[str]) -> FiniteQuasiOrder:
    els = tuple(elements)
    return FiniteQuasiOrder(els, frozenset((els[i], els[j]) for i in range(len(els)) for j in range(i, len(els))))


def higman_leq(xs, ys, leq) -> bool:
    """Higman comparison: an order-preserving injection i with xs[k] <= ys[i(k)].
    Greedy leftmost matching is exact for subsequence embedding."""
    j = 0
    for x in xs:
        while j < len(ys) and not leq(x, ys[j]):
            j += 1
        if j == len(ys):
            return False
        j += 1
    return True
