"""Bitmask kernels for exhaustive separation search.

Two interchangeable backends: numba-compiled loops, and vectorised numpy.
Set TMWQO_NO_NUMBA=1 to force the numpy path (also used when numba is
missing). Both return identical, sorted results.
"""
from __future__ import annotations

import os

import numpy as np

try:
    if os.environ.get("TMWQO_NO_NUMBA", "") not in ("", "0"):
        raise ImportError("numba disabled by TMWQO_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    HAVE_NUMBA = False

MAX_BITS = 62


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# numpy backend -------------------------------------------------------------

def _enum_numpy(adj: np.ndarray, n: int, must_a: int, must_b: int, max_order: int):
    """All separations as (A, B) bitmask arrays via base-3 vertex states
    (0: A-B, 1: A and B, 2: B-A), processed in chunks."""
    if n == 0:
        return np.zeros(1, np.int64), np.zeros(1, np.int64)
    us, vs = [], []
    for i in range(n):
        row = int(adj[i])
        for j in range(i + 1, n):
            if row >> j & 1:
                us.append(i)
                vs.append(j)
    us = np.array(us, dtype=np.int64)
    vs = np.array(vs, dtype=np.int64)
    bits = (np.int64(1) << np.arange(n, dtype=np.int64))
    total = 3 ** n
    chunk = 200_000
    outA, outB = [], []
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        states = np.empty((codes.size, n), dtype=np.int8)
        c = codes.copy()
        for i in range(n):
            states[:, i] = c % 3
            c //= 3
        in_a = states <= 1
        in_b = states >= 1
        keep = (states == 1).sum(axis=1) <= max_order
        if us.size:
            a_only = states == 0
            b_only = states == 2
            bad = (a_only[:, us] & b_only[:, vs]) | (b_only[:, us] & a_only[:, vs])
            keep &= ~bad.any(axis=1)
        A = (in_a * bits).sum(axis=1)
        B = (in_b * bits).sum(axis=1)
        keep &= (A & must_a) == must_a
        keep &= (B & must_b) == must_b
        outA.append(A[keep])
        outB.append(B[keep])
    A = np.concatenate(outA)
    B = np.concatenate(outB)
    order = np.lexsort((B, A))
    return A[order], B[order]


def _counts_numpy(A: np.ndarray, B: np.ndarray, mult: np.ndarray, n: int):
    bits = (np.int64(1) << np.arange(n, dtype=np.int64))
    amb = ((A[:, None] & ~B[:, None]) & bits) != 0
    bma = ((B[:, None] & ~A[:, None]) & bits) != 0
    m = mult.astype(np.int64)
    return amb.astype(np.int64) @ m, bma.astype(np.int64) @ m


# numba backend -------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _popcount(x):
        c = 0
        while x:
            x &= x - 1
            c += 1
        return c

    @njit(cache=True)
    def _bit_index(b):
        i = 0
        while not (b >> i) & 1:
            i += 1
        return i

    @njit(cache=True)
    def _enum_numba(adj, n, must_a, must_b, max_order):
        full = (np.int64(1) << n) - 1
        cap = 1024
        resA = np.empty(cap, np.int64)
        resB = np.empty(cap, np.int64)
        k = 0
        comps = np.empty(max(n, 1), np.int64)
        free = np.empty(max(n, 1), np.int64)
        for C in range(np.int64(1) << n):
            if _popcount(C) > max_order:
                continue
            rest = full & ~C
            nc = 0
            while rest:
                low = rest & -rest
                comp = low
                frontier = low
                while frontier:
                    b = frontier & -frontier
                    frontier ^= b
                    nb = adj[_bit_index(b)] & ~C & ~comp
                    comp |= nb
                    frontier |= nb
                comps[nc] = comp
                nc += 1
                rest &= ~comp
            fa = np.int64(0)
            fb = np.int64(0)
            nf = 0
            ok = True
            for i in range(nc):
                ta = (comps[i] & must_a) != 0
                tb = (comps[i] & must_b) != 0
                if ta and tb:
                    ok = False
                    break
                if ta:
                    fa |= comps[i]
                elif tb:
                    fb |= comps[i]
                else:
                    free[nf] = comps[i]
                    nf += 1
            if not ok:
                continue
            for sel in range(np.int64(1) << nf):
                A = C | fa
                B = C | fb
                for j in range(nf):
                    if (sel >> j) & 1:
                        A |= free[j]
                    else:
                        B |= free[j]
                if (A & must_a) != must_a or (B & must_b) != must_b:
                    continue
                if k == cap:
                    cap *= 2
                    na = np.empty(cap, np.int64)
                    nb2 = np.empty(cap, np.int64)
                    na[:k] = resA[:k]
                    nb2[:k] = resB[:k]
                    resA = na
                    resB = nb2
                resA[k] = A
                resB[k] = B
                k += 1
        return resA[:k], resB[:k]

    @njit(cache=True)
    def _counts_numba(A, B, mult, n):
        S = A.shape[0]
        ca = np.zeros((S, n), np.int64)
        cb = np.zeros((S, n), np.int64)
        for s in range(S):
            amb = A[s] & ~B[s]
            bma = B[s] & ~A[s]
            for u in range(n):
                for v in range(n):
                    w = mult[u, v]
                    if w == 0:
                        continue
                    if (amb >> v) & 1:
                        ca[s, u] += w
                    if (bma >> v) & 1:
                        cb[s, u] += w
        return ca, cb


def enumerate_separation_masks(adj: np.ndarray, n: int, must_a: int = 0, must_b: int = 0,
                               max_order: int | None = None):
    """All separations (A, B) of a graph on n <= 62 vertices given by neighbour
    bitmasks, with must_a within A, must_b within B and |A&B| <= max_order."""
    if n > MAX_BITS:
        raise ValueError("too many vertices for bitmask enumeration")
    mo = n if max_order is None else max_order
    adj = np.asarray(adj, dtype=np.int64)
    if HAVE_NUMBA:
        A, B = _enum_numba(adj, n, np.int64(must_a), np.int64(must_b), mo)
        order = np.lexsort((B, A))
        return A[order], B[order]
    return _enum_numpy(adj, n, must_a, must_b, mo)


def side_edge_counts(A: np.ndarray, B: np.ndarray, mult: np.ndarray, n: int):
    """Per separation and vertex: edges into A-B and into B-A (loops excluded
    by a zero diagonal in `mult`)."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    mult = np.asarray(mult, dtype=np.int64)
    if HAVE_NUMBA:
        return _counts_numba(A, B, mult, n)
    return _counts_numpy(A, B, mult, n)


def thickness_from_counts(A, B, counts_amb, n: int) -> np.ndarray:
    bits = (np.int64(1) << np.arange(n, dtype=np.int64))
    boundary = ((np.asarray(A)[:, None] & np.asarray(B)[:, None]) & bits) != 0
    return (boundary & (counts_amb >= 2)).sum(axis=1)
