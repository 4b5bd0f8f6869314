"""Pure-Python versions of the compiled kernels (same signatures and results)."""

from __future__ import annotations

from itertools import permutations, product
from math import factorial

import numpy as np


def hom_pinned(n, gadj, ptr, idx, loops, k, npinned):
    adj = [[bool(gadj[x][y]) for y in range(n)] for x in range(n)]
    earlier = [[int(idx[j]) for j in range(ptr[i], ptr[i + 1])] for i in range(k)]
    out = [0] * (n ** npinned)
    if k == 0:
        out[0] = 1
        return np.array(out, dtype=np.int64)
    img = [0] * k

    def rec(depth: int, pos: int) -> None:
        for x in range(n):
            if loops[depth] and not adj[x][x]:
                continue
            row = adj[x]
            if all(row[img[j]] for j in earlier[depth]):
                img[depth] = x
                p = pos * n + x if depth < npinned else pos
                if depth == k - 1:
                    out[p] += 1
                else:
                    rec(depth + 1, p)

    rec(0, 0)
    return np.array(out, dtype=np.int64)


def refine_colours(ptr, idx, col_in):
    n = len(col_in)
    col = [int(c) for c in col_in]
    nbrs = [[int(idx[j]) for j in range(ptr[v], ptr[v + 1])] for v in range(n)]
    ncls = len(set(col))
    while True:
        sig = [(col[v], tuple(sorted(col[u] for u in nbrs[v]))) for v in range(n)]
        rank = {s: i for i, s in enumerate(sorted(set(sig)))}
        col = [rank[s] for s in sig]
        if len(rank) == ncls:
            return np.array(col, dtype=np.int64)
        ncls = len(rank)


def cell_code(ptr, idx, loops, col_in, cap):
    n = len(col_in)
    if n > 64:
        return None
    col = refine_colours(ptr, idx, col_in).tolist() if n else []
    nbrs = [[int(idx[j]) for j in range(ptr[v], ptr[v + 1])] for v in range(n)]
    groups: dict[int, list[int]] = {}
    for v in sorted(range(n), key=lambda v: (col[v], v)):
        groups.setdefault(col[v], []).append(v)
    cells = [groups[c] for c in sorted(groups)]
    total = 1
    for g in cells:
        total *= factorial(len(g))
        if total > cap:
            return None
    best = None
    for choice in product(*(permutations(g) for g in cells)):
        order = [v for part in choice for v in part]
        pos = {v: i for i, v in enumerate(order)}
        code = tuple(sum(1 << pos[u] for u in nbrs[v]) | ((1 << pos[v]) if loops[v] else 0) for v in order)
        if best is None or code < best[1]:
            best = (order, code)
    order, code = best if best is not None else ([], ())
    return np.array(col, dtype=np.int64), np.array(order, dtype=np.int64), code


def glue_code(t, na, la, ma, nb, lb, mb, par, cap, max_n):
    if max_n > 64:
        raise ValueError("glue_code handles at most 64 vertices")
    total = na + nb
    parent = list(range(total))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tt = 2 * t
    glue = [(la[p], na + lb[p]) for p in range(tt)] if par else [(la[t + p], na + lb[p]) for p in range(t)]
    for a, b in glue:
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = [u for u in range(total) if find(u) == u]
    if len(roots) > max_n:
        return None
    n = len(roots)
    pos0 = {r: i for i, r in enumerate(roots)}
    ren = [pos0[find(u)] for u in range(total)]
    labels = tuple(ren[int(la[p])] if par or p < t else ren[na + int(lb[p])] for p in range(tt))
    mask = [0] * n
    for u in range(total):
        bits, off = (int(ma[u]), 0) if u < na else (int(mb[u - na]), na)
        ru = ren[u]
        for v in range(64):
            if bits >> v & 1:
                rv = ren[v + off]
                if ru == rv:
                    return None
                mask[ru] |= 1 << rv
                mask[rv] |= 1 << ru
    nbrs = [[v for v in range(n) if mask[u] >> v & 1] for u in range(n)]
    ptr = np.zeros(n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(a) for a in nbrs])
    idx = np.array([v for a in nbrs for v in a], dtype=np.int32)
    col = [0] * n
    for p, x in enumerate(labels):
        col[x] |= 1 << p
    rank = {c: i for i, c in enumerate(sorted(set(col)))}
    res = cell_code(ptr, idx, np.zeros(n, dtype=np.uint8), np.array([rank[c] for c in col], dtype=np.int64), cap)
    masks = tuple(mask)
    if res is None:
        return n, labels, masks, None
    _, order, code = res
    posn = [0] * n
    for m, v in enumerate(order.tolist()):
        posn[v] = m
    return n, labels, masks, (n, tuple(posn[x] for x in labels), code)
