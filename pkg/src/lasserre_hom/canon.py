"""Canonical labelling by individualization and refinement.

The search refines an ordered partition to an equitable one, branches on the
first smallest non-singleton cell and keeps the lexicographically smallest
certificate over all leaves.  Automorphisms discovered along the way (two leaves
with the same certificate) prune siblings lying in a common orbit.
"""

from __future__ import annotations

from typing import Hashable, Sequence

import numpy as np

from . import kernels
from .graph import Graph, GraphError

#: Default vertex limit for canonical labelling and isomorphism tests.
MAX_CANON_VERTICES = 64


class SizeLimitError(GraphError):
    """Input exceeds a configured size limit; the operation refuses rather than guessing."""


def _csr(adj: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(adj) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(a) for a in adj])
    idx = np.array([u for a in adj for u in a], dtype=np.int32)
    return ptr, idx


def _refine(csr: tuple[np.ndarray, np.ndarray], col: list[int]) -> list[int]:
    """Coarsest equitable refinement of ``col``; new colours are ranks of
    (old colour, sorted neighbour colours), so cell order is preserved."""
    return kernels.refine_colours(csr[0], csr[1], np.asarray(col, dtype=np.int64)).tolist()


def _individualize(col: list[int], v: int) -> list[int]:
    # v goes in front of the rest of its cell
    c = col[v]
    return [2 * x + (0 if (u == v or x != c) else 1) for u, x in enumerate(col)]


def _orbits(cell: list[int], gens: list[tuple[int, ...]]) -> dict[int, int]:
    parent = {v: v for v in cell}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for v in cell:
            w = g[v]
            if w in parent:
                a, b = find(v), find(w)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    return {v: find(v) for v in cell}


def canonical_labelling(
    n: int,
    edges: Sequence[tuple[int, int]],
    colours: Sequence[Hashable] | None = None,
    *,
    limit: int | None = None,
) -> tuple[tuple, tuple[int, ...]]:
    """Return ``(certificate, perm)`` where ``perm[v]`` is the canonical position of ``v``.

    ``colours`` are arbitrary sortable vertex colours that must be preserved.
    Loops ``(v, v)`` are allowed.  Two coloured graphs are isomorphic iff their
    certificates are equal.
    """
    lim = MAX_CANON_VERTICES if limit is None else limit
    if n > lim:
        raise SizeLimitError(f"canonical labelling refused: {n} vertices > limit {lim}")
    if colours is None:
        colours = [0] * n
    adjs: list[set[int]] = [set() for _ in range(n)]
    loops = [False] * n
    for u, v in edges:
        if u == v:
            loops[u] = True
        else:
            adjs[u].add(v)
            adjs[v].add(u)
    adj = _csr([sorted(s) for s in adjs])
    keyed = [(colours[v], loops[v]) for v in range(n)]
    vals = sorted(set(keyed))
    rank = {c: i for i, c in enumerate(vals)}
    col0 = _refine(adj, [rank[k] for k in keyed])
    edge_list = [(u, v) for u, v in {(min(a, b), max(a, b)) for a, b in edges}]

    best: list = [None, None]  # certificate, perm
    autos: list[tuple[int, ...]] = []

    def leaf(col: list[int]) -> None:
        perm = tuple(col)
        inv = [0] * n
        for v, p in enumerate(perm):
            inv[p] = v
        es = sorted((min(perm[u], perm[v]), max(perm[u], perm[v])) for u, v in edge_list)
        cert = (n, tuple(keyed[inv[p]] for p in range(n)), tuple(es))
        if best[0] is None or cert < best[0]:
            best[0], best[1] = cert, perm
        elif cert == best[0]:
            # perm^-1 of best composed with this leaf: an automorphism
            binv = [0] * n
            for v, p in enumerate(best[1]):
                binv[p] = v
            autos.append(tuple(binv[perm[v]] for v in range(n)))

    def search(col: list[int], prefix: tuple[int, ...]) -> None:
        counts: dict[int, int] = {}
        for x in col:
            counts[x] = counts.get(x, 0) + 1
        if len(counts) == n:
            leaf(col)
            return
        target = min((k, c) for c, k in counts.items() if k > 1)[1]
        cell = [v for v in range(n) if col[v] == target]
        done: set[int] = set()
        for v in cell:
            if done:
                stab = [g for g in autos if all(g[p] == p for p in prefix)]
                orb = _orbits(cell, stab)
                if any(orb[v] == orb[w] for w in done):
                    continue
            done.add(v)
            search(_refine(adj, _individualize(col, v)), prefix + (v,))

    search(col0, ())
    return best[0], best[1]


def graph_certificate(g: Graph, colours: Sequence[Hashable] | None = None, *, limit: int | None = None) -> tuple:
    return canonical_labelling(g.n, g.sorted_edges(), colours, limit=limit)[0]


def canonical_graph(g: Graph) -> Graph:
    _, perm = canonical_labelling(g.n, g.sorted_edges())
    return g.relabel(perm)


def are_isomorphic(g: Graph, h: Graph, *, limit: int | None = None) -> dict[int, int] | None:
    """An edge-preserving bijection ``V(g) -> V(h)``, or ``None`` if the graphs are not isomorphic.

    Raises :class:`SizeLimitError` above ``limit`` vertices.
    """
    if g.n != h.n or g.m != h.m or g.degree_sequence() != h.degree_sequence():
        return None
    cg, pg = canonical_labelling(g.n, g.sorted_edges(), limit=limit)
    ch, ph = canonical_labelling(h.n, h.sorted_edges(), limit=limit)
    if cg != ch:
        return None
    hinv = [0] * h.n
    for v, p in enumerate(ph):
        hinv[p] = v
    bij = {v: hinv[pg[v]] for v in range(g.n)}
    if {(min(bij[u], bij[v]), max(bij[u], bij[v])) for u, v in g.edges} != set(h.edges):
        raise AssertionError("canonical labelling produced a non-isomorphism")
    return bij
