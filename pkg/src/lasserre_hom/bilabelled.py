"""(t,t)-bilabelled graphs: atomic generators, composition, label action, minors.

Label positions are 1-based in the generator API (``atomic_A(t, i, j)``) and
0-based everywhere else; a permutation ``sigma`` of the ``2t`` positions is a
0-based tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .canon import canonical_labelling
from .graph import Graph, GraphError, GraphParseError


class BilabelError(GraphError):
    """Invalid bilabelled graph or operation."""


@dataclass(frozen=True)
class BilabelledGraph:
    """Graph (loops allowed) with in-labels ``ins`` and out-labels ``outs``, each a ``t``-tuple of vertices."""

    t: int
    graph: Graph
    ins: tuple[int, ...]
    outs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.t < 1:
            raise BilabelError("t must be at least 1")
        if len(self.ins) != self.t or len(self.outs) != self.t:
            raise BilabelError(f"label tuples must have length t={self.t}")
        for x in self.ins + self.outs:
            if not 0 <= x < self.graph.n:
                raise BilabelError(f"label {x} is not a vertex")
        if not self.graph.loops:
            object.__setattr__(self, "graph", Graph(self.graph.n, self.graph.edges, True))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def labels(self) -> tuple[int, ...]:
        """Concatenated label tuple ``ins + outs``."""
        return self.ins + self.outs

    @property
    def labelled(self) -> frozenset[int]:
        return frozenset(self.labels)

    @property
    def unlabelled(self) -> list[int]:
        lab = self.labelled
        return [v for v in range(self.n) if v not in lab]

    def is_atomic(self) -> bool:
        return len(self.labelled) == self.n

    @property
    def has_loops(self) -> bool:
        return self.graph.has_loops

    @cached_property
    def key(self) -> bytes:
        return canonical_key(self)

    def __repr__(self) -> str:
        return f"BilabelledGraph({serialize(self)!r})"


def _glue(t: int, parts: Sequence[BilabelledGraph], pairs: Iterable[tuple[int, int]],
          ins: Sequence[int], outs: Sequence[int]) -> BilabelledGraph:
    """Disjoint union of ``parts`` (global ids by offset), identify ``pairs``, relabel."""
    total = sum(p.n for p in parts)
    parent = list(range(total))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(x) for x in range(total)})
    ren = {r: i for i, r in enumerate(roots)}
    es = set()
    off = 0
    for p in parts:
        for u, v in p.graph.edges:
            a, b = ren[find(u + off)], ren[find(v + off)]
            es.add((a, b) if a <= b else (b, a))
        off += p.n
    g = Graph(len(roots), frozenset(es), True)
    return BilabelledGraph(t, g, tuple(ren[find(x)] for x in ins), tuple(ren[find(x)] for x in outs))


def _same_t(a: BilabelledGraph, b: BilabelledGraph) -> None:
    if a.t != b.t:
        raise BilabelError(f"arity mismatch: t={a.t} vs t={b.t}")


def series(fa: BilabelledGraph, fb: BilabelledGraph) -> BilabelledGraph:
    """``fa . fb``: glue ``fa.outs[i]`` to ``fb.ins[i]``; labels ``(fa.ins, fb.outs)``."""
    _same_t(fa, fb)
    o = fa.n
    pairs = [(fa.outs[i], o + fb.ins[i]) for i in range(fa.t)]
    return _glue(fa.t, (fa, fb), pairs, fa.ins, [o + x for x in fb.outs])


def parallel(fa: BilabelledGraph, fb: BilabelledGraph) -> BilabelledGraph:
    """``fa (.) fb``: glue in-labels and out-labels positionwise."""
    _same_t(fa, fb)
    o = fa.n
    pairs = [(fa.ins[i], o + fb.ins[i]) for i in range(fa.t)]
    pairs += [(fa.outs[i], o + fb.outs[i]) for i in range(fa.t)]
    return _glue(fa.t, (fa, fb), pairs, fa.ins, fa.outs)


def series_all(fs: Sequence[BilabelledGraph]) -> BilabelledGraph:
    out = fs[0]
    for f in fs[1:]:
        out = series(out, f)
    return out


def parallel_all(fs: Sequence[BilabelledGraph], t: int | None = None) -> BilabelledGraph:
    """Parallel composition of ``fs``; the empty composition is ``J``."""
    if not fs:
        if t is None:
            raise BilabelError("empty parallel composition needs t")
        return atomic_J(t)
    out = fs[0]
    for f in fs[1:]:
        out = parallel(out, f)
    return out


def check_perm(sigma: Sequence[int], size: int) -> tuple[int, ...]:
    s = tuple(int(x) for x in sigma)
    if sorted(s) != list(range(size)):
        raise BilabelError(f"{list(sigma)} is not a permutation of 0..{size - 1}")
    return s


def permute_labels(f: BilabelledGraph, sigma: Sequence[int]) -> BilabelledGraph:
    """``F^sigma``: new label at position ``p`` is the old label at position ``sigma[p]``."""
    s = check_perm(sigma, 2 * f.t)
    w = f.labels
    nw = tuple(w[s[p]] for p in range(2 * f.t))
    return BilabelledGraph(f.t, f.graph, nw[:f.t], nw[f.t:])


def compose_perms(sigma: Sequence[int], tau: Sequence[int]) -> tuple[int, ...]:
    """The permutation ``rho`` with ``permute_labels(permute_labels(F, sigma), tau) == permute_labels(F, rho)``."""
    return tuple(sigma[tau[p]] for p in range(len(sigma)))


def invert_perm(sigma: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(sigma)
    for p, q in enumerate(sigma):
        inv[q] = p
    return tuple(inv)


def swap_perm(t: int) -> tuple[int, ...]:
    return tuple(range(t, 2 * t)) + tuple(range(t))


def transpose(f: BilabelledGraph) -> BilabelledGraph:
    """``F*``: in- and out-labels swapped."""
    return BilabelledGraph(f.t, f.graph, f.outs, f.ins)


def unlabel(f: BilabelledGraph) -> Graph:
    """``soe F``: the underlying graph."""
    return f.graph


def trace_graph(f: BilabelledGraph) -> Graph:
    """``tr F``: identify ``ins[i]`` with ``outs[i]`` and forget labels; loops are kept."""
    g = _glue(f.t, (f,), zip(f.ins, f.outs), f.ins, f.outs)
    return g.graph


def simple_part(g: Graph) -> Graph | None:
    """``g`` as a simple graph, or ``None`` if it has a loop."""
    if g.has_loops:
        return None
    return Graph(g.n, g.edges)


# -- atomic graphs -----------------------------------------------------------------


def _check_pos(t: int, i: int, j: int) -> None:
    if t < 1:
        raise BilabelError("t must be at least 1")
    if not (1 <= i < j <= 2 * t):
        raise BilabelError(f"need 1 <= i < j <= 2t = {2 * t}, got i={i}, j={j}")


def atomic(t: int, blocks: Sequence[int], edges: Iterable[tuple[int, int]] = ()) -> BilabelledGraph:
    """Atomic graph whose label position ``p`` (0-based) sits on vertex ``blocks[p]``.

    ``blocks`` must use every vertex ``0..max`` (restricted growth not required).
    """
    if len(blocks) != 2 * t:
        raise BilabelError("need one block index per label position")
    n = max(blocks) + 1
    if set(blocks) != set(range(n)):
        raise BilabelError("atomic graphs have no unlabelled vertices")
    g = Graph.from_edges(n, edges, loops=True)
    return BilabelledGraph(t, g, tuple(blocks[:t]), tuple(blocks[t:]))


def atomic_J(t: int) -> BilabelledGraph:
    return atomic(t, list(range(2 * t)))


def atomic_A(t: int, i: int, j: int) -> BilabelledGraph:
    _check_pos(t, i, j)
    return atomic(t, list(range(2 * t)), [(i - 1, j - 1)])


def atomic_I(t: int, i: int, j: int) -> BilabelledGraph:
    _check_pos(t, i, j)
    blocks, nxt = [], 0
    for p in range(2 * t):
        if p == j - 1:
            blocks.append(blocks[i - 1])
        else:
            blocks.append(nxt)
            nxt += 1
    return atomic(t, blocks)


def identity(t: int) -> BilabelledGraph:
    """``I^{1,t+1} (.) ... (.) I^{t,2t}``, the unit for series composition."""
    return atomic(t, list(range(t)) * 2)


def set_partitions(m: int):
    """Restricted-growth strings of length ``m``."""
    def rec(prefix: list[int], mx: int):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for b in range(mx + 2):
            yield from rec(prefix + [b], max(mx, b))
    if m == 0:
        yield ()
        return
    yield from rec([0], 0)


def enumerate_atomic(t: int, with_loops: bool = False) -> list[BilabelledGraph]:
    """All atomic (t,t)-bilabelled graphs up to label-respecting isomorphism.

    One per (partition of the label positions, edge set on the blocks).  Distinct
    such pairs are never isomorphic, since an isomorphism of atomic graphs is
    fixed by the labels; the canonical-key dedup is kept as a guard.  With
    ``with_loops`` a loop may sit on a block of two or more positions: those are
    the looped graphs the generators J, A^ij, I^ij produce (``A^ij (.) I^ij``).
    """
    out: dict[bytes, BilabelledGraph] = {}
    for blocks in set_partitions(2 * t):
        k = max(blocks) + 1
        slots = list(combinations(range(k), 2))
        if with_loops:
            slots += [(v, v) for v in range(k) if blocks.count(v) > 1]
        for mask in range(1 << len(slots)):
            es = [slots[b] for b in range(len(slots)) if mask >> b & 1]
            f = atomic(t, blocks, es)
            out.setdefault(f.key, f)
    return [out[k] for k in sorted(out)]


def count_atomic(t: int, with_loops: bool = False) -> int:
    """Sum over partitions of the 2t positions of 2^(edge slots); no graph is built."""
    total = 0
    for blocks in set_partitions(2 * t):
        k = max(blocks) + 1
        slots = k * (k - 1) // 2
        if with_loops:
            slots += sum(1 for v in range(k) if blocks.count(v) > 1)
        total += 2 ** slots
    return total


# -- minor operations ------------------------------------------------------------


def delete_edge(f: BilabelledGraph, u: int, v: int) -> BilabelledGraph:
    if not f.graph.has_edge(u, v):
        raise BilabelError(f"{(u, v)} is not an edge")
    return BilabelledGraph(f.t, f.graph.without_edge(u, v), f.ins, f.outs)


def contract_edge(f: BilabelledGraph, u: int, v: int) -> BilabelledGraph:
    """Contract the edge ``uv``; labels on either endpoint move to the merged vertex."""
    if u == v or not f.graph.has_edge(u, v):
        raise BilabelError(f"{(u, v)} is not a non-loop edge")
    keep = [w for w in range(f.n) if w != v]
    pos = {w: i for i, w in enumerate(keep)}
    pos[v] = pos[u]
    es = set()
    for a, b in f.graph.edges:
        if {a, b} == {u, v}:
            continue
        x, y = pos[a], pos[b]
        es.add((min(x, y), max(x, y)))
    g = Graph(f.n - 1, frozenset(es), True)
    return BilabelledGraph(f.t, g, tuple(pos[x] for x in f.ins), tuple(pos[x] for x in f.outs))


def delete_unlabelled_vertex(f: BilabelledGraph, v: int) -> BilabelledGraph:
    if v in f.labelled:
        raise BilabelError(f"vertex {v} carries a label and cannot be deleted")
    g, pos = f.graph.induced(w for w in range(f.n) if w != v)
    return BilabelledGraph(f.t, g, tuple(pos[x] for x in f.ins), tuple(pos[x] for x in f.outs))


def minor_children(f: BilabelledGraph) -> list[BilabelledGraph]:
    """Every graph one bilabelled minor operation away from ``f``."""
    out = []
    for u, v in f.graph.sorted_edges():
        out.append(delete_edge(f, u, v))
        if u != v:
            out.append(contract_edge(f, u, v))
    for v in f.unlabelled:
        out.append(delete_unlabelled_vertex(f, v))
    return out


# -- canonical keys and text form --------------------------------------------------


def _colours(f: BilabelledGraph) -> list[tuple]:
    return [
        (tuple(p for p, x in enumerate(f.ins) if x == v), tuple(p for p, x in enumerate(f.outs) if x == v))
        for v in range(f.n)
    ]


#: Largest number of cell-respecting orders tried directly before falling back to the search.
CELL_BRUTE_CAP = 720


def _cell_key(f: BilabelledGraph, cols: list[tuple]) -> tuple | None:
    """Minimum adjacency code over all orders respecting the refined colour cells.

    The ordered cells come from equitable refinement of the label colours, an
    isomorphism invariant, so the minimum is a canonical form.  ``None`` when
    there are more than :data:`CELL_BRUTE_CAP` orders.
    """
    n = f.n
    nb: list[list[int]] = [[] for _ in range(n)]
    loop = bytearray(n)
    for u, v in f.graph.edges:
        if u == v:
            loop[u] = 1
        else:
            nb[u].append(v)
            nb[v].append(u)
    keyed = [(cols[v], loop[v]) for v in range(n)]
    rank = {c: i for i, c in enumerate(sorted(set(keyed)))}
    ptr = np.zeros(n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(a) for a in nb])
    idx = np.fromiter((u for a in nb for u in a), dtype=np.int32, count=int(ptr[-1]))
    res = kernels.cell_code(ptr, idx, np.frombuffer(bytes(loop), dtype=np.uint8),
                            np.fromiter((rank[k] for k in keyed), dtype=np.int64, count=n), CELL_BRUTE_CAP)
    if res is None:
        return None
    _, order, code = res
    return (n, tuple(keyed[v] for v in order.tolist()), code)


def canonical_key(f: BilabelledGraph) -> bytes:
    """Equal iff the graphs are isomorphic by a map respecting both label tuples."""
    cols = _colours(f)
    fast = _cell_key(f, cols)
    if fast is not None:
        return repr((f.t, "cells", fast)).encode()
    cert, _ = canonical_labelling(f.n, f.graph.sorted_edges(), cols)
    return repr((f.t, cert)).encode()


def canonical_form(f: BilabelledGraph) -> BilabelledGraph:
    _, perm = canonical_labelling(f.n, f.graph.sorted_edges(), _colours(f))
    g = Graph(f.n, frozenset(tuple(sorted((perm[u], perm[v]))) for u, v in f.graph.edges), True)
    return BilabelledGraph(f.t, g, tuple(perm[x] for x in f.ins), tuple(perm[x] for x in f.outs))


def labelled_isomorphic(a: BilabelledGraph, b: BilabelledGraph) -> bool:
    return a.t == b.t and a.n == b.n and a.graph.m == b.graph.m and a.key == b.key


def serialize(f: BilabelledGraph) -> str:
    """One-line text form ``t; n; u v,u v,...; in tuple; out tuple``."""
    es = ",".join(f"{u} {v}" for u, v in f.graph.sorted_edges())
    return f"{f.t}; {f.n}; {es}; {' '.join(map(str, f.ins))}; {' '.join(map(str, f.outs))}"


def parse(text: str) -> BilabelledGraph:
    parts = [p.strip() for p in text.strip().split(";")]
    if len(parts) != 5:
        raise GraphParseError(f"expected 5 ';'-separated fields, got {len(parts)}", offset=0)
    try:
        t, n = int(parts[0]), int(parts[1])
        es = []
        if parts[2]:
            for chunk in parts[2].split(","):
                u, v = chunk.split()
                es.append((int(u), int(v)))
        ins = tuple(int(x) for x in parts[3].split())
        outs = tuple(int(x) for x in parts[4].split())
    except ValueError as exc:
        raise GraphParseError(f"malformed bilabelled graph: {exc}", offset=0) from None
    try:
        return BilabelledGraph(t, Graph.from_edges(n, es, loops=True), ins, outs)
    except GraphError as exc:
        raise GraphParseError(str(exc), offset=0) from None


def all_perms(t: int) -> list[tuple[int, ...]]:
    """``S_{2t}`` in lexicographic one-line order."""
    return list(permutations(range(2 * t)))
