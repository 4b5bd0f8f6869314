"""Tree and path decompositions: validation, exact width, smoothing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .canon import SizeLimitError
from .graph import Graph, GraphError

#: Default refusal threshold for the exponential width searches.
MAX_WIDTH_VERTICES = 12


class DecompositionError(GraphError):
    """Invalid decomposition, or a width precondition that does not hold."""

    def __init__(self, message: str, *, condition: int | None = None, width: int | None = None):
        super().__init__(message)
        self.condition = condition
        self.width = width


@dataclass(frozen=True)
class TreeDecomposition:
    """Tree on nodes ``0..len(bags)-1`` with a vertex set per node."""

    tree: Graph
    bags: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.tree.n != len(self.bags):
            raise DecompositionError("one bag per tree node required")
        if self.tree.n and (self.tree.m != self.tree.n - 1 or not self.tree.is_connected()):
            raise DecompositionError("decomposition shape is not a tree")

    @classmethod
    def build(cls, bags: Sequence[Iterable[int]], tree_edges: Iterable[tuple[int, int]]) -> TreeDecomposition:
        bs = tuple(frozenset(b) for b in bags)
        return cls(Graph.from_edges(len(bs), tree_edges), bs)

    @classmethod
    def single_bag(cls, g: Graph) -> TreeDecomposition:
        return cls(Graph(1), (frozenset(range(g.n)),))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def is_path(self) -> bool:
        return all(self.tree.degree(s) <= 2 for s in range(self.tree.n))

    def path_order(self) -> list[int]:
        """Nodes in path order starting from the smaller-numbered endpoint."""
        if not self.is_path():
            raise DecompositionError("decomposition is not a path")
        if self.tree.n == 1:
            return [0]
        ends = [s for s in range(self.tree.n) if self.tree.degree(s) <= 1]
        order, prev = [min(ends)], -1
        while len(order) < self.tree.n:
            cur = order[-1]
            nxt = [x for x in self.tree.neighbours[cur] if x != prev]
            prev = cur
            order.append(nxt[0])
        return order

    def validate(self, g: Graph) -> None:
        """Raise :class:`DecompositionError` naming the first violated condition (1 cover, 2 edges, 3 connectivity)."""
        covered = frozenset().union(*self.bags) if self.bags else frozenset()
        if any(not 0 <= x < g.n for x in covered):
            raise DecompositionError("bag contains a non-vertex", condition=1)
        missing = set(range(g.n)) - covered
        if missing:
            raise DecompositionError(f"condition 1 (cover) violated: vertex {min(missing)} in no bag", condition=1)
        for u, v in g.sorted_edges():
            if not any(u in b and v in b for b in self.bags):
                raise DecompositionError(f"condition 2 (edges) violated: edge {(u, v)} in no bag", condition=2)
        for x in range(g.n):
            nodes = [s for s, b in enumerate(self.bags) if x in b]
            sub, _ = self.tree.induced(nodes)
            if not sub.is_connected():
                raise DecompositionError(f"condition 3 (connectivity) violated for vertex {x}", condition=3)

    def is_valid(self, g: Graph) -> bool:
        try:
            self.validate(g)
        except DecompositionError:
            return False
        return True


# -- exact widths -------------------------------------------------------------------


def _masks(g: Graph) -> list[int]:
    return [sum(1 << u for u in g.neighbours[v] if u != v) for v in range(g.n)]


def _q(nb: list[int], s: int, v: int) -> int:
    """Vertices outside ``s | {v}`` reachable from ``v`` through ``s``."""
    seen = 1 << v
    frontier = 1 << v
    out = 0
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            x = low.bit_length() - 1
            f ^= low
            nxt |= nb[x]
        nxt &= ~seen
        seen |= nxt
        out |= nxt & ~s
        frontier = nxt & s
    return out


def _check_size(g: Graph, limit: int | None) -> None:
    lim = MAX_WIDTH_VERTICES if limit is None else limit
    if g.n > lim:
        raise SizeLimitError(f"exact width search refused: {g.n} vertices > limit {lim}")


def elimination_width(g: Graph, order: Sequence[int]) -> int:
    """Width of the elimination ordering ``order`` (max higher-degree in the fill-in graph)."""
    nb = _masks(g)
    s, w = 0, -1
    for v in order:
        w = max(w, bin(_q(nb, s, v)).count("1"))
        s |= 1 << v
    return w


def decomposition_from_order(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Tree decomposition induced by an elimination ordering."""
    n = g.n
    if n == 0:
        return TreeDecomposition(Graph(1), (frozenset(),))
    nb = _masks(g)
    pos = {v: i for i, v in enumerate(order)}
    bags, s = [], 0
    for v in order:
        q = _q(nb, s, v)
        bags.append(frozenset([v] + [u for u in range(n) if q >> u & 1]))
        s |= 1 << v
    edges, roots = [], []
    for i, v in enumerate(order):
        higher = [u for u in bags[i] if u != v]
        if higher:
            edges.append((i, min(pos[u] for u in higher)))
        else:
            roots.append(i)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition.build(bags, edges)


def treewidth_exact(g: Graph, *, limit: int | None = None) -> tuple[int, TreeDecomposition]:
    """Exact treewidth by dynamic programming over vertex subsets."""
    _check_size(g, limit)
    n = g.n
    if n == 0:
        return -1, decomposition_from_order(g, [])
    nb = _masks(g)
    full = (1 << n) - 1
    tw = [0] * (1 << n)
    choice = [0] * (1 << n)
    tw[0] = -1
    for s in range(1, full + 1):
        best, arg = n + 1, -1
        t = s
        while t:
            low = t & -t
            v = low.bit_length() - 1
            t ^= low
            rest = s ^ low
            val = max(tw[rest], bin(_q(nb, rest, v)).count("1"))
            if val < best:
                best, arg = val, v
        tw[s], choice[s] = best, arg
    order, s = [], full
    while s:
        v = choice[s]
        order.append(v)
        s ^= 1 << v
    order.reverse()
    td = decomposition_from_order(g, order)
    return tw[full], td


def _boundary(nbm: list[int], s: int) -> int:
    b, t = 0, s
    while t:
        low = t & -t
        v = low.bit_length() - 1
        t ^= low
        if nbm[v] & ~s:
            b |= low
    return b


def pathwidth_exact(g: Graph, *, limit: int | None = None) -> tuple[int, TreeDecomposition]:
    """Exact pathwidth via vertex separation number; the result is a path decomposition."""
    _check_size(g, limit)
    n = g.n
    if n == 0:
        return -1, TreeDecomposition(Graph(1), (frozenset(),))
    nb = _masks(g)
    full = (1 << n) - 1
    pw = [0] * (1 << n)
    choice = [0] * (1 << n)
    for s in range(1, full + 1):
        best, arg = n + 1, -1
        t = s
        while t:
            low = t & -t
            t ^= low
            if pw[s ^ low] < best:
                best, arg = pw[s ^ low], low.bit_length() - 1
        pw[s] = max(best, bin(_boundary(nb, s)).count("1"))
        choice[s] = arg
    order, s = [], full
    while s:
        v = choice[s]
        order.append(v)
        s ^= 1 << v
    order.reverse()
    bags, s = [], 0
    for v in order:
        bd = _boundary(nb, s)
        bags.append(frozenset([v] + [u for u in range(n) if bd >> u & 1]))
        s |= 1 << v
    td = TreeDecomposition.build(bags, [(i, i + 1) for i in range(n - 1)])
    return max(td.width, 0) if n else -1, td


# -- smoothing --------------------------------------------------------------------------


def smooth(td: TreeDecomposition, k: int) -> TreeDecomposition:
    """Make every bag have ``k + 1`` vertices and adjacent bags share ``k``.

    Repeats, lexicographically first choice each time: contract a tree edge whose
    bags are nested; grow an undersized bag by a vertex of a neighbouring bag;
    subdivide a tree edge whose bags share fewer than ``k`` vertices.  Paths stay
    paths.  Requires width at most ``k`` and at least ``k + 1`` vertices overall.
    """
    bags = {s: set(b) for s, b in enumerate(td.bags)}
    adj = {s: set(td.tree.neighbours[s]) for s in range(td.tree.n)}
    nxt = len(bags)

    def edges():
        return sorted((a, b) for a in adj for b in adj[a] if a < b)

    while True:
        changed = False
        for a, b in edges():
            if bags[a] <= bags[b] or bags[b] <= bags[a]:
                keep, drop = (a, b) if len(bags[a]) >= len(bags[b]) else (b, a)
                bags[keep] |= bags[drop]
                for x in adj[drop]:
                    if x != keep:
                        adj[x].discard(drop)
                        adj[x].add(keep)
                        adj[keep].add(x)
                adj[keep].discard(drop)
                del adj[drop], bags[drop]
                changed = True
                break
        if changed:
            continue
        for s in sorted(bags):
            if len(bags[s]) < k + 1 and adj[s]:
                t = min(adj[s])
                bags[s].add(min(bags[t] - bags[s]))
                changed = True
                break
        if changed:
            continue
        for a, b in edges():
            if len(bags[a] & bags[b]) < k:
                v = min(bags[a] - bags[b])
                w = min(bags[b] - bags[a])
                c = nxt
                nxt += 1
                bags[c] = (bags[a] - {v}) | {w}
                adj[a].discard(b)
                adj[b].discard(a)
                adj[c] = {a, b}
                adj[a].add(c)
                adj[b].add(c)
                changed = True
                break
        if not changed:
            break
    nodes = sorted(bags)
    ren = {s: i for i, s in enumerate(nodes)}
    return TreeDecomposition.build(
        [bags[s] for s in nodes], [(ren[a], ren[b]) for a, b in edges()]
    )


def smooth_decomposition(g: Graph, k: int, shape: str = "tree", *, limit: int | None = None) -> TreeDecomposition:
    """Smooth tree (``shape="tree"``) or path (``shape="path"``) decomposition of width ``k``."""
    if shape not in ("tree", "path"):
        raise ValueError(f"unknown shape {shape!r}")
    if g.n < k + 1:
        raise DecompositionError(f"need at least {k + 1} vertices for bags of size {k + 1}, graph has {g.n}")
    w, td = (treewidth_exact if shape == "tree" else pathwidth_exact)(g, limit=limit)
    if w > k:
        what = "treewidth" if shape == "tree" else "pathwidth"
        raise DecompositionError(f"{what} {w} exceeds bound {k}", width=w)
    out = smooth(td, k)
    out.validate(g)
    return out
