"""Outerplanarity through the two forbidden minors K4 and K_{2,3}."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .canon import SizeLimitError
from .graph import Graph, GraphError

MAX_OUTERPLANAR_VERTICES = 14


@dataclass(frozen=True)
class MinorWitness:
    """Forbidden minor found in a graph: ``name`` is ``"K4"`` or ``"K2,3"``;
    ``branch_sets[i]`` are the original vertices contracted onto minor vertex ``i``."""

    name: str
    branch_sets: tuple[frozenset[int], ...]


class NotOuterplanarError(GraphError):
    def __init__(self, message: str, witness: MinorWitness):
        super().__init__(f"{message}: {witness.name} minor with branch sets "
                         f"{[sorted(b) for b in witness.branch_sets]}")
        self.witness = witness


def _adj(g: Graph) -> dict[int, set[int]]:
    return {v: set(g.neighbours[v]) - {v} for v in range(g.n)}


def has_k4_minor(g: Graph) -> bool:
    """Series-parallel reduction: a graph has no K4 minor iff repeatedly removing
    vertices of degree at most one and suppressing degree-two vertices empties it."""
    adj = _adj(g)
    changed = True
    while adj and changed:
        changed = False
        for v in sorted(adj):
            d = len(adj[v])
            if d <= 1:
                for u in adj[v]:
                    adj[u].discard(v)
                del adj[v]
                changed = True
                break
            if d == 2:
                a, b = sorted(adj[v])
                adj[a].discard(v)
                adj[b].discard(v)
                adj[a].add(b)
                adj[b].add(a)
                del adj[v]
                changed = True
                break
    return bool(adj)


def _disjoint_paths(adj: dict[int, set[int]], a: int, b: int, need: int) -> int:
    """Number (capped at ``need``) of internally disjoint a-b paths avoiding the edge ab."""
    # split each vertex x into (x, 0) -> (x, 1) with capacity 1
    cap: dict[tuple, dict[tuple, int]] = {}

    def add(u, v, c):
        cap.setdefault(u, {})
        cap.setdefault(v, {})
        cap[u][v] = cap[u].get(v, 0) + c
        cap[v].setdefault(u, 0)

    for x in adj:
        add((x, 0), (x, 1), need if x in (a, b) else 1)
        for y in adj[x]:
            if {x, y} != {a, b}:
                add((x, 1), (y, 0), 1)
    src, dst = (a, 1), (b, 0)
    flow = 0
    while flow < need:
        prev = {src: None}
        queue = [src]
        for u in queue:
            if u == dst:
                break
            for v, c in sorted(cap[u].items()):
                if c > 0 and v not in prev:
                    prev[v] = u
                    queue.append(v)
        if dst not in prev:
            break
        v = dst
        while prev[v] is not None:
            u = prev[v]
            cap[u][v] -= 1
            cap[v][u] += 1
            v = u
        flow += 1
    return flow


def has_k23_minor(g: Graph) -> bool:
    """K_{2,3} has maximum degree 3, so a minor is a subdivision; its two degree-3
    vertices a, b are joined by three internally disjoint paths of length >= 2."""
    adj = _adj(g)
    cands = [v for v in adj if len(adj[v]) >= 3]
    for a, b in combinations(cands, 2):
        if _disjoint_paths(adj, a, b, 3) >= 3:
            return True
    return False


def _check(g: Graph, limit: int | None) -> None:
    lim = MAX_OUTERPLANAR_VERTICES if limit is None else limit
    if g.n > lim:
        raise SizeLimitError(f"outerplanarity test refused: {g.n} vertices > limit {lim}")


def is_outerplanar(g: Graph, *, limit: int | None = None) -> bool:
    _check(g, limit)
    if g.has_loops:
        g = Graph(g.n, frozenset(e for e in g.edges if e[0] != e[1]))
    return not has_k4_minor(g) and not has_k23_minor(g)


def forbidden_minor(g: Graph, *, limit: int | None = None) -> MinorWitness | None:
    """A K4 or K_{2,3} minor of ``g`` with its branch sets, or ``None`` if ``g`` is outerplanar.

    Greedily deletes vertices and edges and contracts edges while the graph stays
    non-outerplanar; what remains is a minimal forbidden minor.
    """
    if is_outerplanar(g, limit=limit):
        return None
    cur = Graph(g.n, frozenset(e for e in g.edges if e[0] != e[1]))
    branch = [frozenset([v]) for v in range(g.n)]
    progress = True
    while progress:
        progress = False
        for v in range(cur.n):
            h = cur.delete_vertex(v)
            if not is_outerplanar(h, limit=limit):
                cur = h
                branch = branch[:v] + branch[v + 1:]
                progress = True
                break
        if progress:
            continue
        for u, v in cur.sorted_edges():
            h = cur.without_edge(u, v)
            if not is_outerplanar(h, limit=limit):
                cur = h
                progress = True
                break
        if progress:
            continue
        for u, v in cur.sorted_edges():
            h = cur.contract(u, v)
            if not is_outerplanar(h, limit=limit):
                merged = branch[u] | branch[v]
                nb = [b for i, b in enumerate(branch) if i != v]
                nb[u if u < v else u - 1] = merged
                cur, branch = h, nb
                progress = True
                break
    if cur.n == 4 and cur.m == 6:
        return MinorWitness("K4", tuple(branch))
    if cur.n == 5 and cur.m == 6:
        degs = [cur.degree(v) for v in range(5)]
        order = sorted(range(5), key=lambda v: (-degs[v], v))
        return MinorWitness("K2,3", tuple(branch[v] for v in order))
    raise AssertionError(f"minimal non-outerplanar minor is neither K4 nor K2,3: {cur}")


def outerplanar_by_embedding(g: Graph) -> bool:
    """Reference test: some cyclic vertex order makes every edge a non-crossing chord.

    A graph is outerplanar iff it has a 1-page book embedding.  Exhaustive over
    ``(n-1)!`` orders, intended for tiny graphs.
    """
    from itertools import permutations

    n = g.n
    es = [e for e in g.sorted_edges() if e[0] != e[1]]
    if n <= 3:
        return True
    for rest in permutations(range(1, n)):
        pos = [0] * n
        for i, v in enumerate((0,) + rest):
            pos[v] = i
        chords = [tuple(sorted((pos[u], pos[v]))) for u, v in es]
        ok = True
        for (a, b), (c, d) in combinations(chords, 2):
            if a < c < b < d or c < a < d < b:
                ok = False
                break
        if ok:
            return True
    return False
