"""Small-graph corpora: exhaustive enumeration, degree-matched pairs, CFI pairs."""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations

from .canon import are_isomorphic, graph_certificate
from .graph import Graph, GraphError, complete_graph, cycle_graph


@lru_cache(maxsize=None)
def all_graphs(n: int) -> tuple[Graph, ...]:
    """All graphs on ``n`` vertices up to isomorphism, each in canonical vertex order.

    Built by adding a vertex with every neighbourhood to each graph on ``n - 1``
    vertices and keeping one representative per certificate.
    """
    if n < 0:
        raise GraphError("negative vertex count")
    if n == 0:
        return (Graph(0),)
    seen: dict[tuple, Graph] = {}
    for base in all_graphs(n - 1):
        for r in range(n):
            for nb in combinations(range(n - 1), r):
                g = Graph(n, base.edges | frozenset((u, n - 1) for u in nb))
                cert = graph_certificate(g)
                if cert not in seen:
                    seen[cert] = g
    return tuple(seen[c] for c in sorted(seen))


def graphs_up_to(n: int) -> list[Graph]:
    return [g for k in range(n + 1) for g in all_graphs(k)]


def degree_matched_pairs(max_n: int = 7, count: int = 400, seed: int = 0, min_n: int = 2) -> list[tuple[Graph, Graph]]:
    """Sample of non-isomorphic pairs with equal degree sequences.

    All such pairs up to ``max_n`` are listed in a fixed order and ``count`` of
    them are drawn with ``random.Random(seed)`` (all of them if fewer exist).
    """
    pairs = []
    for n in range(min_n, max_n + 1):
        groups: dict[tuple, list[Graph]] = {}
        for g in all_graphs(n):
            groups.setdefault(g.degree_sequence(), []).append(g)
        for ds in sorted(groups):
            pairs.extend(combinations(groups[ds], 2))
    if len(pairs) <= count:
        return pairs
    rng = random.Random(seed)
    idx = sorted(rng.sample(range(len(pairs)), count))
    return [pairs[i] for i in idx]


def cfi_pair(base: Graph) -> tuple[Graph, Graph]:
    """The untwisted and twisted CFI graphs over ``base``.

    Each base vertex ``v`` with incident edges ``E(v)`` gets attribute vertices
    ``a(v,e,0)``, ``a(v,e,1)`` for ``e`` in ``E(v)`` and a middle vertex ``m(v,S)``
    for each even-size ``S`` of ``E(v)``; ``m(v,S)`` is adjacent to ``a(v,e,1)`` if
    ``e`` is in ``S`` and to ``a(v,e,0)`` otherwise.  For a base edge ``e = uv`` the
    vertices ``a(u,e,i)`` and ``a(v,e,i)`` are joined; in the twisted copy the
    lexicographically first base edge is joined crosswise instead.
    """
    if base.has_loops:
        raise GraphError("cfi base must be simple")
    if base.n == 0 or not base.is_connected():
        raise GraphError("cfi base must be connected")
    if min(base.degree(v) for v in range(base.n)) < 2:
        raise GraphError("cfi base must have minimum degree 2")
    bedges = base.sorted_edges()
    ids: dict[tuple, int] = {}

    def vid(key: tuple) -> int:
        if key not in ids:
            ids[key] = len(ids)
        return ids[key]

    inner = []
    for v in range(base.n):
        inc = [e for e in bedges if v in e]
        for e in inc:
            vid(("a", v, e, 0))
            vid(("a", v, e, 1))
        for r in range(0, len(inc) + 1, 2):
            for s in combinations(inc, r):
                m = vid(("m", v, s))
                for e in inc:
                    inner.append((m, ids[("a", v, e, 1 if e in s else 0)]))
    outs = []
    for twist in (False, True):
        es = list(inner)
        for k, e in enumerate(bedges):
            u, w = e
            for i in (0, 1):
                j = 1 - i if (twist and k == 0) else i
                es.append((ids[("a", u, e, i)], ids[("a", w, e, j)]))
        outs.append(Graph.from_edges(len(ids), es))
    return outs[0], outs[1]


def shrikhande_graph() -> Graph:
    """Cayley graph of Z4 x Z4 with connection set {±(1,0), ±(0,1), ±(1,1)}."""
    conn = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    es = set()
    for a in range(16):
        x, y = divmod(a, 4)
        for dx, dy in conn:
            b = ((x + dx) % 4) * 4 + (y + dy) % 4
            es.add((min(a, b), max(a, b)))
    return Graph(16, frozenset(es))


def rook_graph(k: int = 4) -> Graph:
    """The k x k rook's graph (line graph of K_{k,k})."""
    es = []
    for a, b in combinations(range(k * k), 2):
        (x1, y1), (x2, y2) = divmod(a, k), divmod(b, k)
        if x1 == x2 or y1 == y2:
            es.append((a, b))
    return Graph.from_edges(k * k, es)


def relabelled_copy(g: Graph, rng: random.Random) -> Graph:
    perm = list(range(g.n))
    rng.shuffle(perm)
    return g.relabel(perm)


def hard_pairs() -> list[tuple[str, Graph, Graph]]:
    """Named non-isomorphic pairs that defeat low-dimensional refinement."""
    out = []
    for name, base in (("cfi-K3", complete_graph(3)), ("cfi-C4", cycle_graph(4)), ("cfi-K4", complete_graph(4))):
        a, b = cfi_pair(base)
        out.append((name, a, b))
    out.append(("shrikhande-rook4", shrikhande_graph(), rook_graph(4)))
    return out


def isomorphic_pairs(max_n: int = 7, count: int = 50, seed: int = 0, min_n: int = 1) -> list[tuple[Graph, Graph]]:
    """Random graphs paired with random relabellings of themselves."""
    rng = random.Random(seed)
    pool = [g for n in range(min_n, max_n + 1) for g in all_graphs(n)]
    out = []
    for _ in range(count):
        g = rng.choice(pool)
        out.append((g, relabelled_copy(g, rng)))
    return out


def check_pair_distinct(g: Graph, h: Graph) -> bool:
    return are_isomorphic(g, h) is None
