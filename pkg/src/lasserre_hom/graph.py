"""Plain graphs on the vertex set ``range(n)`` and their text formats."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]


class GraphError(ValueError):
    """Invalid graph data."""


class GraphParseError(GraphError):
    """Malformed graph text; carries the 1-based line (edge-list) or byte offset (graph6)."""

    def __init__(self, message: str, *, line: int | None = None, offset: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.offset = offset


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected graph without multi-edges.

    ``edges`` holds normalised pairs ``(u, v)`` with ``u <= v``; a pair ``(u, u)``
    is a loop and is only accepted when ``loops`` is set.
    """

    n: int
    edges: frozenset[Edge] = frozenset()
    loops: bool = False

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError("negative vertex count")
        norm = set()
        for e in self.edges:
            u, v = e
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {e} has an endpoint outside [0, {self.n})")
            if u == v and not self.loops:
                raise GraphError(f"loop at vertex {u} in a simple graph")
            norm.add(_norm(int(u), int(v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], *, loops: bool = False) -> Graph:
        return cls(n, frozenset(_norm(int(u), int(v)) for u, v in edges), loops)

    # -- basic structure -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def neighbours(self) -> tuple[frozenset[int], ...]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return tuple(frozenset(s) for s in nb)

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = 1
            a[v, u] = 1
        a.setflags(write=False)
        return a

    @property
    def has_loops(self) -> bool:
        return any(u == v for u, v in self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def degree(self, v: int) -> int:
        return len(self.neighbours[v] - {v})

    def degree_sequence(self) -> tuple[int, ...]:
        return tuple(sorted((self.degree(v) for v in range(self.n)), reverse=True))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    # -- derived graphs --------------------------------------------------

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabelling is not a permutation")
        return Graph(self.n, frozenset(_norm(perm[u], perm[v]) for u, v in self.edges), self.loops)

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, dict[int, int]]:
        """Induced subgraph on ``vertices`` (renumbered in sorted order) and the old->new map."""
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        es = frozenset(_norm(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos)
        return Graph(len(vs), es, self.loops), pos

    def without_edge(self, u: int, v: int) -> Graph:
        return Graph(self.n, self.edges - {_norm(u, v)}, self.loops)

    def with_edge(self, u: int, v: int) -> Graph:
        return Graph(self.n, self.edges | {_norm(u, v)}, self.loops or u == v)

    def delete_vertex(self, x: int) -> Graph:
        return self.induced(v for v in range(self.n) if v != x)[0]

    def contract(self, u: int, v: int) -> Graph:
        """Merge ``v`` into ``u`` (then renumber); loops from the merged edge are dropped."""
        keep = [w for w in range(self.n) if w != v]
        pos = {w: i for i, w in enumerate(keep)}
        pos[v] = pos[u]
        es = set()
        for a, b in self.edges:
            a2, b2 = pos[a], pos[b]
            if a2 == b2 and {a, b} == {u, v}:
                continue
            es.add(_norm(a2, b2))
        return Graph(self.n - 1, frozenset(es), self.loops or any(a == b for a, b in es))

    def subdivide(self, u: int, v: int) -> Graph:
        if not self.has_edge(u, v):
            raise GraphError(f"{(u, v)} is not an edge")
        w = self.n
        es = (self.edges - {_norm(u, v)}) | {(u, w) if u < w else (w, u), _norm(v, w)}
        return Graph(self.n + 1, frozenset(es), self.loops)

    def disjoint_union(self, other: Graph) -> Graph:
        off = self.n
        es = set(self.edges) | {(u + off, v + off) for u, v in other.edges}
        return Graph(self.n + other.n, frozenset(es), self.loops or other.loops)

    # -- connectivity ----------------------------------------------------

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            stack, comp = [s], []
            seen[s] = True
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self.neighbours[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.sorted_edges()})"


def complement(g: Graph) -> Graph:
    """Complement of a simple graph."""
    if g.has_loops:
        raise GraphError("complement is defined for simple graphs only")
    es = frozenset((u, v) for u, v in combinations(range(g.n), 2) if (u, v) not in g.edges)
    return Graph(g.n, es)


# -- standard families --------------------------------------------------------


def empty_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycles need at least 3 vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, ((i, a + j) for i in range(a) for j in range(b)))


def disjoint_union(*graphs: Graph) -> Graph:
    out = Graph(0)
    for g in graphs:
        out = out.disjoint_union(g)
    return out


def prism(k: int) -> Graph:
    """The prism ``C_k x K_2``."""
    es = [(i, (i + 1) % k) for i in range(k)]
    es += [(k + i, k + (i + 1) % k) for i in range(k)]
    es += [(i, k + i) for i in range(k)]
    return Graph.from_edges(2 * k, es)


# -- rel types ------------------------------------------------------------------


@dataclass(frozen=True)
class RelType:
    """Equality and adjacency pattern of a vertex tuple.

    Both patterns are sets of 1-based position pairs ``(i, j)`` with ``i < j``.
    """

    k: int
    equal: frozenset[tuple[int, int]]
    adjacent: frozenset[tuple[int, int]]

    @property
    def code(self) -> int:
        """Integer encoding: bit ``2p`` marks equality, bit ``2p+1`` adjacency of the p-th pair."""
        c = 0
        for p, (i, j) in enumerate(combinations(range(1, self.k + 1), 2)):
            if (i, j) in self.equal:
                c |= 1 << (2 * p)
            if (i, j) in self.adjacent:
                c |= 1 << (2 * p + 1)
        return c


def rel_type(g: Graph, tup: Sequence[int]) -> RelType:
    k = len(tup)
    if k < 1:
        raise GraphError("rel_type needs a non-empty tuple")
    for x in tup:
        if not 0 <= x < g.n:
            raise GraphError(f"{x} is not a vertex")
    eq, adj = set(), set()
    for i, j in combinations(range(k), 2):
        if tup[i] == tup[j]:
            eq.add((i + 1, j + 1))
        if g.has_edge(tup[i], tup[j]):
            adj.add((i + 1, j + 1))
    return RelType(k, frozenset(eq), frozenset(adj))


def rel_codes(g: Graph, k: int) -> np.ndarray:
    """``rel_type(g, x).code`` for every ``x`` in ``range(n)**k``, in row-major tuple order."""
    n = g.n
    if k == 0:
        return np.zeros(1, dtype=np.int64)
    idx = np.indices((n,) * k).reshape(k, -1)
    code = np.zeros(idx.shape[1], dtype=np.int64)
    a = g.adjacency
    for p, (i, j) in enumerate(combinations(range(k), 2)):
        xi, xj = idx[i], idx[j]
        code |= (xi == xj).astype(np.int64) << (2 * p)
        code |= a[xi, xj] << (2 * p + 1)
    return code


# -- text formats -----------------------------------------------------------------


def _g6_size(n: int) -> str:
    if n < 63:
        return chr(n + 63)
    if n < 258048:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def to_graph6(g: Graph) -> str:
    if g.has_loops:
        raise GraphError("graph6 encodes simple graphs only")
    bits = [1 if (i, j) in g.edges else 0 for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    body = "".join(chr(int("".join(map(str, bits[p:p + 6])), 2) + 63) for p in range(0, len(bits), 6))
    return _g6_size(g.n) + body


def from_graph6(text: str) -> Graph:
    s = text.strip()
    start = 0
    if s.startswith(">>graph6<<"):
        start = 10
    data = s[start:]
    for off, ch in enumerate(data):
        if not 63 <= ord(ch) <= 126:
            raise GraphParseError(f"invalid graph6 byte {ch!r}", offset=start + off)
    if not data:
        raise GraphParseError("empty graph6 string", offset=start)
    vals = [ord(c) - 63 for c in data]
    if vals[0] != 63:
        n, pos = vals[0], 1
    elif len(vals) >= 2 and vals[1] == 63:
        if len(vals) < 8:
            raise GraphParseError("truncated graph6 size field", offset=start)
        n = 0
        for v in vals[2:8]:
            n = (n << 6) | v
        pos = 8
    else:
        if len(vals) < 4:
            raise GraphParseError("truncated graph6 size field", offset=start)
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        pos = 4
    need = n * (n - 1) // 2
    nbytes = (need + 5) // 6
    body = vals[pos:]
    if len(body) != nbytes:
        raise GraphParseError(
            f"expected {nbytes} data bytes for {n} vertices, found {len(body)}", offset=start + pos
        )
    bits = []
    for v in body:
        bits.extend((v >> s) & 1 for s in range(5, -1, -1))
    es = []
    b = 0
    for j in range(1, n):
        for i in range(j):
            if bits[b]:
                es.append((i, j))
            b += 1
    if any(bits[need:]):
        raise GraphParseError("non-zero padding bits", offset=start + len(vals) - 1)
    return Graph.from_edges(n, es)


def to_edge_list(g: Graph) -> str:
    lines = [str(g.n)] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> Graph:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphParseError("missing vertex-count header", line=1)
    hline, header = lines[0]
    try:
        n = int(header)
    except ValueError:
        raise GraphParseError(f"malformed header {header!r}", line=hline) from None
    if n < 0:
        raise GraphParseError("negative vertex count", line=hline)
    seen: set[Edge] = set()
    for lineno, ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected 'u v', got {ln!r}", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"non-integer vertex in {ln!r}", line=lineno) from None
        for x in (u, v):
            if not 0 <= x < n:
                raise GraphParseError(f"vertex {x} out of range [0, {n})", line=lineno)
        if u == v:
            raise GraphParseError(f"loop at vertex {u}", line=lineno)
        e = _norm(u, v)
        if e in seen:
            raise GraphParseError(f"duplicate edge {e}", line=lineno)
        seen.add(e)
    return Graph(n, frozenset(seen))


FORMATS = ("graph6", "edgelist")


def parse_graph(text: str, fmt: str) -> Graph:
    if fmt == "graph6":
        return from_graph6(text)
    if fmt in ("edgelist", "edge-list"):
        return from_edge_list(text)
    raise ValueError(f"unknown format {fmt!r}")


def serialize_graph(g: Graph, fmt: str) -> str:
    if fmt == "graph6":
        return to_graph6(g) + "\n"
    if fmt in ("edgelist", "edge-list"):
        return to_edge_list(g)
    raise ValueError(f"unknown format {fmt!r}")


def sniff_format(text: str) -> str:
    """Guess the format of a graph file: edge lists start with a decimal header."""
    first = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    if first.startswith(">>graph6<<"):
        return "graph6"
    return "edgelist" if " " in first or first.lstrip("-").isdigit() else "graph6"
