"""Members of the classes L_t and L_t^+ with their derivations.

A derivation is a nested tuple over four node kinds::

    ("atomic", F)          F an atomic BilabelledGraph
    ("series", d1, d2)
    ("parallel", d1, d2)
    ("sigma", perm, d)     perm a 0-based permutation of the 2t label positions

L_t^+ allows every node kind; L_t requires every parallel node to have a child
whose graph is atomic.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from itertools import combinations, permutations
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .bilabelled import (
    CELL_BRUTE_CAP,
    BilabelError,
    BilabelledGraph,
    atomic,
    atomic_A,
    atomic_I,
    atomic_J,
    enumerate_atomic,
    parallel,
    parse,
    permute_labels,
    serialize,
    series,
)
from .decomposition import DecompositionError, TreeDecomposition, pathwidth_exact, smooth_decomposition, treewidth_exact
from .graph import Graph, GraphError
from .outerplanar import NotOuterplanarError, forbidden_minor, is_outerplanar

L_T = "L_t"
L_T_PLUS = "L_t_plus"
_FAMILY_ALIASES = {"L_t": L_T, "L": L_T, "Lt": L_T, "L_t_plus": L_T_PLUS, "L+": L_T_PLUS, "Lplus": L_T_PLUS, "L_t^+": L_T_PLUS}

Derivation = tuple


def family_name(name: str) -> str:
    try:
        return _FAMILY_ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; use L_t or L_t_plus") from None


# -- derivations -------------------------------------------------------------------


def replay(d: Derivation) -> BilabelledGraph:
    kind = d[0]
    if kind == "atomic":
        return d[1]
    if kind == "series":
        return series(replay(d[1]), replay(d[2]))
    if kind == "parallel":
        return parallel(replay(d[1]), replay(d[2]))
    if kind == "sigma":
        return permute_labels(replay(d[2]), d[1])
    raise BilabelError(f"unknown derivation node {kind!r}")


def derivation_depth(d: Derivation) -> int:
    """Number of series/parallel levels; label permutations do not count."""
    if d[0] == "atomic":
        return 0
    if d[0] == "sigma":
        return derivation_depth(d[2])
    return 1 + max(derivation_depth(d[1]), derivation_depth(d[2]))


def derivation_ok(d: Derivation, family: str) -> bool:
    """Whether ``d`` only uses operations allowed in ``family``."""
    fam = family_name(family)
    kind = d[0]
    if kind == "atomic":
        return d[1].is_atomic() and not d[1].has_loops
    if kind == "sigma":
        return derivation_ok(d[2], fam)
    if not (derivation_ok(d[1], fam) and derivation_ok(d[2], fam)):
        return False
    if kind == "parallel" and fam == L_T:
        return replay(d[1]).is_atomic() or replay(d[2]).is_atomic()
    return kind in ("series", "parallel")


def to_sexpr(d: Derivation) -> str:
    kind = d[0]
    if kind == "atomic":
        return f'(atomic "{serialize(d[1])}")'
    if kind == "sigma":
        return f"(sigma ({' '.join(map(str, d[1]))}) {to_sexpr(d[2])})"
    return f"({kind} {to_sexpr(d[1])} {to_sexpr(d[2])})"


_TOKEN = re.compile(r'\s*(\(|\)|"[^"]*"|[^\s()"]+)')


def parse_sexpr(text: str) -> Derivation:
    toks = _TOKEN.findall(text)
    pos = 0

    def expect(tok: str) -> None:
        nonlocal pos
        if pos >= len(toks) or toks[pos] != tok:
            raise ValueError(f"expected {tok!r} at token {pos}")
        pos += 1

    def node() -> Derivation:
        nonlocal pos
        expect("(")
        kind = toks[pos]
        pos += 1
        if kind == "atomic":
            s = toks[pos]
            pos += 1
            out: Derivation = ("atomic", parse(s.strip('"')))
        elif kind == "sigma":
            expect("(")
            perm = []
            while toks[pos] != ")":
                perm.append(int(toks[pos]))
                pos += 1
            expect(")")
            out = ("sigma", tuple(perm), node())
        elif kind in ("series", "parallel"):
            a = node()
            out = (kind, a, node())
        else:
            raise ValueError(f"unknown node {kind!r}")
        expect(")")
        return out

    d = node()
    if pos != len(toks):
        raise ValueError("trailing tokens after derivation")
    return d


@dataclass(frozen=True)
class FamilyMember:
    graph: BilabelledGraph
    derivation: Derivation
    family: str

    @property
    def key(self) -> bytes:
        return self.graph.key

    def replays(self) -> bool:
        return replay(self.derivation).key == self.graph.key

    def valid(self) -> bool:
        return self.replays() and derivation_ok(self.derivation, self.family)

    def to_line(self) -> str:
        return f"{serialize(self.graph)}\t{to_sexpr(self.derivation)}"

    @classmethod
    def from_line(cls, line: str, family: str) -> FamilyMember:
        g, d = line.rstrip("\n").split("\t")
        return cls(parse(g), parse_sexpr(d), family_name(family))


# small builders that keep graph and derivation in step
def _at(f: BilabelledGraph) -> tuple[BilabelledGraph, Derivation]:
    return f, ("atomic", f)


def _ser(a, b):
    return series(a[0], b[0]), ("series", a[1], b[1])


def _par(a, b):
    return parallel(a[0], b[0]), ("parallel", a[1], b[1])


def _sig(s, a):
    return permute_labels(a[0], s), ("sigma", tuple(s), a[1])


def _par_all(parts, t):
    if not parts:
        return _at(atomic_J(t))
    out = parts[0]
    for p in parts[1:]:
        out = _par(out, p)
    return out


# -- enumeration ----------------------------------------------------------------------


def _coset_perms(t: int) -> list[tuple[int, ...]]:
    """One permutation per coset ``sigma (S_t x S_t)``: the set of positions sent to the inputs."""
    out = []
    for ins in combinations(range(2 * t), t):
        rest = [p for p in range(2 * t) if p not in ins]
        out.append(tuple(ins) + tuple(rest))
    return out


class _Rec:
    """Compact member used during enumeration: labels, adjacency bitmasks, derivation."""

    __slots__ = ("n", "labels", "masks", "la", "ma", "deriv", "atomic")

    def __init__(self, n, labels, masks, deriv):
        self.n = n
        self.labels = labels
        self.masks = masks
        self.la = np.array(labels, dtype=np.int64)
        self.ma = np.array(masks, dtype=np.uint64)
        self.deriv = deriv
        self.atomic = len(set(labels)) == n

    @classmethod
    def of(cls, f: BilabelledGraph, deriv: Derivation) -> _Rec:
        masks = [0] * f.n
        for u, v in f.graph.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return cls(f.n, f.labels, tuple(masks), deriv)

    def graph(self, t: int) -> BilabelledGraph:
        es = frozenset((u, v) for u in range(self.n) for v in range(u, self.n) if self.masks[u] >> v & 1)
        return BilabelledGraph(t, Graph(self.n, es, True), self.labels[:t], self.labels[t:])


def _full_key(t: int, n: int, labels, masks, fast):
    # the cell code when it was affordable, else the general canonical key
    if fast is not None:
        return fast
    return _Rec(n, labels, masks, None).graph(t).key


#: Vertex budgets above this are refused (adjacency is held in 64-bit masks).
MAX_BUDGET = 64


def enumerate_family(
    t: int,
    family: str = L_T_PLUS,
    max_vertices: int = 4,
    max_depth: int | None = None,
    *,
    progress: Callable[[int, int], None] | None = None,
) -> list[FamilyMember]:
    """Closure of the loop-free atomic graphs under the family's operations.

    Every intermediate graph has at most ``max_vertices`` vertices and, if given,
    derivations have at most ``max_depth`` levels of series/parallel nodes (label
    permutations are free and may sit at any node).  Graphs with loops are
    discarded: no operation removes a loop and looped graphs have no
    homomorphisms into simple graphs.  Members are deduplicated by canonical key
    and returned sorted by vertex count, then by internal canonical code.

    The member set is closed under the label action, so only one representative
    per orbit is composed.  ``parallel(r^s, y) = parallel(r, y^(s^-1))^s`` lets the
    first factor be a representative; for series the first factor only matters
    up to permutations inside the inputs and inside the outputs, and
    ``series(x, y)^* = series(y^*, x^*)`` moves the newer factor to the front.
    """
    fam = family_name(family)
    if max_vertices > MAX_BUDGET:
        raise ValueError(f"vertex budget above {MAX_BUDGET} is not supported")
    perms = list(permutations(range(2 * t)))
    cosets = _coset_perms(t)
    unit = _Rec.of(atomic_J(t), None)
    glue = kernels.glue_code
    cap = CELL_BRUTE_CAP

    def key_of(n, labels, masks, la, ma):
        # parallel composition with J is the identity
        res = glue(t, n, la, ma, unit.n, unit.la, unit.ma, True, cap, MAX_BUDGET)
        return _full_key(t, n, labels, masks, res[3])

    members: dict = {}
    by_size: dict[int, list[_Rec]] = {}

    def add(rec: _Rec, k) -> None:
        members[k] = rec
        by_size.setdefault(rec.n, []).append(rec)

    def add_orbit(rec: _Rec, k, atomic_leaves: bool) -> None:
        add(rec, k)
        for s in perms[1:]:
            labels = tuple(rec.labels[q] for q in s)
            la = np.array(labels, dtype=np.int64)
            k2 = key_of(rec.n, labels, rec.masks, la, rec.ma)
            if k2 not in members:
                if atomic_leaves:
                    d = ("atomic", _Rec(rec.n, labels, rec.masks, None).graph(t))
                else:
                    d = ("sigma", s, rec.deriv)
                add(_Rec(rec.n, labels, rec.masks, d), k2)

    reps: list[tuple[_Rec, object]] = []
    for f in enumerate_atomic(t):
        if f.n <= max_vertices:
            rec = _Rec.of(f, ("atomic", f))
            k = key_of(rec.n, rec.labels, rec.masks, rec.la, rec.ma)
            if k not in members:
                reps.append((rec, k))
                add_orbit(rec, k, True)
    depth = 0
    while reps and (max_depth is None or depth < max_depth):
        depth += 1
        found: dict = {}

        def offer(res, d) -> None:
            if res is None:
                return
            n, labels, masks, fast = res
            k = _full_key(t, n, labels, masks, fast)
            if k not in members and k not in found:
                found[k] = (n, labels, masks, d)

        sizes = sorted(by_size)
        for r, rk in reps:
            for nb in sizes:
                if r.n + nb - 2 * t > max_vertices:
                    break
                for y in by_size[nb]:
                    if fam == L_T and not (r.atomic or y.atomic):
                        continue
                    offer(glue(t, r.n, r.la, r.ma, y.n, y.la, y.ma, True, cap, max_vertices),
                          ("parallel", r.deriv, y.deriv))
            firsts: dict = {}
            for s in cosets:
                labels = tuple(r.labels[q] for q in s)
                k = key_of(r.n, labels, r.masks, np.array(labels, dtype=np.int64), r.ma)
                firsts.setdefault(k, members[k])
            for x in firsts.values():
                for nb in sizes:
                    if x.n + nb - t > max_vertices:
                        break
                    for y in by_size[nb]:
                        offer(glue(t, x.n, x.la, x.ma, y.n, y.la, y.ma, False, cap, max_vertices),
                              ("series", x.deriv, y.deriv))
        reps = []
        for k, (n, labels, masks, d) in found.items():
            if k in members:  # same orbit as an earlier find
                continue
            rec = _Rec(n, labels, masks, d)
            reps.append((rec, k))
            add_orbit(rec, k, False)
        if progress is not None:
            progress(depth, len(members))
    order = sorted(members, key=lambda k: (members[k].n, repr(k)))
    return [FamilyMember(members[k].graph(t), members[k].deriv, fam) for k in order]


def _enumerate_naive(
    t: int,
    family: str = L_T_PLUS,
    max_vertices: int = 4,
    max_depth: int | None = None,
    *,
    progress: Callable[[int, int], None] | None = None,
) -> list[FamilyMember]:
    """Reference closure: every operation on every pair, sigma as its own level.

    Slow; kept as a test oracle for :func:`enumerate_family` (same result when
    ``max_depth`` is None).
    """
    fam = family_name(family)
    perms = [p for p in permutations(range(2 * t)) if p != tuple(range(2 * t))]
    members: dict[bytes, FamilyMember] = {}
    frontier: list[FamilyMember] = []
    for f in enumerate_atomic(t):
        if f.n <= max_vertices:
            m = FamilyMember(f, ("atomic", f), fam)
            members[f.key] = m
            frontier.append(m)
    by_size: dict[int, list[FamilyMember]] = {}
    for m in frontier:
        by_size.setdefault(m.graph.n, []).append(m)
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        depth += 1
        new: dict[bytes, FamilyMember] = {}

        def offer(gd) -> None:
            f, d = gd
            if f.n > max_vertices or f.has_loops:
                return
            k = f.key
            if k not in members and k not in new:
                new[k] = FamilyMember(f, d, fam)

        for a in frontier:
            ga = (a.graph, a.derivation)
            for s in perms:
                offer(_sig(s, ga))
            for nb, group in sorted(by_size.items()):
                if a.graph.n + nb - t <= max_vertices:
                    for b in group:
                        gb = (b.graph, b.derivation)
                        offer(_ser(ga, gb))
                        offer(_ser(gb, ga))
                if a.graph.n + nb - 2 * t <= max_vertices:
                    for b in group:
                        if fam == L_T and not (a.graph.is_atomic() or b.graph.is_atomic()):
                            continue
                        offer(_par(ga, (b.graph, b.derivation)))
        frontier = sorted(new.values(), key=lambda m: (m.graph.n, m.key))
        for m in frontier:
            members[m.key] = m
            by_size.setdefault(m.graph.n, []).append(m)
        if progress is not None:
            progress(depth, len(members))
    return sorted(members.values(), key=lambda m: (m.graph.n, m.key))


def dump_family(members: Iterable[FamilyMember], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in members:
            fh.write(m.to_line() + "\n")


def load_family(path: str | os.PathLike, family: str) -> list[FamilyMember]:
    with open(path, encoding="utf-8") as fh:
        return [FamilyMember.from_line(ln, family) for ln in fh if ln.strip()]


def cached_family(t: int, family: str, max_vertices: int, max_depth: int | None = None,
                  cache_dir: str | os.PathLike | None = None) -> list[FamilyMember]:
    """``enumerate_family`` memoised on disk under ``cache_dir`` (or ``$LASSERRE_HOM_CACHE``)."""
    fam = family_name(family)
    root = cache_dir or os.environ.get("LASSERRE_HOM_CACHE")
    if not root:
        return enumerate_family(t, fam, max_vertices, max_depth)
    path = Path(root) / f"family-t{t}-{fam}-v{max_vertices}-d{max_depth if max_depth is not None else 'inf'}.txt"
    if path.exists():
        return load_family(path, fam)
    members = enumerate_family(t, fam, max_vertices, max_depth)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    dump_family(members, tmp)
    os.replace(tmp, path)
    return members


# -- constructions ---------------------------------------------------------------------


def clique_witness(t: int) -> FamilyMember:
    """``E (.) (E . E)`` with ``E`` the parallel composition of all ``A^{ij}``; its graph is ``K_{3t}``."""
    if t < 1:
        raise BilabelError("t must be at least 1")
    parts = [_at(atomic_A(t, i, j)) for i in range(1, 2 * t + 1) for j in range(i + 1, 2 * t + 1)]
    e = _par_all(parts, t)
    f, d = _par(e, _ser(e, e))
    return FamilyMember(f, d, L_T)


def _padded(vs: Sequence[int], size: int) -> list[int]:
    vs = list(vs)
    return vs + [vs[-1]] * (size - len(vs))


def _atomic_on(f: Graph, labels: Sequence[int], t: int) -> BilabelledGraph:
    """Atomic graph labelled by ``labels`` (vertices of ``f``) with the edges of ``f`` among them."""
    distinct: list[int] = []
    for x in labels:
        if x not in distinct:
            distinct.append(x)
    pos = {x: i for i, x in enumerate(distinct)}
    es = [(pos[u], pos[v]) for u, v in f.sorted_edges() if u in pos and v in pos]
    return atomic(t, [pos[x] for x in labels], es)


def _check_nonempty(f: Graph) -> None:
    if f.n == 0:
        raise GraphError("the empty graph is not the underlying graph of a bilabelled graph")
    if f.has_loops:
        raise GraphError("constructions expect a simple graph")


def _rooted(td: TreeDecomposition) -> tuple[int, dict[int, list[int]]]:
    """Root at the node with the lexicographically smallest sorted bag; children sorted the same way."""
    key = lambda s: tuple(sorted(td.bags[s]))
    if td.is_path() and td.tree.n > 1:
        ends = [s for s in range(td.tree.n) if td.tree.degree(s) <= 1]
        root = min(ends, key=key)
    else:
        root = min(range(td.tree.n), key=key)
    children: dict[int, list[int]] = {}
    seen, queue = {root}, [root]
    for s in queue:
        kids = sorted((c for c in td.tree.neighbours[s] if c not in seen), key=key)
        children[s] = kids
        seen.update(kids)
        queue.extend(kids)
    return root, children


def _k_gadget(t: int, j: int) -> BilabelledGraph:
    """``K_j``: positions ``i`` and ``t+i`` identified for every ``i != j`` (1-based ``j``)."""
    blocks, nxt = [], 0
    ins = []
    for i in range(1, t + 1):
        ins.append(nxt)
        nxt += 1
    outs = []
    for i in range(1, t + 1):
        if i == j:
            outs.append(nxt)
            nxt += 1
        else:
            outs.append(ins[i - 1])
    return atomic(t, ins + outs)


def _build_2t(f: Graph, td: TreeDecomposition, t: int, family: str):
    root, children = _rooted(td)

    def build(s: int, labels: list[int]):
        base = _at(_atomic_on(f, labels, t))
        parts = []
        for c in children[s]:
            (x,) = td.bags[s] - td.bags[c]
            (y,) = td.bags[c] - td.bags[s]
            j = labels.index(x)
            sub = build(c, labels[:j] + [y] + labels[j + 1:])
            if j < t:
                parts.append(_ser(_at(_k_gadget(t, j + 1)), sub))
            else:
                parts.append(_ser(sub, _at(_k_gadget(t, j - t + 1))))
        out = base
        for p in parts:
            out = _par(out, p)
        return out

    return build(root, sorted(td.bags[root]))


def from_treewidth_2t(f: Graph, t: int) -> FamilyMember:
    """Member of L_t^+ whose underlying graph is ``f``.

    For ``t >= 2`` this needs treewidth at most ``2t - 1`` and follows the smooth
    tree decomposition with ``K_j`` relabelling gadgets.  For ``t = 1`` it accepts
    treewidth at most 2 via the three-vertex bag recursion
    ``F = F_2 (.) (F_3 . F_1)``.
    """
    _check_nonempty(f)
    if t < 1:
        raise BilabelError("t must be at least 1")
    if t == 1:
        return _from_tw2(f)
    if f.n <= 2 * t:
        g = _atomic_on(f, _padded(range(f.n), 2 * t), t)
        return FamilyMember(g, ("atomic", g), L_T_PLUS)
    w, _ = treewidth_exact(f)
    if w > 2 * t - 1:
        raise DecompositionError(f"treewidth {w} exceeds {2 * t - 1}", width=w)
    td = smooth_decomposition(f, 2 * t - 1, "tree")
    g, d = _build_2t(f, td, t, L_T_PLUS)
    return FamilyMember(g, d, L_T_PLUS)


def _from_tw2(f: Graph) -> FamilyMember:
    if f.n <= 2:
        g = _atomic_on(f, _padded(range(f.n), 2), 1)
        return FamilyMember(g, ("atomic", g), L_T_PLUS)
    w, _ = treewidth_exact(f)
    if w > 2:
        raise DecompositionError(f"treewidth {w} exceeds 2", width=w)
    td = smooth_decomposition(f, 2, "tree")
    root, children = _rooted(td)

    def edge_part(a: int, b: int):
        return _at(_atomic_on(f, [a, b], 1))

    def side(s: int, a: int, b: int):
        # A or J on (a, b), in parallel with every child of s sharing {a, b}
        parts = [edge_part(a, b)]
        for c in children[s]:
            if td.bags[c] & td.bags[s] == {a, b}:
                parts.append(node(c, a, b))
        return _par_all(parts, 1)

    def node(s: int, a: int, b: int):
        # subtree at s, labelled (a, b); the third bag vertex stays unlabelled
        (c,) = td.bags[s] - {a, b}
        return _par(side(s, a, b), _ser(side(s, a, c), side(s, c, b)))

    x1, x2, x3 = sorted(td.bags[root])
    g, d = _par(side(root, x1, x3), _ser(side(root, x1, x2), side(root, x2, x3)))
    return FamilyMember(g, d, L_T_PLUS)


def from_pathwidth(f: Graph, t: int) -> FamilyMember:
    """Member of L_t whose underlying graph is ``f``; needs pathwidth at most ``2t - 1``."""
    _check_nonempty(f)
    if t < 1:
        raise BilabelError("t must be at least 1")
    if f.n <= 2 * t:
        g = _atomic_on(f, _padded(range(f.n), 2 * t), t)
        return FamilyMember(g, ("atomic", g), L_T)
    w, _ = pathwidth_exact(f)
    if w > 2 * t - 1:
        raise DecompositionError(f"pathwidth {w} exceeds {2 * t - 1}", width=w)
    td = smooth_decomposition(f, 2 * t - 1, "path")
    g, d = _build_2t(f, td, t, L_T)
    return FamilyMember(g, d, L_T)


def from_treewidth_t(f: Graph, t: int) -> FamilyMember:
    """Member of L_t with both label tuples equal whose underlying graph is ``f``; needs treewidth at most ``t - 1``."""
    _check_nonempty(f)
    if t < 1:
        raise BilabelError("t must be at least 1")
    if f.n <= t:
        u = _padded(range(f.n), t)
        g = _atomic_on(f, u + u, t)
        return FamilyMember(g, ("atomic", g), L_T)
    w, _ = treewidth_exact(f)
    if w > t - 1:
        raise DecompositionError(f"treewidth {w} exceeds {t - 1}", width=w)
    td = smooth_decomposition(f, t - 1, "tree")
    root, children = _rooted(td)

    def build(s: int, u: list[int]):
        parts = []
        for c in children[s]:
            (x,) = td.bags[s] - td.bags[c]
            (y,) = td.bags[c] - td.bags[s]
            j = u.index(x)
            sub = build(c, u[:j] + [y] + u[j + 1:])
            k = _at(_k_gadget(t, j + 1))
            parts.append(_par(_at(atomic_I(t, j + 1, t + j + 1)), _ser(_ser(k, sub), k)))
        base = _at(_atomic_on(f, u + u, t))
        if not parts:
            return base
        chain = parts[0]
        for p in parts[1:]:
            chain = _ser(chain, p)
        return _par(base, chain)

    g, d = build(root, sorted(td.bags[root]))
    return FamilyMember(g, d, L_T)


# -- outerplanar graphs and L_1 -----------------------------------------------------------


def expansion(f: BilabelledGraph) -> Graph:
    """Underlying graph plus a path of length two between the two labels."""
    if f.t != 1:
        raise BilabelError("expansion is defined for (1,1)-bilabelled graphs")
    x = f.n
    g = Graph(f.n + 1, f.graph.edges, True)
    return Graph(f.n + 1, g.edges | {(f.ins[0], x), (f.outs[0], x)}, True)


def _sub(f: BilabelledGraph, keep: Iterable[int], u: int, v: int) -> BilabelledGraph:
    g, pos = f.graph.induced(keep)
    return BilabelledGraph(1, g, (pos[u],), (pos[v],))


def _component(g: Graph, s: int, banned: int | None = None) -> set[int]:
    seen, stack = {s}, [s]
    while stack:
        x = stack.pop()
        for y in g.neighbours[x]:
            if y != banned and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def _in_op(f: BilabelledGraph) -> bool:
    return is_outerplanar(expansion(f))


def _op_rec(f: BilabelledGraph):
    A, I, J = atomic_A(1, 1, 2), atomic_I(1, 1, 2), atomic_J(1)
    if f.is_atomic():
        return _at(f)
    g = f.graph
    u, v = f.ins[0], f.outs[0]
    if u == v:
        nbrs = sorted(g.neighbours[u] - {u})
        if not nbrs:
            x = min(w for w in range(f.n) if w != u)
            k = BilabelledGraph(1, g, (u,), (x,))
            return _par(_at(I), _ser(_op_rec(k), _at(J)))
        for x in nbrs:
            k = BilabelledGraph(1, g.without_edge(u, x), (u,), (x,))
            if _in_op(k):
                return _par(_at(I), _ser(_par(_at(A), _op_rec(k)), _at(J)))
        raise AssertionError("no neighbour keeps the subdivision outerplanar")
    if g.has_edge(u, v):
        k = BilabelledGraph(1, g.without_edge(u, v), (u,), (v,))
        return _par(_at(A), _op_rec(k))
    comp_u = _component(g, u)
    if v in comp_u:
        for x in range(f.n):
            if x in (u, v):
                continue
            a = _component(g, u, banned=x)
            if v in a:
                continue
            b = _component(g, v, banned=x)
            rest = set(range(f.n)) - a - b - {x}
            k = _sub(f, a | {x}, u, x)
            l_ = _sub(f, b | rest | {x}, x, v)
            return _ser(_op_rec(k), _op_rec(l_))
        raise AssertionError("labels joined by two disjoint paths in a graph whose expansion is outerplanar")
    a = comp_u
    b = _component(g, v)
    c = set(range(f.n)) - a - b
    if len(a) + len(c) >= 2:
        k = _sub(f, a | c, u, u)
        l_ = _ser(_at(J), _op_rec(_sub(f, b, v, v)))
        return _ser(_op_rec(k), l_)
    k = _ser(_op_rec(_sub(f, a, u, u)), _at(J))
    return _ser(k, _op_rec(_sub(f, b, v, v)))


def op_to_l1(f: BilabelledGraph) -> FamilyMember:
    """L_1 derivation of a (1,1)-bilabelled graph whose expansion is outerplanar.

    Recursion: shared label ``u``: ``I (.) ((A (.) K) . J)`` or ``I (.) (K . J)``;
    adjacent labels: ``A (.) K``; otherwise a series split at a cut vertex, or
    across components.
    """
    if f.t != 1:
        raise BilabelError("op_to_l1 needs a (1,1)-bilabelled graph")
    if f.has_loops:
        raise GraphError("op_to_l1 expects a loop-free graph")
    ex = expansion(f)
    w = forbidden_minor(Graph(ex.n, ex.edges))
    if w is not None:
        raise NotOuterplanarError("expansion is not outerplanar", w)
    g, d = _op_rec(f)
    return FamilyMember(g, d, L_T)


def outerplanar_to_l1(f: Graph) -> FamilyMember:
    """``op_to_l1`` on ``f`` with both labels on vertex 0 (expansion adds a pendant edge)."""
    _check_nonempty(f)
    return op_to_l1(BilabelledGraph(1, Graph(f.n, f.edges, True), (0,), (0,)))
