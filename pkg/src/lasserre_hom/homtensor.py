"""Homomorphism counts and homomorphism tensors.

Counts are exact: arrays use int64 when every possible value fits (each entry
is at most ``n ** |V(F)|``) and Python integers (``dtype=object``) otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .bilabelled import BilabelledGraph, BilabelError, check_perm
from .canon import SizeLimitError
from .decomposition import DecompositionError, TreeDecomposition
from .graph import Graph, GraphError, rel_codes

MAX_BRUTE_PATTERN = 10
MAX_BRUTE_TARGET = 16
_I64_SAFE = 2**62


def _dtype_for(n: int, k: int):
    return np.int64 if n ** max(k, 0) < _I64_SAFE else object


def _search_order(f: Graph, first: Sequence[int] = ()) -> list[int]:
    """``first`` vertices, then the rest greedily by most already-placed neighbours."""
    order = list(first)
    placed = set(order)
    while len(order) < f.n:
        best = max(
            (v for v in range(f.n) if v not in placed),
            key=lambda v: (len(f.neighbours[v] & placed), len(f.neighbours[v]), -v),
        )
        order.append(best)
        placed.add(best)
    return order


def kernel_args(f: Graph, g: Graph, pinned: Sequence[int] = ()) -> tuple:
    """Arguments of ``kernels.hom_pinned`` for counting ``f -> g`` with ``pinned`` first."""
    order = _search_order(f, pinned)
    pos = {v: i for i, v in enumerate(order)}
    ptr = [0]
    idx: list[int] = []
    for v in order:
        idx.extend(sorted(pos[u] for u in f.neighbours[v] if u != v and pos[u] < pos[v]))
        ptr.append(len(idx))
    loops = np.array([1 if f.has_edge(v, v) else 0 for v in order], dtype=np.uint8)
    gadj = np.ascontiguousarray(g.adjacency, dtype=np.uint8)
    return (g.n, gadj, np.array(ptr, dtype=np.int64), np.array(idx, dtype=np.int32), loops, f.n, len(pinned))


def _pinned_counts(f: Graph, g: Graph, pinned: Sequence[int]) -> np.ndarray:
    """Vector over images of ``pinned`` (row-major) of homomorphism counts."""
    if g.n ** max(f.n - len(pinned), 0) >= _I64_SAFE:
        raise SizeLimitError("brute-force count would overflow 64-bit cells")
    return kernels.hom_pinned(*kernel_args(f, g, pinned))


def _check_brute(f: Graph, g: Graph, limit_f: int | None, limit_g: int | None) -> None:
    lf = MAX_BRUTE_PATTERN if limit_f is None else limit_f
    lg = MAX_BRUTE_TARGET if limit_g is None else limit_g
    if f.n > lf or g.n > lg:
        raise SizeLimitError(f"brute-force hom count refused: |V(F)|={f.n} (limit {lf}), |V(G)|={g.n} (limit {lg})")


def hom_count(f: Graph, g: Graph, *, limit_f: int | None = None, limit_g: int | None = None) -> int:
    """Number of homomorphisms ``f -> g`` by backtracking search."""
    _check_brute(f, g, limit_f, limit_g)
    # isolated loop-free vertices contribute a factor |V(g)| each
    iso = [v for v in range(f.n) if not f.neighbours[v]]
    core, _ = f.induced(v for v in range(f.n) if f.neighbours[v])
    c = int(_pinned_counts(core, g, ())[0]) if core.n else 1
    return c * g.n ** len(iso)


def hom_count_td(f: Graph, td: TreeDecomposition, g: Graph) -> int:
    """Number of homomorphisms ``f -> g`` by dynamic programming over ``td``."""
    td.validate(f)
    if f.n == 0:
        return 1
    n = g.n
    dt = _dtype_for(n, f.n)
    a = g.adjacency.astype(dt)
    diag = np.diag(g.adjacency).astype(dt)
    bags = [sorted(b) for b in td.bags]
    # rooted at node 0, children in increasing order
    parent = {0: None}
    order = [0]
    for s in order:
        for c in sorted(td.tree.neighbours[s]):
            if c not in parent:
                parent[c] = s
                order.append(c)
    owner: dict[tuple[int, int], int] = {}
    for s in order:
        for u, v in f.sorted_edges():
            if (u, v) not in owner and u in td.bags[s] and v in td.bags[s]:
                owner[(u, v)] = s
    tables: dict[int, np.ndarray] = {}
    for s in reversed(order):
        b = bags[s]
        ax = {x: i for i, x in enumerate(b)}
        tab = np.ones((n,) * len(b), dtype=dt)
        for (u, v), o in owner.items():
            if o != s:
                continue
            shape = [1] * len(b)
            if u == v:
                shape[ax[u]] = n
                tab = tab * diag.reshape(shape)
            else:
                fac = a if ax[u] < ax[v] else a.T
                shape[ax[u]] = n
                shape[ax[v]] = n
                tab = tab * fac.reshape(shape)
        for c in sorted(td.tree.neighbours[s]):
            if parent.get(c) != s:
                continue
            ct, cb = tables.pop(c), bags[c]
            drop = tuple(i for i, x in enumerate(cb) if x not in ax)
            msg = np.asarray(ct.sum(axis=drop), dtype=dt) if drop else ct
            shape = [1] * len(b)
            for x in cb:
                if x in ax:
                    shape[ax[x]] = n
            tab = tab * msg.reshape(shape)
        tables[s] = tab
    return int(tables[0].sum())


# -- variable elimination kernel --------------------------------------------------


def _align(vars_: Sequence[int], arr: np.ndarray, target: Sequence[int]) -> np.ndarray:
    """Broadcast a factor over ``vars_`` to the axis order ``target``."""
    present = [v for v in target if v in vars_]
    perm = [list(vars_).index(v) for v in present]
    arr = np.transpose(arr, perm) if perm else arr
    shape = [arr.shape[present.index(v)] if v in present else 1 for v in target]
    return arr.reshape(shape)


def _eliminate(factors: list[tuple[tuple[int, ...], np.ndarray]], drop: set[int], keep: Sequence[int], n: int, dt) -> np.ndarray:
    factors = list(factors)
    while drop:
        def cost(v):
            s = set()
            for vs, _ in factors:
                if v in vs:
                    s.update(vs)
            return (len(s), v)
        v = min(drop, key=cost)
        drop.discard(v)
        inv = [(vs, ar) for vs, ar in factors if v in vs]
        rest = [(vs, ar) for vs, ar in factors if v not in vs]
        if not inv:
            rest.append(((), np.array(n, dtype=dt)))
            factors = rest
            continue
        scope = sorted({x for vs, _ in inv for x in vs})
        prod = np.ones((1,) * len(scope), dtype=dt)
        for vs, ar in inv:
            prod = prod * _align(vs, ar, scope)
        prod = np.broadcast_to(prod, (n,) * len(scope)) if prod.ndim else prod
        ax = scope.index(v)
        out = prod.sum(axis=ax)
        rest.append((tuple(x for x in scope if x != v), np.asarray(out, dtype=dt)))
        factors = rest
    res = np.ones((1,) * len(keep), dtype=dt)
    for vs, ar in factors:
        res = res * _align(vs, ar, keep)
    return np.array(np.broadcast_to(res, (n,) * len(keep)), dtype=dt)


def _factors(f: Graph, g: Graph, dt) -> list[tuple[tuple[int, ...], np.ndarray]]:
    a = g.adjacency.astype(dt)
    d = np.diag(g.adjacency).astype(dt)
    out = []
    for u, v in f.sorted_edges():
        out.append(((u,), d) if u == v else ((u, v), a))
    return out


def hom_count_elim(f: Graph, g: Graph) -> int:
    """Number of homomorphisms by greedy variable elimination."""
    dt = _dtype_for(g.n, f.n)
    return int(_eliminate(_factors(f, g, dt), set(range(f.n)), (), g.n, dt).sum())


# -- tensors --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HomTensor:
    """Dense ``n^t x n^t`` array; row ``x`` and column ``y`` are base-``n`` digit tuples."""

    t: int
    n: int
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.shape != (self.n ** self.t, self.n ** self.t):
            raise GraphError(f"tensor shape {self.data.shape} does not match n={self.n}, t={self.t}")

    def __eq__(self, other) -> bool:
        return (isinstance(other, HomTensor) and self.t == other.t and self.n == other.n
                and bool(np.array_equal(self.data, other.data)))

    def __hash__(self):
        return hash((self.t, self.n, self.data.tobytes() if self.data.dtype != object else tuple(self.data.flat)))

    def full(self) -> np.ndarray:
        """The same entries as an array with ``2t`` axes of length ``n``."""
        return self.data.reshape((self.n,) * (2 * self.t))

    def entry(self, x: Sequence[int], y: Sequence[int]):
        return self.full()[tuple(x) + tuple(y)]

    def to_json(self) -> dict:
        return {"t": self.t, "n": self.n, "shape": list(self.data.shape), "data": [int(v) for v in self.data.flat]}

    @classmethod
    def from_json(cls, obj: dict) -> HomTensor:
        t, n = int(obj["t"]), int(obj["n"])
        vals = [int(v) for v in obj["data"]]
        big = any(abs(v) >= _I64_SAFE for v in vals)
        arr = np.array(vals, dtype=object if big else np.int64).reshape(n ** t, n ** t)
        return cls(t, n, arr)


def _unify(x: np.ndarray, y: np.ndarray):
    if x.dtype == object or y.dtype == object:
        return x.astype(object), y.astype(object)
    return x, y


def _same_shape(a: HomTensor, b: HomTensor) -> None:
    if a.t != b.t or a.n != b.n:
        raise GraphError(f"shape mismatch: (t={a.t}, n={a.n}) vs (t={b.t}, n={b.n})")


def _maybe_promote(a: np.ndarray, b: np.ndarray, inner: int) -> tuple[np.ndarray, np.ndarray]:
    """Switch to Python ints when a product could leave the int64 range."""
    a, b = _unify(a, b)
    if a.dtype != object:
        ma = int(np.abs(a).max()) if a.size else 0
        mb = int(np.abs(b).max()) if b.size else 0
        if ma * mb * max(inner, 1) >= _I64_SAFE:
            return a.astype(object), b.astype(object)
    return a, b


def matmul(a: HomTensor, b: HomTensor) -> HomTensor:
    """Contraction over the middle ``V^t`` index."""
    _same_shape(a, b)
    x, y = _maybe_promote(a.data, b.data, a.n ** a.t)
    return HomTensor(a.t, a.n, x.dot(y))


def schur(a: HomTensor, b: HomTensor) -> HomTensor:
    _same_shape(a, b)
    x, y = _maybe_promote(a.data, b.data, 1)
    return HomTensor(a.t, a.n, x * y)


def sigma_act(a: HomTensor, sigma: Sequence[int]) -> HomTensor:
    """Axis permutation matching ``permute_labels``: ``sigma_act(F_G, s) == (F^s)_G``."""
    s = check_perm(sigma, 2 * a.t)
    m = a.n ** a.t
    return HomTensor(a.t, a.n, np.ascontiguousarray(np.transpose(a.full(), s)).reshape(m, m))


def transpose_tensor(a: HomTensor) -> HomTensor:
    return HomTensor(a.t, a.n, np.ascontiguousarray(a.data.T))


def soe(a: HomTensor) -> int:
    return int(a.data.sum())


def trace(a: HomTensor) -> int:
    return int(np.trace(a.data))


def hom_tensor(f: BilabelledGraph, g: Graph, *, method: str = "auto") -> HomTensor:
    """``F_G``: entry ``(x, y)`` counts homomorphisms sending ``ins`` to ``x`` and ``outs`` to ``y``.

    ``method`` is ``"elim"`` (variable elimination over the unlabelled vertices),
    ``"brute"`` (backtracking over unlabelled vertices with labelled ones pinned),
    or ``"auto"`` (elimination).
    """
    t, n = f.t, g.n
    lab: list[int] = []
    for x in f.labels:
        if x not in lab:
            lab.append(x)
    if method == "brute":
        _check_brute(f.graph, g, None, None)
        counts = _pinned_counts(f.graph, g, lab).reshape((n,) * len(lab))
    elif method in ("auto", "elim"):
        dt = _dtype_for(n, f.n)
        unl = set(range(f.n)) - set(lab)
        counts = _eliminate(_factors(f.graph, g, dt), unl, lab, n, dt)
    else:
        raise ValueError(f"unknown method {method!r}")
    # spread over all 2t positions: w is admissible iff positions sharing a vertex agree
    idx = np.indices((n,) * (2 * t)).reshape(2 * t, -1)
    first = {x: f.labels.index(x) for x in lab}
    ok = np.ones(idx.shape[1], dtype=bool)
    for p, x in enumerate(f.labels):
        ok &= idx[p] == idx[first[x]]
    gather = counts[tuple(idx[first[x]] for x in lab)] if lab else np.broadcast_to(counts, idx.shape[1:])
    vals = np.where(ok, gather, 0)
    if counts.dtype == object:
        vals = vals.astype(object)
    m = n ** t
    return HomTensor(t, n, np.asarray(vals).reshape(m, m))


# -- quantum graphs ----------------------------------------------------------------


@dataclass(frozen=True)
class QuantumGraph:
    """Finite rational combination ``sum c_i F_i`` of bilabelled graphs of one arity."""

    terms: tuple[tuple[Fraction, BilabelledGraph], ...]

    def __post_init__(self) -> None:
        ts = {f.t for _, f in self.terms}
        if len(ts) > 1:
            raise BilabelError(f"arity mismatch among terms: {sorted(ts)}")

    @classmethod
    def of(cls, pairs: Iterable[tuple[object, BilabelledGraph]]) -> QuantumGraph:
        return cls(tuple((Fraction(c), f) for c, f in pairs))

    @property
    def t(self) -> int | None:
        return self.terms[0][1].t if self.terms else None


def quantum_eval(q: QuantumGraph, g: Graph, t: int | None = None) -> np.ndarray:
    """``q_G`` as an ``n^t x n^t`` array of :class:`fractions.Fraction`."""
    tt = q.t if q.t is not None else t
    if tt is None:
        raise BilabelError("empty quantum graph needs t")
    m = g.n ** tt
    out = np.array([Fraction(0)] * (m * m), dtype=object).reshape(m, m)
    for c, f in q.terms:
        out = out + hom_tensor(f, g).data.astype(object) * c
    return out


# -- algebra dimension --------------------------------------------------------------

MAX_ALGEBRA_ORDER = 64
MAX_GENERIC_ENTRIES = 256


def atomic_type_matrix(g: Graph, t: int) -> np.ndarray:
    """Rel-type code of each ``2t``-tuple as an ``n^t x n^t`` matrix."""
    m = g.n ** t
    return rel_codes(g, 2 * t).reshape(m, m)


def _coherent_partition(g: Graph, t: int) -> np.ndarray:
    """Coarsest partition of ``V^{2t}`` refining atomic types that is closed under
    the label action and whose indicator span is closed under matrix products."""
    n, m = g.n, g.n ** t
    col = np.unique(atomic_type_matrix(g, t).ravel(), return_inverse=True)[1].reshape(m, m)
    perms = list(permutations(range(2 * t)))
    k = len(np.unique(col))
    while True:
        full = col.reshape((n,) * (2 * t))
        orb = np.stack([np.transpose(full, p).reshape(-1) for p in perms], axis=1)
        col = np.unique(orb, axis=0, return_inverse=True)[1].reshape(m, m)
        kk = int(col.max()) + 1
        # entry (x, y) of M_a M_b for all classes a, b is the multiset of
        # (col[x, j], col[j, y]) over middle indices j
        pairs = np.sort(col[:, :, None] * kk + col[None, :, :], axis=1)
        sig = np.concatenate([col.reshape(-1, 1), pairs.transpose(0, 2, 1).reshape(m * m, m)], axis=1)
        col = np.unique(sig, axis=0, return_inverse=True)[1].reshape(m, m)
        k2 = int(col.max()) + 1
        if k2 == k and kk == k:
            return col
        k = k2


class _Span:
    """Incremental exact row echelon form over the integers (fraction-free)."""

    def __init__(self) -> None:
        self.rows: dict[int, list[int]] = {}

    def reduce(self, v: Sequence[int]) -> list[int] | None:
        from math import gcd

        w = [int(x) for x in v]
        for p in sorted(self.rows):
            if w[p]:
                r = self.rows[p]
                a, b = r[p], w[p]
                w = [a * x - b * y for x, y in zip(w, r)]
                gg = 0
                for x in w:
                    gg = gcd(gg, x)
                if gg > 1:
                    w = [x // gg for x in w]
        if not any(w):
            return None
        return w

    def add(self, v: Sequence[int]) -> bool:
        w = self.reduce(v)
        if w is None:
            return False
        p = next(i for i, x in enumerate(w) if x)
        self.rows[p] = w
        return True

    def __len__(self) -> int:
        return len(self.rows)


def algebra_dimension_generic(g: Graph, t: int, variant: str) -> int:
    """Closure by repeated generation and exact rank; for cross-checking on small inputs."""
    if variant not in ("partially_coherent", "coherent"):
        raise ValueError(f"unknown variant {variant!r}")
    n, m = g.n, g.n ** t
    if m * m > MAX_GENERIC_ENTRIES:
        raise SizeLimitError(f"generic closure refused: n^(2t)={m * m} > {MAX_GENERIC_ENTRIES}")
    from .bilabelled import enumerate_atomic

    atoms = [hom_tensor(f, g).data.astype(object) for f in enumerate_atomic(t)]
    gens_sigma = [tuple(range(1, 2 * t)) + (0,), (1, 0) + tuple(range(2, 2 * t))] if t >= 1 else []
    span = _Span()
    elems: list[np.ndarray] = []
    queue: list[np.ndarray] = []

    def offer(x: np.ndarray) -> None:
        if span.add(list(x.ravel())):
            elems.append(x)
            queue.append(x)

    for a in atoms:
        offer(a)
    while queue:
        x = queue.pop(0)
        cands = [np.ascontiguousarray(x.T)]
        full = x.reshape((n,) * (2 * t))
        cands += [np.ascontiguousarray(np.transpose(full, s)).reshape(m, m) for s in gens_sigma]
        for y in list(elems):
            cands.append(x.dot(y))
            cands.append(y.dot(x))
            if variant == "coherent":
                cands.append(x * y)
        if variant == "partially_coherent":
            cands += [x * a for a in atoms]
        for c in cands:
            offer(c)
    return len(span)


def algebra_dimension(g: Graph, t: int, variant: str = "coherent", *, method: str = "auto") -> int:
    """Dimension of the closure of the atomic tensors of ``g``.

    Closed under span, matrix product, adjoint and the label action; Schur products
    are unrestricted (``"coherent"``) or taken only with atomic tensors
    (``"partially_coherent"``).  The coherent closure is computed as a partition
    (a Schur-closed span containing ``J`` is spanned by class indicators); the
    partially coherent one by generic exact closure.
    """
    if variant not in ("partially_coherent", "coherent"):
        raise ValueError(f"unknown variant {variant!r}")
    if g.has_loops:
        raise GraphError("algebra dimension is defined for simple graphs")
    if g.n ** t > MAX_ALGEBRA_ORDER:
        raise SizeLimitError(f"algebra dimension refused: n^t={g.n ** t} > {MAX_ALGEBRA_ORDER}")
    if g.n == 0:
        return 0
    if variant == "coherent" and method in ("auto", "partition"):
        return int(_coherent_partition(g, t).max()) + 1
    return algebra_dimension_generic(g, t, variant)
