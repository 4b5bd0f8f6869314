"""The mwl refinement on 2t-tuples, k-WL on k-tuples, and the implication ladder.

Both graphs are refined jointly: every round interns the signatures of all
tuples of G and H together (sorted unique rows), so colour ids are comparable
across the two graphs and are reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Any

import numpy as np

from .canon import SizeLimitError
from .graph import Graph, GraphError, rel_codes

#: Refusal thresholds on the largest intermediate array (entries).
MAX_MWL_WORK = 3 * 10**7
MAX_KWL_WORK = 6 * 10**7

KWL_VARIANT = (
    "k-WL on k-tuples: new colour of x = (colour of x, multiset over vertices w of "
    "(atomic type of x+w, colour of x[1<-w], ..., colour of x[k<-w])); "
    "indistinguishability matches homomorphism indistinguishability over treewidth <= k; "
    "k = 0 compares vertex counts"
)


@dataclass
class Coloring:
    """Colour ids of all 2t-tuples (mwl) or k-tuples (k-WL) of one graph, in row-major tuple order.

    Ids come from the joint interning and are dense over the union of both graphs.
    """

    t: int
    n: int
    color: np.ndarray
    round: int

    def of(self, tup) -> int:
        idx = 0
        for x in tup:
            idx = idx * self.n + int(x)
        return int(self.color[idx])

    def histogram(self) -> dict[int, int]:
        ids, cnt = np.unique(self.color, return_counts=True)
        return {int(i): int(c) for i, c in zip(ids, cnt)}

    @property
    def classes(self) -> int:
        return int(len(np.unique(self.color)))


@dataclass
class Verdict:
    indistinguishable: bool
    reason: str
    rounds: int = 0
    class_counts: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "indistinguishable": self.indistinguishable,
            "reason": self.reason,
            "rounds": self.rounds,
            "class_counts": list(self.class_counts),
        }


def _intern(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Dense joint ids of the rows of ``a`` and ``b`` (sorted row order)."""
    rows = np.concatenate([a, b], axis=0)
    if rows.ndim == 1:
        uniq, inv = np.unique(rows, return_inverse=True)
    else:
        uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    return inv[: len(a)], inv[len(a):], int(len(uniq))


def _same_hist(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool(np.array_equal(np.sort(a), np.sort(b)))


# -- mwl -------------------------------------------------------------------------------


def _half_rows(col: np.ndarray, n: int, t: int, perms: list[tuple[int, ...]]) -> np.ndarray:
    full = col.reshape((n,) * (2 * t))
    return np.stack([np.transpose(full, p).reshape(-1) for p in perms], axis=1)


def _full_rows(half: np.ndarray, n: int, t: int, k: int) -> np.ndarray:
    m = n ** t
    h = half.reshape(m, m)
    # pairs[x, y, :] sorted over middle tuples j: (h[x, j], h[j, y])
    pairs = np.sort(h[:, None, :] * k + h.T[None, :, :], axis=2)
    return np.concatenate([half.reshape(-1, 1), pairs.reshape(m * m, m)], axis=1)


def _check_mwl(n: int, t: int, limit: int | None) -> None:
    lim = MAX_MWL_WORK if limit is None else limit
    if n ** (3 * t) > lim:
        raise SizeLimitError(f"mwl refused: n^(3t) = {n ** (3 * t)} > {lim}")


def mwl_stable(
    g: Graph, h: Graph, t: int, *, early_exit: bool = True, limit: int | None = None
) -> tuple[Coloring | None, Coloring | None, Verdict]:
    """Joint t-dimensional mwl refinement of ``g`` and ``h``.

    Round 0 colours a 2t-tuple by its atomic type.  A half round replaces a
    colour by the sequence of colours of all permuted tuples (permutations in
    lexicographic order); a full round pairs that with the multiset over middle
    t-tuples m of (half colour of r m, half colour of m s).  The refinement stops
    at the first round that creates no new class, or (``early_exit``) as soon as
    the colour histograms of the two graphs differ.
    """
    if t < 1:
        raise GraphError("t must be at least 1")
    if g.has_loops or h.has_loops:
        raise GraphError("mwl compares simple graphs")
    if g.n != h.n:
        return None, None, Verdict(False, f"vertex counts differ ({g.n} vs {h.n})")
    n = g.n
    _check_mwl(n, t, limit)
    if n == 0:
        e = np.zeros(0, dtype=np.int64)
        return Coloring(t, 0, e, 0), Coloring(t, 0, e, 0), Verdict(True, "empty graphs")
    perms = list(permutations(range(2 * t)))
    cg, ch, k = _intern(rel_codes(g, 2 * t), rel_codes(h, 2 * t))
    counts = [k]
    rnd = 0
    max_rounds = n ** (2 * t)
    while True:
        if early_exit and not _same_hist(cg, ch):
            return (Coloring(t, n, cg, rnd), Coloring(t, n, ch, rnd),
                    Verdict(False, f"colour histograms differ after round {rnd}", rnd, counts))
        if rnd >= max_rounds:
            raise AssertionError("mwl failed to stabilise within n^(2t) rounds")
        hg, hh, kh = _intern(_half_rows(cg, n, t, perms), _half_rows(ch, n, t, perms))
        ng, nh, k2 = _intern(_full_rows(hg, n, t, kh), _full_rows(hh, n, t, kh))
        rnd += 1
        counts.append(k2)
        stable = k2 == k
        cg, ch, k = ng, nh, k2
        if stable:
            break
    same = _same_hist(cg, ch)
    reason = f"stable after {rnd} rounds; histograms {'agree' if same else 'differ'}"
    return Coloring(t, n, cg, rnd), Coloring(t, n, ch, rnd), Verdict(same, reason, rnd, counts)


def mwl_colouring(g: Graph, t: int) -> Coloring:
    """Stable mwl colouring of a single graph (ids local to that refinement)."""
    c, _, _ = mwl_stable(g, g, t, early_exit=False)
    return c


def mwl_partition(graphs, t: int, *, limit: int | None = None) -> list[int]:
    """Class id per graph, equal exactly when mwl-t does not distinguish the two graphs.

    All graphs of one vertex count are refined jointly (one interning over every
    tuple of every graph), which gives each pair the same verdict as
    :func:`mwl_stable`: a tuple's signature only involves tuples of its own graph.
    ``limit`` bounds (number of graphs) * n^(3t) per vertex count.
    """
    graphs = list(graphs)
    if t < 1:
        raise GraphError("t must be at least 1")
    lim = MAX_MWL_WORK if limit is None else limit
    perms = list(permutations(range(2 * t)))
    out = [0] * len(graphs)
    classes: dict[tuple, int] = {}
    by_n: dict[int, list[int]] = {}
    for i, g in enumerate(graphs):
        if g.has_loops:
            raise GraphError("mwl compares simple graphs")
        by_n.setdefault(g.n, []).append(i)
    for n in sorted(by_n):
        ids = by_n[n]
        if len(ids) * n ** (3 * t) > lim:
            raise SizeLimitError(f"mwl refused: {len(ids)} graphs x n^(3t) = {len(ids) * n ** (3 * t)} > {lim}")
        if n == 0:
            for i in ids:
                out[i] = classes.setdefault((0, ()), len(classes))
            continue
        m = n ** t
        rows = np.stack([rel_codes(graphs[i], 2 * t) for i in ids])  # (N, m*m)
        _, col = np.unique(rows.reshape(-1), return_inverse=True)
        col = col.reshape(len(ids), m * m)
        k = int(col.max()) + 1
        while True:
            full = col.reshape((len(ids),) + (n,) * (2 * t))
            half = np.stack([np.transpose(full, (0,) + tuple(q + 1 for q in p)).reshape(len(ids), -1)
                             for p in perms], axis=2)
            _, hc = np.unique(half.reshape(-1, len(perms)), axis=0, return_inverse=True)
            hc = hc.reshape(len(ids), m, m)
            kh = int(hc.max()) + 1
            pairs = np.sort(hc[:, :, None, :] * kh + hc.transpose(0, 2, 1)[:, None, :, :], axis=3)
            sig = np.concatenate([hc.reshape(len(ids), m * m, 1), pairs.reshape(len(ids), m * m, m)], axis=2)
            _, nc = np.unique(sig.reshape(-1, m + 1), axis=0, return_inverse=True)
            col = nc.reshape(len(ids), m * m)
            k2 = int(col.max()) + 1
            if k2 == k:
                break
            k = k2
        for i, row in zip(ids, col):
            out[i] = classes.setdefault((n, tuple(np.sort(row).tolist())), len(classes))
    return out


# -- k-WL --------------------------------------------------------------------------------


def _kwl_rows(col: np.ndarray, g: Graph, k: int) -> np.ndarray:
    n = g.n
    tup = np.indices((n,) * k).reshape(k, -1)  # (k, n^k)
    nt = tup.shape[1]
    powers = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    base = (tup * powers[:, None]).sum(axis=0)  # flat index of x
    w = np.arange(n, dtype=np.int64)
    parts = []
    # atomic type of (x_1..x_k, w)
    ext = np.concatenate([np.repeat(tup[:, :, None], n, axis=2), np.broadcast_to(w, (1, nt, n))], axis=0)
    code = np.zeros((nt, n), dtype=np.int64)
    a = g.adjacency
    bit = 0
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            xi, xj = ext[i], ext[j]
            code |= (xi == xj).astype(np.int64) << bit
            code |= a[xi, xj].astype(np.int64) << (bit + 1)
            bit += 2
    parts.append(code)
    for i in range(k):
        idx = base[:, None] + (w[None, :] - tup[i][:, None]) * powers[i]
        parts.append(col[idx])
    return np.stack(parts, axis=2)  # (n^k, n, k+1)


def _check_kwl(n: int, k: int, limit: int | None) -> None:
    lim = MAX_KWL_WORK if limit is None else limit
    work = n ** (k + 1) * (k + 1)
    if work > lim:
        raise SizeLimitError(f"{k}-WL refused: n^(k+1)(k+1) = {work} > {lim}")


def kwl_stable(g: Graph, h: Graph, k: int, *, early_exit: bool = True, limit: int | None = None) -> Verdict:
    """Joint k-WL refinement; see :data:`KWL_VARIANT`."""
    if k < 0:
        raise GraphError("k must be non-negative")
    if g.has_loops or h.has_loops:
        raise GraphError("k-WL compares simple graphs")
    if g.n != h.n:
        return Verdict(False, f"vertex counts differ ({g.n} vs {h.n})")
    if k == 0:
        return Verdict(True, "0-WL compares vertex counts only")
    n = g.n
    _check_kwl(n, k, limit)
    if n == 0:
        return Verdict(True, "empty graphs")
    cg, ch, c = _intern(rel_codes(g, k), rel_codes(h, k))
    counts = [c]
    rnd = 0
    while True:
        if early_exit and not _same_hist(cg, ch):
            return Verdict(False, f"colour histograms differ after round {rnd}", rnd, counts)
        rg, rh = _kwl_rows(cg, g, k), _kwl_rows(ch, h, k)
        nt = n ** k
        ig, ih, _ = _intern(rg.reshape(nt * n, k + 1), rh.reshape(nt * n, k + 1))
        sg = np.concatenate([cg.reshape(-1, 1), np.sort(ig.reshape(nt, n), axis=1)], axis=1)
        sh = np.concatenate([ch.reshape(-1, 1), np.sort(ih.reshape(nt, n), axis=1)], axis=1)
        ng, nh, c2 = _intern(sg, sh)
        rnd += 1
        counts.append(c2)
        stable = c2 == c
        cg, ch, c = ng, nh, c2
        if stable:
            break
    same = _same_hist(cg, ch)
    return Verdict(same, f"stable after {rnd} rounds; histograms {'agree' if same else 'differ'}", rnd, counts)


# -- ladder ------------------------------------------------------------------------------


class LadderViolation(AssertionError):
    """An implication of the ladder failed: a bug in this implementation."""


def ladder_report(g: Graph, h: Graph, t: int, *, strict: bool = True) -> dict[str, Any]:
    """(3t-1)-WL, mwl-t and (t-1)-WL verdicts and the implication check between them.

    Indistinguishability must propagate downward: SA_3t-indist implies mwl-indist
    implies SA_t-indist.  A rung that exceeds its size limit is recorded with its
    error and skipped.  With ``strict`` a violation raises :class:`LadderViolation`.
    """
    rungs: list[dict[str, Any]] = []

    def run(name: str, fn) -> bool | None:
        try:
            v = fn()
        except SizeLimitError as exc:
            rungs.append({"rung": name, "error": str(exc)})
            return None
        rungs.append({"rung": name, **v.to_json()})
        return v.indistinguishable

    top = run(f"SA_{3 * t} ({3 * t - 1}-WL)", lambda: kwl_stable(g, h, 3 * t - 1))
    mid = run(f"mwl-{t}", lambda: mwl_stable(g, h, t)[2])
    low = run(f"SA_{t} ({t - 1}-WL)", lambda: kwl_stable(g, h, t - 1))
    violations = []
    if top is True and mid is False:
        violations.append(f"{3 * t - 1}-WL indistinguishable but mwl-{t} distinguishes")
    if mid is True and low is False:
        violations.append(f"mwl-{t} indistinguishable but {t - 1}-WL distinguishes")
    if top is True and low is False:
        violations.append(f"{3 * t - 1}-WL indistinguishable but {t - 1}-WL distinguishes")
    report = {
        "schema": 1,
        "t": t,
        "n": [g.n, h.n],
        "kwl_variant": KWL_VARIANT,
        "rungs": rungs,
        "mwl_indistinguishable": mid,
        "violations": violations,
        "consistent": not violations,
    }
    if violations and strict:
        raise LadderViolation("; ".join(violations))
    return report
