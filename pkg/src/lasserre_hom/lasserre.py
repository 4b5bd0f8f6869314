"""The level-t Lasserre system for isomorphism of two graphs.

Variables ``y_I`` are indexed by partial isomorphisms ``I`` (sets of vertex
pairs ``(g, h)``) with ``|I| <= 2t``; every other set is fixed to zero and never
materialised.  A variable is written as its sorted tuple of pairs.
"""

from __future__ import annotations

import math
import os
from itertools import combinations
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .canon import SizeLimitError
from .graph import Graph, GraphError

Var = tuple[tuple[int, int], ...]

MAX_PAIRS = 100
MAX_LEVEL = 3


def _consistent(g: Graph, h: Graph, a: tuple[int, int], b: tuple[int, int]) -> bool:
    (g1, h1), (g2, h2) = a, b
    if (g1 == g2) != (h1 == h2):
        return False
    return g.has_edge(g1, g2) == h.has_edge(h1, h2)


def is_partial_iso(g: Graph, h: Graph, pairs: Iterable[tuple[int, int]]) -> bool:
    ps = list(pairs)
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if not _consistent(g, h, ps[i], ps[j]):
                return False
    # a single pair (g, g) -> (h, h) also has to respect loops; simple graphs have none
    return all(g.has_edge(x, x) == h.has_edge(y, y) for x, y in ps)


def var_key(pairs: Iterable[tuple[int, int]]) -> Var:
    return tuple(sorted(set((int(a), int(b)) for a, b in pairs)))


def _order(v: Var) -> tuple:
    return (len(v), v)


def enumerate_partial_isos(g: Graph, h: Graph, max_size: int, *, limit: int | None = None) -> list[Var]:
    """All partial isomorphisms of size at most ``max_size``, sorted by (size, pairs)."""
    lim = MAX_PAIRS if limit is None else limit
    if g.n * h.n > lim or max_size > 2 * MAX_LEVEL:
        raise SizeLimitError(f"partial isomorphism enumeration refused: {g.n}x{h.n} pairs, size {max_size}")
    pairs = [(a, b) for a in range(g.n) for b in range(h.n)]
    out: list[Var] = [()]

    def rec(cur: list[tuple[int, int]], start: int) -> None:
        if len(cur) == max_size:
            return
        for i in range(start, len(pairs)):
            p = pairs[i]
            if all(_consistent(g, h, q, p) for q in cur):
                cur.append(p)
                out.append(tuple(cur))
                rec(cur, i + 1)
                cur.pop()

    if max_size > 0:
        rec([], 0)
    for v in out:
        if not is_partial_iso(g, h, v):
            raise AssertionError(f"generated set {v} is not a partial isomorphism")
    return sorted(out, key=_order)


@dataclass(frozen=True)
class Constraint:
    """``sum coeffs[v] * y_v == rhs``."""

    name: str
    coeffs: tuple[tuple[int, int], ...]  # (variable index, coefficient)
    rhs: int = 0


@dataclass
class LasserreSystem:
    t: int
    g: Graph
    h: Graph
    nonneg: bool
    variables: list[Var]
    index: dict[Var, int]
    moment_rows: list[Var]
    moment: np.ndarray  # variable index per entry, -1 for a forced zero
    constraints: list[Constraint] = field(default_factory=list)

    @property
    def empty(self) -> int:
        return self.index[()]

    def moment_value(self, values: Sequence) -> np.ndarray:
        """Moment matrix for a vector of variable values (object array)."""
        m = len(self.moment_rows)
        out = np.empty((m, m), dtype=object)
        for i in range(m):
            for j in range(m):
                k = self.moment[i, j]
                out[i, j] = values[k] if k >= 0 else 0
        return out

    def summary(self) -> dict:
        return {
            "t": self.t,
            "n": [self.g.n, self.h.n],
            "nonneg": self.nonneg,
            "variables": len(self.variables),
            "free_variables": len(self.variables) - 1,
            "moment_size": len(self.moment_rows),
            "constraints": len(self.constraints),
        }


def _fmt_var(v: Var) -> str:
    return "{" + ",".join(f"{a}{b}" if max(a, b) < 10 else f"({a},{b})" for a, b in v) + "}"


def build_system(g: Graph, h: Graph, t: int, nonneg: bool = False, *, limit: int | None = None) -> LasserreSystem:
    """Variables, moment matrix and the linear equations of the level-t relaxation.

    For every partial isomorphism ``I`` with ``|I| <= 2t - 2``: for each ``g``,
    ``sum_h y_{I + gh} = y_I``, and for each ``h``, ``sum_g y_{I + gh} = y_I``;
    plus ``y_{} = 1``.  Rows that vanish identically are dropped.  The moment
    matrix is indexed by partial isomorphisms of size at most ``t`` (other rows
    are identically zero).
    """
    if t < 1:
        raise GraphError("t must be at least 1")
    if g.has_loops or h.has_loops:
        raise GraphError("the relaxation compares simple graphs")
    variables = enumerate_partial_isos(g, h, 2 * t, limit=limit)
    index = {v: i for i, v in enumerate(variables)}
    rows = [v for v in variables if len(v) <= t]
    m = len(rows)
    moment = np.full((m, m), -1, dtype=np.int64)
    for i, a in enumerate(rows):
        for j, b in enumerate(rows):
            u = var_key(a + b)
            moment[i, j] = index.get(u, -1)
    cons: list[Constraint] = []
    for v in variables:
        if len(v) > 2 * t - 2:
            continue
        for side, size in (("g", g.n), ("h", h.n)):
            for x in range(size):
                c: dict[int, int] = {}
                c[index[v]] = c.get(index[v], 0) - 1
                other = h.n if side == "g" else g.n
                for y in range(other):
                    p = (x, y) if side == "g" else (y, x)
                    k = index.get(var_key(v + (p,)))
                    if k is not None:
                        c[k] = c.get(k, 0) + 1
                coeffs = tuple(sorted((k, a) for k, a in c.items() if a))
                if coeffs:
                    # row_g: sum over h of y_{I+gh} = y_I; col_h: sum over g
                    kind = "row" if side == "g" else "col"
                    cons.append(Constraint(f"{kind}[I={_fmt_var(v)},{side}={x}]", coeffs, 0))
    cons.append(Constraint("norm[y_{}=1]", ((index[()], 1),), 1))
    return LasserreSystem(t, g, h, nonneg, variables, index, rows, moment, cons)


# -- SDPA export ---------------------------------------------------------------------


def _num(x) -> str:
    if isinstance(x, Fraction) and x.denominator != 1:
        return repr(float(x))
    return str(int(x))


def sdpa_text(sys: LasserreSystem) -> str:
    """Sparse SDPA (``.dat-s``) text for the feasibility problem.

    ``y_{}`` is fixed to 1 and the other variables become ``x_1..x_m`` in
    (size, pairs) order.  Block 1 is the moment matrix, block 2 holds each
    equality as a pair of opposite diagonal inequalities, block 3 (with
    non-negativity) is ``diag(x)``.  The objective is zero.
    """
    e = sys.empty
    free = [i for i in range(len(sys.variables)) if i != e]
    col = {v: k + 1 for k, v in enumerate(free)}
    entries: dict[tuple[int, int, int, int], int] = {}

    def put(mat: int, blk: int, i: int, j: int, val: int) -> None:
        if i > j:
            i, j = j, i
        key = (mat, blk, i, j)
        entries[key] = entries.get(key, 0) + val

    m = len(sys.moment_rows)
    for i in range(m):
        for j in range(i, m):
            k = sys.moment[i, j]
            if k < 0:
                continue
            if k == e:
                put(0, 1, i + 1, j + 1, -1)  # F0 = -constant part
            else:
                put(col[k], 1, i + 1, j + 1, 1)
    blocks = [str(m)]
    eq_rows = []
    for c in sys.constraints:
        a = {k: v for k, v in c.coeffs if k != e}
        b = c.rhs - dict(c.coeffs).get(e, 0)
        if not a:
            if b != 0:
                eq_rows.append(({}, b))  # infeasible constant row, kept visible
            continue
        eq_rows.append((a, b))
    blk = 1
    if eq_rows:
        blk += 1
        d = 0
        for a, b in eq_rows:
            for sgn in (1, -1):
                d += 1
                for k, v in a.items():
                    put(col[k], blk, d, d, sgn * v)
                if b:
                    put(0, blk, d, d, sgn * b)
        blocks.append(str(-2 * len(eq_rows)))
    if sys.nonneg and free:
        blk += 1
        for r, k in enumerate(free):
            put(col[k], blk, r + 1, r + 1, 1)
        blocks.append(str(-len(free)))
    lines = [
        f'"Lasserre level {sys.t} feasibility: |V(G)|={sys.g.n} |V(H)|={sys.h.n} nonneg={int(sys.nonneg)}"',
        str(len(free)),
        str(len(blocks)),
        " ".join(blocks),
        " ".join(["0"] * len(free)) if free else "",
    ]
    for key in sorted(entries):
        val = entries[key]
        if val:
            lines.append(" ".join(map(str, key)) + f" {val}")
    return "\n".join(lines) + "\n"


def export_sdpa(sys: LasserreSystem, path: str | os.PathLike) -> str:
    text = sdpa_text(sys)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)
    return text


def free_variable_order(sys: LasserreSystem) -> list[Var]:
    return [v for v in sys.variables if v != ()]


def parse_solution(sys: LasserreSystem, text: str) -> dict[Var, Fraction | float]:
    """Whitespace-separated values of ``x_1..x_m`` (exported order); ``y_{}`` is set to 1."""
    toks = text.split()
    order = free_variable_order(sys)
    if len(toks) != len(order):
        raise ValueError(f"expected {len(order)} values, got {len(toks)}")
    out: dict[Var, Fraction | float] = {(): Fraction(1)}
    for v, tok in zip(order, toks):
        try:
            out[v] = Fraction(tok) if ("e" not in tok.lower() and "." not in tok) else float(tok)
        except ValueError:
            raise ValueError(f"bad value {tok!r} for variable {_fmt_var(v)}") from None
    return out


# -- verification -----------------------------------------------------------------------


def _is_rational(x) -> bool:
    return isinstance(x, (Rational, Fraction)) and not isinstance(x, bool) or isinstance(x, bool)


def ldl_psd(mat: Sequence[Sequence]) -> tuple[bool, str]:
    """Exact PSD test by symmetric elimination over the rationals.

    Pivots on a positive diagonal entry; a negative diagonal entry, or a zero
    diagonal entry with a non-zero off-diagonal entry in its row, certifies
    that the matrix is not PSD.
    """
    a = [[Fraction(x) for x in row] for row in mat]
    n = len(a)
    for i in range(n):
        for j in range(i):
            if a[i][j] != a[j][i]:
                return False, f"not symmetric at ({j},{i})"
    alive = list(range(n))
    while alive:
        for i in alive:
            if a[i][i] < 0:
                return False, f"negative pivot at row {i}"
        zero = [i for i in alive if a[i][i] == 0]
        for i in zero:
            if any(a[i][j] != 0 for j in alive):
                return False, f"zero pivot with non-zero row at {i}"
        alive = [i for i in alive if a[i][i] != 0]
        if not alive:
            break
        p = alive[0]
        d = a[p][p]
        rest = alive[1:]
        col = {i: a[i][p] for i in rest if a[i][p] != 0}
        for i, ci in col.items():
            f = ci / d
            row_i, row_p = a[i], a[p]
            for j in rest:
                if row_p[j]:
                    row_i[j] -= f * row_p[j]
        alive = rest
    return True, "ok"


def jacobi_eigenvalues(mat: np.ndarray, *, sweeps: int = 60, eps: float = 1e-14) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by the cyclic Jacobi method."""
    a = np.array(mat, dtype=float)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    scale = max(np.abs(a).max(), 1.0)
    for _ in range(sweeps):
        off = np.sqrt(max((a ** 2).sum() - (np.diag(a) ** 2).sum(), 0.0))
        if off <= eps * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= eps * scale * 1e-3:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                tt = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(tt * tt + 1.0)
                s = tt * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
    return np.sort(np.diag(a))


@dataclass
class VerifyResult:
    accepted: bool
    violations: list[str]
    method: str

    def to_json(self) -> dict:
        return {"schema": 1, "verdict": "accepted" if self.accepted else "rejected",
                "method": self.method, "violations": list(self.violations)}


def _lookup(assignment: Mapping, v: Var):
    if v in assignment:
        return assignment[v]
    fs = frozenset(v)
    if fs in assignment:
        return assignment[fs]
    raise KeyError(v)


def verify_solution(sys: LasserreSystem, assignment: Mapping, tol: float = 0.0) -> VerifyResult:
    """Check a candidate ``y`` against every constraint; list each violation by name.

    Linear rows: exact over the rationals when all values are rational, else in
    floating point; a row passes when its residual is at most ``tol``.  PSD: for
    rational values exact symmetric elimination (with ``tol > 0`` a failing
    matrix gets a second chance through the Jacobi check); for float values
    Jacobi with ``lambda_min >= -tol * max|M|``.  With non-negativity every value
    must be at least ``-tol``.
    """
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    vals = []
    for v in sys.variables:
        try:
            vals.append(_lookup(assignment, v))
        except KeyError:
            raise KeyError(f"assignment has no value for variable y_{_fmt_var(v)}") from None
    rational = all(_is_rational(x) for x in vals)
    if rational:
        vals = [Fraction(x) for x in vals]
    else:
        vals = [float(x) for x in vals]
    bad: list[str] = []
    for c in sys.constraints:
        lhs = sum(a * vals[k] for k, a in c.coeffs)
        if abs(lhs - c.rhs) > tol:
            bad.append(f"{c.name}: residual {float(lhs - c.rhs):.3g}")
    if sys.nonneg:
        for v, x in zip(sys.variables, vals):
            if x < -tol:
                bad.append(f"nonneg[y_{_fmt_var(v)}]: value {float(x):.3g}")
    mat = sys.moment_value(vals)
    if rational:
        ok, why = ldl_psd(mat.tolist())
        method = "exact-ldl"
        if not ok and tol > 0:
            ok, why, method = _jacobi_ok(mat, tol) + ("exact-ldl+jacobi",)
    else:
        ok, why = _jacobi_ok(mat, tol)
        method = "jacobi"
    if not ok:
        bad.append(f"psd[moment]: {why}")
    return VerifyResult(not bad, bad, method)


def _jacobi_ok(mat: np.ndarray, tol: float) -> tuple[bool, str]:
    a = np.array(mat, dtype=float)
    if a.size == 0:
        return True, "ok"
    norm = float(np.abs(a).max())
    # rows with zero diagonal must vanish; drop them to keep Jacobi small
    d = np.diag(a)
    keep = np.abs(d) > tol * max(norm, 1.0) if tol > 0 else d != 0
    drop = ~keep
    if drop.any() and np.abs(a[drop][:, keep]).max(initial=0.0) > tol * max(norm, 1.0):
        return False, "zero diagonal entry with non-zero row"
    lam = jacobi_eigenvalues(a[np.ix_(keep, keep)])
    lmin = float(lam[0]) if lam.size else 0.0
    if lmin < -tol * norm:
        return False, f"lambda_min {lmin:.3g} < -tol*|M| = {-tol * norm:.3g}"
    return True, "ok"


class IsoPoint(Mapping):
    """``y_I = [I is contained in the graph of pi]`` for every partial isomorphism ``I``.

    Iteration covers the support (subsets of the graph of ``pi``); lookups
    answer any partial isomorphism of ``(g, h)`` and raise ``KeyError`` otherwise.
    """

    def __init__(self, g: Graph, h: Graph, pi: dict[int, int]):
        self.g, self.h, self.pi = g, h, pi
        self._graph = set(pi.items())

    def __getitem__(self, key) -> int:
        v = var_key(key)
        if not all(0 <= a < self.g.n and 0 <= b < self.h.n for a, b in v) or not is_partial_iso(self.g, self.h, v):
            raise KeyError(key)
        return int(all(p in self._graph for p in v))

    def __iter__(self):
        pairs = sorted(self._graph)
        for r in range(len(pairs) + 1):
            yield from combinations(pairs, r)

    def __len__(self) -> int:
        return 2 ** len(self._graph)


def integral_solution_from_iso(g: Graph, h: Graph, bijection: Mapping[int, int] | Sequence[int],
                               t: int | None = None) -> Mapping[Var, int]:
    """The 0/1 point of an isomorphism; a plain dict over all variables when ``t`` is given."""
    pi = dict(bijection) if isinstance(bijection, Mapping) else dict(enumerate(bijection))
    if g.n != h.n or sorted(pi) != list(range(g.n)) or sorted(pi.values()) != list(range(h.n)):
        raise GraphError("map is not a bijection between the vertex sets")
    if {tuple(sorted((pi[u], pi[v]))) for u, v in g.edges} != set(h.edges):
        raise GraphError("map is not an isomorphism")
    point = IsoPoint(g, h, pi)
    if t is None:
        return point
    return {v: point[v] for v in enumerate_partial_isos(g, h, 2 * t)}
