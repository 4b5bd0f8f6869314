"""Compiled kernels vs the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the environment switch is not needed.
Results are checked for equality before timing is reported.  The last rows
time a whole family enumeration in a subprocess per backend (the switch
``LASSERRE_HOM_PURE=1`` picks the fallback there).
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from lasserre_hom import _fallback
from lasserre_hom.canon import _csr
from lasserre_hom.bilabelled import atomic_A, atomic_J, parallel, series
from lasserre_hom.corpus import cfi_pair, rook_graph
from lasserre_hom.families import _Rec
from lasserre_hom.graph import complete_graph, cycle_graph, path_graph
from lasserre_hom.homtensor import kernel_args

try:
    from lasserre_hom import _kernels as compiled
except ImportError:  # not built
    compiled = None


def _hom_args(f, g, npinned):
    return kernel_args(f, g, tuple(range(npinned)))


def _glue_args(f, g, t, par):
    a, b = _Rec.of(f, None), _Rec.of(g, None)
    return (t, a.n, a.la, a.ma, b.n, b.la, b.ma, par, 720, 64)


def _same(x, y) -> bool:
    if isinstance(x, np.ndarray):
        return np.array_equal(x, y)
    return x == y


ENUM_SNIPPET = (
    "import time; from lasserre_hom.families import enumerate_family; "
    "t0 = time.perf_counter(); m = enumerate_family({t}, {fam!r}, {budget}); "
    "print(len(m), time.perf_counter() - t0)"
)


def _time_enum(t, fam, budget, pure):
    env = dict(os.environ)
    env.pop("LASSERRE_HOM_PURE", None)
    if pure:
        env["LASSERRE_HOM_PURE"] = "1"
    code = ENUM_SNIPPET.format(t=t, fam=fam, budget=budget)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    count, secs = out.stdout.split()
    return float(secs), int(count)


def _time(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--no-enum", action="store_true", help="skip the enumeration rows")
    a = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return
    cases = [
        ("hom C6 -> rook4", "hom_pinned", _hom_args(cycle_graph(6), rook_graph(4), 0)),
        ("hom P5 -> K6 (2 pinned)", "hom_pinned", _hom_args(path_graph(5), complete_graph(6), 2)),
        ("hom K4 -> cfi(K4)", "hom_pinned", _hom_args(complete_graph(4), cfi_pair(complete_graph(4))[0], 0)),
    ]
    for name, g in (("cfi(K4)", cfi_pair(complete_graph(4))[0]), ("rook4", rook_graph(4))):
        adj = [sorted(g.neighbours[v]) for v in range(g.n)]
        ptr, idx = _csr(adj)
        cases.append((f"refine {name}", "refine_colours", (ptr, idx, np.zeros(g.n, dtype=np.int64))))
    a1 = atomic_A(1, 1, 2)
    big = series(parallel(a1, a1), series(a1, a1))
    w = parallel(series(atomic_A(2, 1, 3), atomic_A(2, 2, 4)), atomic_J(2))
    cases.append(("glue series (t=1)", "glue_code", _glue_args(big, big, 1, False)))
    cases.append(("glue parallel (t=2)", "glue_code", _glue_args(w, w, 2, True)))
    print(f"{'case':28s} {'compiled':>12s} {'python':>12s} {'speedup':>9s}")
    for name, kernel, args in cases:
        tc, rc = _time(getattr(compiled, kernel), args, a.repeat)
        tp, rp = _time(getattr(_fallback, kernel), args, a.repeat)
        if not _same(rc, rp):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:28s} {tc * 1e3:10.2f}ms {tp * 1e3:10.2f}ms {tp / max(tc, 1e-9):8.1f}x")
    if a.no_enum:
        return
    for t, fam, budget in ((1, "L_t_plus", 6), (2, "L_t", 4)):
        tc, nc = _time_enum(t, fam, budget, False)
        tp, np_ = _time_enum(t, fam, budget, True)
        if nc != np_:
            raise SystemExit(f"enumeration t={t} {fam}: backends disagree ({nc} vs {np_})")
        name = f"enum t={t} {fam} <= {budget}"
        print(f"{name:28s} {tc * 1e3:10.0f}ms {tp * 1e3:10.0f}ms {tp / max(tc, 1e-9):8.1f}x")


if __name__ == "__main__":
    main()
