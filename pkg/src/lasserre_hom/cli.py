"""Command-line interface: ``lasserre-hom <subcommand> ...``.

Exit codes: 0 indistinguishable / accepted / success, 1 distinguished /
rejected, 2 error.  JSON reports carry ``"schema": 1``.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import corpus
from .canon import SizeLimitError, are_isomorphic
from .decomposition import DecompositionError, pathwidth_exact, treewidth_exact
from .families import L_T, L_T_PLUS, clique_witness, dump_family, enumerate_family, family_name
from .graph import (FORMATS, Graph, GraphError, complete_graph, cycle_graph, parse_graph, path_graph,
                    serialize_graph, sniff_format, to_graph6)
from .homtensor import hom_count, hom_count_td
from .lasserre import build_system, export_sdpa, integral_solution_from_iso, parse_solution, verify_solution
from .refinement import ladder_report

SCHEMA = 1
MAX_DP_WIDTH = 3


class CliError(Exception):
    pass


def _read_graph(path: str, fmt: str | None) -> Graph:
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise CliError(f"{path}: not an ASCII graph file") from None
    try:
        return parse_graph(text, fmt or sniff_format(text))
    except GraphError as exc:
        raise CliError(f"{path}: {exc}") from None


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps({"schema": SCHEMA, **report}, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_compare(args) -> int:
    g, h = _read_graph(args.g, args.format), _read_graph(args.h, args.format)
    rep = ladder_report(g, h, args.t, strict=False)
    _emit({"command": "compare", **{k: v for k, v in rep.items() if k != "schema"}}, args.out)
    if rep["mwl_indistinguishable"] is None:
        raise CliError("mwl exceeded its size limit")
    if rep["violations"]:
        raise CliError("implication ladder violated: " + "; ".join(rep["violations"]))
    return 0 if rep["mwl_indistinguishable"] else 1


def _hom(f: Graph, g: Graph) -> tuple[int, str]:
    try:
        w, td = treewidth_exact(f)
    except SizeLimitError:
        w, td = None, None
    if td is not None and w <= MAX_DP_WIDTH:
        return hom_count_td(f, td, g), f"tree-decomposition DP (width {w})"
    return hom_count(f, g), "backtracking"


def cmd_hom(args) -> int:
    f, g = _read_graph(args.f, args.format), _read_graph(args.g, args.format)
    count, how = _hom(f, g)
    if args.json or args.out:
        _emit({"command": "hom", "count": str(count), "method": how}, args.out)
    else:
        print(count)
    return 0


def cmd_family(args) -> int:
    fam = family_name(args.family)
    members = enumerate_family(args.t, fam, args.budget, args.depth)
    if args.budget >= 3 * args.t and args.depth is None:
        # report the clique member through its canonical witness derivation
        w = clique_witness(args.t)
        members = [w if m.key == w.key else m for m in members]
    out = args.out or f"family-t{args.t}-{fam}-b{args.budget}.txt"
    dump_family(members, out)
    print(f"{len(members)} members written to {out}")
    return 0


def cmd_lasserre(args) -> int:
    g, h = _read_graph(args.g, args.format), _read_graph(args.h, args.format)
    sys_ = build_system(g, h, args.t, args.nonneg)
    report: dict = {"command": "lasserre", "system": sys_.summary()}
    if args.export:
        export_sdpa(sys_, args.export)
        report["export"] = str(args.export)
    code = 0
    if args.verify:
        if args.verify == "iso":
            pi = are_isomorphic(g, h)
            if pi is None:
                raise CliError("--verify iso: the graphs are not isomorphic")
            assignment = integral_solution_from_iso(g, h, pi)
        else:
            try:
                assignment = parse_solution(sys_, Path(args.verify).read_text())
            except OSError as exc:
                raise CliError(f"cannot read {args.verify}: {exc.strerror or exc}") from None
            except ValueError as exc:
                raise CliError(str(exc)) from None
        res = verify_solution(sys_, assignment, args.tol)
        report.update({k: v for k, v in res.to_json().items() if k != "schema"})
        print(res.to_json()["verdict"], file=sys.stderr)
        code = 0 if res.accepted else 1
    _emit(report, args.out)
    return code


_NAMED = {"K": complete_graph, "C": cycle_graph, "P": path_graph}


def _base_graph(spec: str, fmt: str | None) -> Graph:
    m = re.fullmatch(r"([KCP])_?(\d+)", spec)
    if m:
        return _NAMED[m.group(1)](int(m.group(2)))
    return _read_graph(spec, fmt)


def cmd_corpus(args) -> int:
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    fmt = args.format or "graph6"
    ext = "g6" if fmt == "graph6" else "edges"
    written = []
    if args.cfi:
        base = _base_graph(args.cfi, None)
        a, b = corpus.cfi_pair(base)
        tag = re.sub(r"[^A-Za-z0-9_]+", "_", Path(args.cfi).stem)
        for name, g in (("a", a), ("b", b)):
            p = outdir / f"cfi-{tag}-{name}.{ext}"
            p.write_text(serialize_graph(g, fmt), encoding="ascii")
            written.append(str(p))
    else:
        pairs = corpus.degree_matched_pairs(args.max_n, args.count, args.seed)
        p = outdir / f"pairs-n{args.max_n}-seed{args.seed}.txt"
        p.write_text("".join(f"{to_graph6(g)} {to_graph6(h)}\n" for g, h in pairs), encoding="ascii")
        written.append(str(p))
    for w in written:
        print(w)
    return 0


def cmd_treewidth(args) -> int:
    g = _read_graph(args.g, args.format)
    w, td = (pathwidth_exact if args.path else treewidth_exact)(g)
    _emit({
        "command": "treewidth",
        "kind": "pathwidth" if args.path else "treewidth",
        "width": w,
        "bags": [sorted(b) for b in td.bags],
        "tree_edges": [list(e) for e in td.tree.sorted_edges()],
    }, args.out)
    return 0


def _nonneg_float(s: str) -> float:
    v = float(s)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _pos_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nat(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lasserre-hom", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, t=True):
        if t:
            sp.add_argument("--t", type=_pos_int, default=1, help="level / label count (default 1)")
        sp.add_argument("--format", choices=FORMATS, help="input format (default: sniffed)")
        sp.add_argument("--out", help="output path (default stdout or a derived file name)")
        return sp

    sp = common(sub.add_parser("compare", help="mwl and k-WL verdicts for two graphs"))
    sp.add_argument("g")
    sp.add_argument("h")
    sp.set_defaults(func=cmd_compare)

    sp = common(sub.add_parser("hom", help="count homomorphisms F -> G"), t=False)
    sp.add_argument("f")
    sp.add_argument("g")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_hom)

    sp = common(sub.add_parser("family", help="enumerate L_t or L_t^+ up to a vertex budget"))
    sp.add_argument("--family", default=L_T_PLUS, help=f"{L_T} (alias L) or {L_T_PLUS} (alias L+)")
    sp.add_argument("--budget", type=_nat, default=4, help="vertex budget")
    sp.add_argument("--depth", type=_nat, default=None, help="derivation depth budget")
    sp.set_defaults(func=cmd_family)

    sp = common(sub.add_parser("lasserre", help="build, export and verify the level-t system"))
    sp.add_argument("g")
    sp.add_argument("h")
    sp.add_argument("--nonneg", action="store_true")
    sp.add_argument("--export", help="write the SDPA sparse file here")
    sp.add_argument("--verify", help="'iso' or a file of x_1..x_m values in exported order")
    sp.add_argument("--tol", type=_nonneg_float, default=0.0)
    sp.set_defaults(func=cmd_lasserre)

    sp = common(sub.add_parser("corpus", help="write CFI pairs or degree-matched pairs"), t=False)
    sp.add_argument("--cfi", help="base graph: K4, C5, P3 or a graph file")
    sp.add_argument("--max-n", type=_nat, default=7)
    sp.add_argument("--count", type=_nat, default=400)
    sp.add_argument("--seed", type=lambda s: int(s) & (2**64 - 1), default=0, help="64-bit seed")
    sp.set_defaults(func=cmd_corpus)

    sp = common(sub.add_parser("treewidth", help="exact treewidth or pathwidth"), t=False)
    sp.add_argument("g")
    sp.add_argument("--path", action="store_true", help="pathwidth instead")
    sp.set_defaults(func=cmd_treewidth)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (CliError, GraphError, SizeLimitError, DecompositionError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"lasserre-hom: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
