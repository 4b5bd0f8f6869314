import json

import pytest

from lasserre_hom.canon import are_isomorphic
from lasserre_hom.cli import main
from lasserre_hom.families import clique_witness
from lasserre_hom.graph import (complete_graph, cycle_graph, disjoint_union, from_graph6, to_edge_list, to_graph6)


@pytest.fixture
def files(tmp_path):
    def write(name, g, fmt="graph6"):
        p = tmp_path / name
        p.write_text(to_graph6(g) + "\n" if fmt == "graph6" else to_edge_list(g))
        return str(p)

    return write


def test_compare_exit_codes(files, tmp_path, capsys):
    c6 = cycle_graph(6)
    a, b = files("a.g6", c6), files("b.txt", c6, "edgelist")
    assert main(["compare", a, b]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["schema"] == 1 and rep["mwl_indistinguishable"] is True
    h = files("h.g6", disjoint_union(cycle_graph(3), cycle_graph(3)))
    out = tmp_path / "rep.json"
    assert main(["compare", a, h, "--t", "1", "--out", str(out)]) == 1
    assert json.loads(out.read_text())["consistent"] is True
    assert main(["compare", a, str(tmp_path / "missing.g6")]) == 2
    assert "error" in capsys.readouterr().err


def test_hom(files, capsys):
    k1, k3, c5, c6 = (files(n, g) for n, g in (("k1", complete_graph(1)), ("k3", complete_graph(3)),
                                                 ("c5", cycle_graph(5)), ("c6", cycle_graph(6))))
    cases = [((k1, c5), "5"), ((k3, c5), "0"), ((c6, k3), "66")]
    for args, want in cases:
        assert main(["hom", *args]) == 0
        assert capsys.readouterr().out.strip() == want
    assert main(["hom", c6, k3, "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["count"] == "66" and "tree-decomposition" in rep["method"]


def test_family_contains_witness(tmp_path, capsys):
    out = tmp_path / "fam.txt"
    assert main(["family", "--t", "1", "--family", "L", "--budget", "3", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert clique_witness(1).to_line() in lines
    first = out.read_bytes()
    assert main(["family", "--t", "1", "--family", "L", "--budget", "3", "--out", str(out)]) == 0
    assert out.read_bytes() == first


def test_lasserre_verify_and_export(files, tmp_path, capsys):
    g = cycle_graph(5)
    a, b = files("a.g6", g), files("b.txt", g, "edgelist")
    exp = tmp_path / "sys.dat-s"
    assert main(["lasserre", a, b, "--t", "1", "--export", str(exp), "--verify", "iso"]) == 0
    cap = capsys.readouterr()
    assert "accepted" in cap.err
    rep = json.loads(cap.out)
    assert rep["verdict"] == "accepted" and rep["system"]["t"] == 1
    first = exp.read_bytes()
    assert main(["lasserre", a, b, "--export", str(exp)]) == 0
    assert exp.read_bytes() == first
    # a solution file with all zeros is rejected
    nfree = rep["system"]["free_variables"]
    sol = tmp_path / "zero.txt"
    sol.write_text(" ".join(["0"] * nfree))
    assert main(["lasserre", a, b, "--verify", str(sol)]) == 1
    h = files("h.g6", cycle_graph(6))
    assert main(["lasserre", a, h, "--verify", "iso"]) == 2


def test_corpus_cfi(tmp_path, capsys):
    assert main(["corpus", "--cfi", "K4", "--out", str(tmp_path)]) == 0
    a = from_graph6((tmp_path / "cfi-K4-a.g6").read_text().strip())
    b = from_graph6((tmp_path / "cfi-K4-b.g6").read_text().strip())
    assert a.n == b.n == 40 and are_isomorphic(a, b) is None


def test_corpus_pairs_deterministic(tmp_path, capsys):
    args = ["corpus", "--max-n", "6", "--count", "20", "--seed", "7", "--out", str(tmp_path)]
    assert main(args) == 0
    p = tmp_path / "pairs-n6-seed7.txt"
    first = p.read_bytes()
    assert main(args) == 0
    assert p.read_bytes() == first and len(first.splitlines()) == 20


def test_treewidth(files, capsys):
    k4 = files("k4", complete_graph(4))
    assert main(["treewidth", k4]) == 0
    assert json.loads(capsys.readouterr().out)["width"] == 3
    assert main(["treewidth", files("c6", cycle_graph(6)), "--path"]) == 0
    assert json.loads(capsys.readouterr().out)["width"] == 2


def test_bad_arguments(capsys):
    assert main([]) == 2
    assert main(["compare"]) == 2
    assert main(["family", "--t", "0"]) == 2
    assert main(["lasserre", "x", "y", "--tol", "-1"]) == 2
    assert main(["--help"]) == 0
