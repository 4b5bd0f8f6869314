import random

import networkx as nx
import pytest

from lasserre_hom.canon import SizeLimitError
from lasserre_hom.corpus import cfi_pair, rook_graph, shrikhande_graph
from lasserre_hom.graph import Graph, GraphError, complete_graph, cycle_graph, disjoint_union, path_graph
from lasserre_hom.refinement import (KWL_VARIANT, LadderViolation, kwl_stable, ladder_report, mwl_colouring,
                                     mwl_stable)

from conftest import random_graph


def _relabel(g: Graph, rng: random.Random) -> Graph:
    pi = list(range(g.n))
    rng.shuffle(pi)
    return Graph.from_edges(g.n, [(pi[u], pi[v]) for u, v in g.edges])


def _to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


C6 = cycle_graph(6)
TWO_C3 = disjoint_union(cycle_graph(3), cycle_graph(3))


def test_mwl_examples():
    assert mwl_stable(C6, TWO_C3, 1)[2].indistinguishable is False
    rng = random.Random(3)
    c5 = cycle_graph(5)
    assert mwl_stable(c5, _relabel(c5, rng), 2)[2].indistinguishable
    v = mwl_stable(path_graph(3), path_graph(4), 1)[2]
    assert not v.indistinguishable and "vertex counts" in v.reason


def test_mwl_isomorphic_pairs_and_partition():
    rng = random.Random(11)
    for _ in range(15):
        g = random_graph(rng, rng.randint(2, 7))
        cg, ch, v = mwl_stable(g, _relabel(g, rng), 1, early_exit=False)
        assert v.indistinguishable
        assert v.class_counts == sorted(v.class_counts)  # monotone
        assert v.rounds <= g.n ** 2
        assert cg.histogram() == ch.histogram()


def test_mwl_sigma_consistency():
    # in a stable colouring, colour(rs) determines colour(sigma(rs))
    rng = random.Random(5)
    for _ in range(5):
        g = random_graph(rng, 6)
        c = mwl_colouring(g, 1)
        full = c.color.reshape(g.n, g.n)
        swapped = full.T
        pairs = {}
        for a, b in zip(full.reshape(-1), swapped.reshape(-1)):
            assert pairs.setdefault(int(a), int(b)) == int(b)


def test_mwl_errors():
    with pytest.raises(GraphError):
        mwl_stable(C6, C6, 0)
    with pytest.raises(SizeLimitError):
        mwl_stable(cycle_graph(30), cycle_graph(30), 2)


def test_kwl_examples():
    assert kwl_stable(C6, TWO_C3, 1).indistinguishable
    assert not kwl_stable(C6, TWO_C3, 2).indistinguishable
    assert kwl_stable(path_graph(3), Graph(3), 0).indistinguishable
    assert "k = 0" in KWL_VARIANT


def test_1wl_matches_networkx_hash():
    rng = random.Random(17)
    for _ in range(60):
        n = rng.randint(3, 8)
        g, h = random_graph(rng, n), random_graph(rng, n)
        if g.m != h.m:
            continue
        ours = kwl_stable(g, h, 1).indistinguishable
        hg = nx.weisfeiler_lehman_graph_hash(_to_nx(g), iterations=n)
        hh = nx.weisfeiler_lehman_graph_hash(_to_nx(h), iterations=n)
        assert ours == (hg == hh)


def test_hard_pairs():
    # k-WL separates CFI(B) exactly from k = tw(B) on
    a, b = cfi_pair(complete_graph(3))
    assert kwl_stable(a, b, 1).indistinguishable and not kwl_stable(a, b, 2).indistinguishable
    assert not mwl_stable(a, b, 1)[2].indistinguishable
    a, b = cfi_pair(complete_graph(4))
    assert kwl_stable(a, b, 2).indistinguishable and mwl_stable(a, b, 1)[2].indistinguishable
    r, s = rook_graph(4), shrikhande_graph()
    assert kwl_stable(r, s, 1).indistinguishable
    assert kwl_stable(r, s, 2).indistinguishable  # strongly regular with equal parameters
    assert not kwl_stable(r, s, 3).indistinguishable
    assert mwl_stable(r, s, 1)[2].indistinguishable  # mwl-1 lies between 0-WL and 2-WL there


def test_ladder():
    rep = ladder_report(C6, TWO_C3, 1)
    assert rep["consistent"] and rep["mwl_indistinguishable"] is False
    rungs = {r["rung"]: r for r in rep["rungs"]}
    assert rungs["SA_3 (2-WL)"]["indistinguishable"] is False
    assert rungs["SA_1 (0-WL)"]["indistinguishable"] is True
    a, b = cfi_pair(complete_graph(4))
    rep = ladder_report(a, b, 1)
    assert rep["consistent"]
    rng = random.Random(2)
    g = random_graph(rng, 6)
    rep = ladder_report(g, _relabel(g, rng), 2)
    assert rep["consistent"] and rep["mwl_indistinguishable"]


def test_ladder_records_size_errors():
    g = cycle_graph(40)
    rep = ladder_report(g, g, 2)
    assert any("error" in r for r in rep["rungs"])
    assert rep["consistent"]


def test_ladder_violation_type():
    assert issubclass(LadderViolation, AssertionError)
