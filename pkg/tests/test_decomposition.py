from itertools import permutations

import pytest

from lasserre_hom.corpus import all_graphs, graphs_up_to
from lasserre_hom.decomposition import (DecompositionError, TreeDecomposition, elimination_width,
                                        pathwidth_exact, smooth_decomposition, treewidth_exact)
from lasserre_hom.graph import Graph, complete_graph, cycle_graph, empty_graph, path_graph


def _grid(a, b):
    es = []
    for i in range(a):
        for j in range(b):
            v = i * b + j
            if j + 1 < b:
                es.append((v, v + 1))
            if i + 1 < a:
                es.append((v, v + b))
    return Graph.from_edges(a * b, es)


def test_frozen_widths():
    assert treewidth_exact(complete_graph(4))[0] == 3
    assert treewidth_exact(cycle_graph(6))[0] == 2
    assert treewidth_exact(empty_graph(5))[0] == 0
    assert treewidth_exact(_grid(3, 3))[0] == 3
    assert pathwidth_exact(path_graph(6))[0] == 1
    assert pathwidth_exact(cycle_graph(6))[0] == 2


def test_brute_force_treewidth_small():
    for g in graphs_up_to(6):
        w, td = treewidth_exact(g)
        td.validate(g)
        assert td.width == w
        brute = min(elimination_width(g, p) for p in permutations(range(g.n))) if g.n else -1
        assert w == brute


def test_pathwidth_at_least_treewidth():
    for g in all_graphs(7):
        tw, _ = treewidth_exact(g)
        pw, pd = pathwidth_exact(g)
        pd.validate(g)
        assert pd.is_path() and pw >= tw


def test_validate_names_condition():
    g = path_graph(3)
    bad = TreeDecomposition.build([{0, 1}, {2}], [(0, 1)])
    with pytest.raises(DecompositionError) as e:
        bad.validate(g)
    assert e.value.condition == 2
    bad = TreeDecomposition.build([{0, 1}], [])
    with pytest.raises(DecompositionError) as e:
        bad.validate(g)
    assert e.value.condition == 1
    bad = TreeDecomposition.build([{0, 1}, {1, 2}, {0}], [(0, 1), (1, 2)])
    with pytest.raises(DecompositionError) as e:
        bad.validate(Graph.from_edges(3, [(0, 1), (1, 2)]))
    assert e.value.condition == 3


def test_smooth_examples():
    td = smooth_decomposition(path_graph(3), 1)
    assert len(td.bags) == 2 and td.bags[0] & td.bags[1] == {1}
    td = smooth_decomposition(complete_graph(4), 3)
    assert td.bags == (frozenset(range(4)),)
    td = smooth_decomposition(cycle_graph(6), 2)
    assert len(td.bags) == 4 and all(len(b) == 3 for b in td.bags)
    assert all(len(td.bags[a] & td.bags[b]) == 2 for a, b in td.tree.edges)


def test_smooth_invariants_exhaustive():
    for g in graphs_up_to(7):
        if g.n == 0:
            continue
        tw, _ = treewidth_exact(g)
        pw, _ = pathwidth_exact(g)
        for shape, w in (("tree", tw), ("path", pw)):
            for k in range(w, min(w + 2, g.n - 1) + 1):
                td = smooth_decomposition(g, k, shape)
                td.validate(g)
                assert all(len(b) == k + 1 for b in td.bags)
                assert all(len(td.bags[a] & td.bags[b]) == k for a, b in td.tree.edges)
                assert len(td.bags) == g.n - k
                if shape == "path":
                    assert td.is_path()


def test_smooth_too_small():
    with pytest.raises(DecompositionError):
        smooth_decomposition(complete_graph(4), 2)
