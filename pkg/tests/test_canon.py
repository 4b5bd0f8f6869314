import random

import networkx as nx
import pytest
from networkx.generators.atlas import graph_atlas_g

from lasserre_hom.canon import SizeLimitError, are_isomorphic, canonical_graph, graph_certificate
from lasserre_hom.corpus import (all_graphs, cfi_pair, degree_matched_pairs, hard_pairs, isomorphic_pairs,
                                 relabelled_copy, rook_graph, shrikhande_graph)
from lasserre_hom.graph import Graph, GraphError, complete_bipartite, cycle_graph, disjoint_union, path_graph, prism
from lasserre_hom.refinement import kwl_stable


def _nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def _from_nx(h):
    idx = {v: i for i, v in enumerate(sorted(h.nodes))}
    return Graph.from_edges(len(idx), [(idx[u], idx[v]) for u, v in h.edges])


def test_examples():
    c4 = cycle_graph(4)
    assert are_isomorphic(c4, c4.relabel([2, 0, 3, 1])) is not None
    assert are_isomorphic(c4, path_graph(4)) is None
    assert are_isomorphic(complete_bipartite(3, 3), prism(3)) is None


def test_atlas_certificates_match_networkx():
    # every graph on <= 7 vertices from the atlas; certificates separate exactly the iso classes
    atlas = [_from_nx(h) for h in graph_atlas_g()[1:]]
    certs = {}
    for g in atlas:
        certs.setdefault(graph_certificate(g), []).append(g)
    assert len(certs) == len(atlas)  # the atlas lists each class once


def test_corpus_counts():
    # numbers of graphs on n unlabelled vertices
    assert [len(all_graphs(n)) for n in range(8)] == [1, 1, 2, 4, 11, 34, 156, 1044]


def test_random_relabellings():
    rng = random.Random(5)
    for n in range(1, 9):
        for g in all_graphs(min(n, 6))[:40]:
            h = relabelled_copy(g, rng)
            bij = are_isomorphic(g, h)
            assert bij is not None
            assert {tuple(sorted((bij[u], bij[v]))) for u, v in g.edges} == set(h.edges)
            assert canonical_graph(g) == canonical_graph(h)


def test_against_networkx_on_pairs():
    for g, h in degree_matched_pairs(7, 200, seed=1):
        assert (are_isomorphic(g, h) is not None) == nx.is_isomorphic(_nx(g), _nx(h))


def test_size_limit():
    with pytest.raises(SizeLimitError):
        are_isomorphic(cycle_graph(70), cycle_graph(70))


def test_cfi_pairs():
    from lasserre_hom.graph import complete_graph
    a, b = cfi_pair(complete_graph(4))
    assert a.n == b.n == 40
    assert are_isomorphic(a, b) is None and not nx.is_isomorphic(_nx(a), _nx(b))
    assert kwl_stable(a, b, 1).indistinguishable
    a, b = cfi_pair(cycle_graph(3))
    assert not nx.is_isomorphic(_nx(a), _nx(b))
    with pytest.raises(GraphError):
        cfi_pair(disjoint_union(cycle_graph(3), cycle_graph(3)))
    with pytest.raises(GraphError):
        cfi_pair(path_graph(3))


def test_hard_pairs():
    sg, rg = shrikhande_graph(), rook_graph(4)
    assert sg.degree_sequence() == rg.degree_sequence() == (6,) * 16
    for name, g, h in hard_pairs():
        assert not nx.is_isomorphic(_nx(g), _nx(h)), name
        assert g.degree_sequence() == h.degree_sequence()


def test_pair_samplers():
    ps = degree_matched_pairs(7, 50, seed=3)
    assert len(ps) == 50 and ps == degree_matched_pairs(7, 50, seed=3)
    assert all(g.degree_sequence() == h.degree_sequence() and are_isomorphic(g, h) is None for g, h in ps)
    assert all(are_isomorphic(g, h) is not None for g, h in isomorphic_pairs(6, 20, seed=2))
