import random

import pytest

from lasserre_hom.bilabelled import (BilabelError, BilabelledGraph, atomic_A, parallel, series, simple_part)
from lasserre_hom.canon import are_isomorphic
from lasserre_hom.corpus import all_graphs, graphs_up_to
from lasserre_hom.decomposition import DecompositionError, treewidth_exact
from lasserre_hom.families import (L_T, L_T_PLUS, FamilyMember, cached_family, clique_witness, derivation_depth,
                                   derivation_ok, dump_family, expansion, enumerate_family, family_name, from_pathwidth,
                                   from_treewidth_2t, from_treewidth_t, load_family, op_to_l1, outerplanar_to_l1,
                                   parse_sexpr, replay, to_sexpr)
from lasserre_hom.graph import Graph, GraphError, complete_graph, cycle_graph, path_graph
from lasserre_hom.outerplanar import NotOuterplanarError, is_outerplanar


def _underlying(m: FamilyMember) -> Graph:
    return simple_part(m.graph.graph)


def _iso(a: Graph, b: Graph) -> bool:
    return are_isomorphic(a, b) is not None


def test_family_names():
    assert family_name("L") == L_T and family_name("L+") == L_T_PLUS
    with pytest.raises(ValueError):
        family_name("M")


def test_small_t1_enumeration():
    l1 = enumerate_family(1, "L", 3)
    keys = {m.key for m in l1}
    a = atomic_A(1, 1, 2)
    assert series(a, a).key in keys
    assert parallel(a, series(a, a)).key in keys
    assert clique_witness(1).key in keys
    for m in l1:
        assert m.valid()
        assert derivation_ok(m.derivation, L_T)


def test_l_subset_of_lplus_and_k4():
    l1 = enumerate_family(1, L_T, 4)
    lp = enumerate_family(1, L_T_PLUS, 4)
    assert {m.key for m in l1} <= {m.key for m in lp}
    k4e = complete_graph(4).without_edge(0, 1)
    assert any(_iso(_underlying(m), k4e) for m in lp)
    assert not any(_iso(_underlying(m), complete_graph(4)) for m in l1)
    for m in lp:
        assert m.valid() and treewidth_exact(_underlying(m))[0] <= 2


def test_depth_budget():
    d1 = enumerate_family(1, L_T_PLUS, 5, max_depth=1)
    assert all(derivation_depth(m.derivation) <= 1 for m in d1)
    full = {m.key for m in enumerate_family(1, L_T_PLUS, 5)}
    assert {m.key for m in d1} <= full


@pytest.mark.parametrize("t,fam,budget", [(1, L_T, 6), (1, L_T_PLUS, 6), (2, L_T_PLUS, 4), (2, L_T, 4)])
def test_orbit_enumeration_matches_naive(t, fam, budget):
    # the reference closure composes every pair and applies sigma as a step
    from lasserre_hom.families import _enumerate_naive
    fast = enumerate_family(t, fam, budget)
    slow = _enumerate_naive(t, fam, budget)
    assert {m.key for m in fast} == {m.key for m in slow}
    assert len(fast) == len({m.key for m in fast})
    assert all(m.valid() for m in fast)


def test_enumeration_deterministic_and_budget_cap():
    a = [m.to_line() for m in enumerate_family(2, L_T_PLUS, 5, 1)]
    assert a == [m.to_line() for m in enumerate_family(2, L_T_PLUS, 5, 1)]
    with pytest.raises(ValueError):
        enumerate_family(1, L_T, 65)


def test_derivation_text_roundtrip(tmp_path):
    ms = enumerate_family(1, L_T, 4)
    for m in ms[:: max(1, len(ms) // 40)]:
        assert parse_sexpr(to_sexpr(m.derivation)) == m.derivation
        assert replay(m.derivation).key == m.key
        back = FamilyMember.from_line(m.to_line(), L_T)
        assert back.key == m.key and back.valid()
    p = tmp_path / "dump.txt"
    dump_family(ms, p)
    assert [m.key for m in load_family(p, L_T)] == [m.key for m in ms]
    c = cached_family(1, L_T, 4, cache_dir=tmp_path)
    assert [m.key for m in c] == [m.key for m in ms]
    assert [m.key for m in cached_family(1, L_T, 4, cache_dir=tmp_path)] == [m.key for m in ms]


def test_l_grammar_violation_detected():
    a = ("atomic", atomic_A(1, 1, 2))
    s = ("series", a, a)
    d = ("parallel", s, s)
    assert derivation_ok(d, L_T_PLUS) and not derivation_ok(d, L_T)


def test_clique_witness():
    for t in (1, 2):
        w = clique_witness(t)
        g = _underlying(w)
        assert _iso(g, complete_graph(3 * t))
        assert treewidth_exact(g)[0] == 3 * t - 1
        assert w.family == L_T and w.valid()


def test_construction_examples():
    m = from_pathwidth(path_graph(5), 1)
    assert m.family == L_T and m.valid() and _iso(_underlying(m), path_graph(5))
    m = from_pathwidth(complete_graph(2), 1)
    assert m.derivation[0] == "atomic"
    with pytest.raises(DecompositionError):
        from_pathwidth(complete_graph(4), 1)
    m = from_treewidth_2t(cycle_graph(6), 1)
    assert m.valid() and _iso(_underlying(m), cycle_graph(6))
    assert from_treewidth_2t(complete_graph(4), 2).derivation[0] == "atomic"
    with pytest.raises(DecompositionError):
        from_treewidth_2t(complete_graph(4), 1)
    t2 = from_treewidth_t(path_graph(6), 2)
    assert t2.family == L_T and t2.valid() and _iso(_underlying(t2), path_graph(6))
    assert t2.graph.ins == t2.graph.outs
    assert from_treewidth_t(complete_graph(2), 2).derivation[0] == "atomic"
    with pytest.raises(DecompositionError):
        from_treewidth_t(complete_graph(4), 2)
    with pytest.raises(GraphError):
        from_pathwidth(Graph(0), 1)


def test_trees_t1():
    for g in graphs_up_to(7):
        if g.n and g.is_connected() and g.m == g.n - 1:
            m = from_treewidth_2t(g, 1)
            assert m.valid() and _iso(_underlying(m), g)


def test_op_examples():
    a = atomic_A(1, 1, 2)
    m = op_to_l1(a)
    assert m.derivation == ("atomic", a) or m.valid()
    c5 = BilabelledGraph(1, cycle_graph(5), (0,), (1,))
    m = op_to_l1(c5)
    assert m.valid() and m.key == c5.key
    with pytest.raises(NotOuterplanarError):
        op_to_l1(BilabelledGraph(1, complete_graph(4), (0,), (1,)))
    with pytest.raises(BilabelError):
        op_to_l1(BilabelledGraph(2, complete_graph(4), (0, 1), (2, 3)))


def test_op_random_labellings():
    rng = random.Random(4)
    for g in graphs_up_to(6):
        if g.n == 0:
            continue
        u, v = rng.randrange(g.n), rng.randrange(g.n)
        f = BilabelledGraph(1, g, (u,), (v,))
        ex = expansion(f)
        if is_outerplanar(Graph(ex.n, ex.edges)):
            m = op_to_l1(f)
            assert m.valid() and m.key == f.key
        else:
            with pytest.raises(NotOuterplanarError):
                op_to_l1(f)


def test_outerplanar_to_l1_small():
    for g in graphs_up_to(6):
        if g.n and is_outerplanar(g):
            m = outerplanar_to_l1(g)
            assert m.valid() and _iso(_underlying(m), g)


def test_minor_closure_l1_small():
    # every minor child of an enumerated L_1 member stays outerplanar
    from lasserre_hom.bilabelled import minor_children
    for m in enumerate_family(1, L_T, 5):
        for k in minor_children(m.graph):
            s = simple_part(k.graph)
            if s is not None:
                assert is_outerplanar(s)
