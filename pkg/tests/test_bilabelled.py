import random
from itertools import product

import pytest

from lasserre_hom.bilabelled import (BilabelError, BilabelledGraph, all_perms, atomic, atomic_A, atomic_I, atomic_J,
                                     canonical_key, compose_perms, contract_edge, count_atomic, delete_edge,
                                     delete_unlabelled_vertex, enumerate_atomic, identity, invert_perm,
                                     labelled_isomorphic, minor_children, parallel, parse, permute_labels, serialize,
                                     series, set_partitions, swap_perm, trace_graph, transpose, unlabel)
from lasserre_hom.canon import are_isomorphic
from lasserre_hom.graph import Graph, complete_graph, path_graph

from conftest import random_bilabelled, random_perm


def test_atomic_generators():
    a = atomic_A(1, 1, 2)
    assert (a.n, a.graph.m, a.ins, a.outs) == (2, 1, (0,), (1,))
    i = atomic_I(1, 1, 2)
    assert (i.n, i.graph.m, i.ins, i.outs) == (1, 0, (0,), (0,))
    a24 = atomic_A(2, 2, 4)
    assert a24.n == 4 and a24.graph.has_edge(a24.labels[1], a24.labels[3]) and a24.graph.m == 1
    with pytest.raises(BilabelError):
        atomic_A(1, 1, 1)


def _brute_atomic_keys(t, with_loops):
    keys = set()
    for blocks in set_partitions(2 * t):
        k = max(blocks) + 1
        slots = [(u, v) for u in range(k) for v in range(u + 1, k)]
        if with_loops:
            slots += [(u, u) for u in range(k) if blocks.count(u) > 1]
        for mask in product((0, 1), repeat=len(slots)):
            es = [e for e, b in zip(slots, mask) if b]
            g = Graph.from_edges(k, es, loops=True)
            keys.add(BilabelledGraph(t, g, tuple(blocks[:t]), tuple(blocks[t:])).key)
    return keys


def test_atomic_counts():
    assert len(enumerate_atomic(1)) == 3
    assert len(enumerate_atomic(1, with_loops=True)) == 4
    for t in (1, 2):
        for loops in (False, True):
            got = {f.key for f in enumerate_atomic(t, loops)}
            assert got == _brute_atomic_keys(t, loops)
            assert len(got) == count_atomic(t, loops)
    assert count_atomic(2) == 127


def test_series_examples():
    a = atomic_A(1, 1, 2)
    p = series(a, a)
    assert are_isomorphic(Graph(p.n, p.graph.edges), path_graph(3)) is not None
    assert p.graph.degree(p.ins[0]) == 1 and p.graph.degree(p.outs[0]) == 1
    sj = series(a, atomic_J(1))
    assert sj.n == 3 and sj.graph.m == 1
    rng = random.Random(0)
    for t in (1, 2):
        for _ in range(20):
            f = random_bilabelled(rng, t, 5)
            assert labelled_isomorphic(series(f, identity(t)), f)
            assert labelled_isomorphic(series(identity(t), f), f)
            assert labelled_isomorphic(parallel(atomic_J(t), f), f)


def test_parallel_examples():
    a = atomic_A(1, 1, 2)
    assert labelled_isomorphic(parallel(a, a), a)
    k = parallel(a, series(a, a))
    assert are_isomorphic(Graph(k.n, k.graph.edges), complete_graph(3)) is not None


def test_label_action():
    rng = random.Random(1)
    a = atomic_A(1, 1, 2)
    f = series(a, atomic_J(1))
    assert permute_labels(f, (0, 1)) == f
    assert permute_labels(f, swap_perm(1)) == transpose(f)
    for t in (1, 2):
        perms = all_perms(t)
        for _ in range(30):
            f = random_bilabelled(rng, t, 5)
            s, r = random_perm(rng, t), random_perm(rng, t)
            assert permute_labels(permute_labels(f, s), invert_perm(s)) == f
            # (F^s)^r = F^(s o r)
            assert permute_labels(permute_labels(f, s), r) == permute_labels(f, compose_perms(s, r))
        assert len(perms) == len(set(perms)) == [2, 24][t - 1]


def test_trace_and_unlabel():
    a = atomic_A(1, 1, 2)
    tr = trace_graph(a)
    assert tr.n == 1 and tr.has_edge(0, 0)
    tp = trace_graph(series(a, a))
    assert (tp.n, tp.m, tp.has_loops) == (2, 1, False)
    j = unlabel(atomic_J(1))
    assert (j.n, j.m) == (2, 0)


def test_minor_ops():
    a = atomic_A(1, 1, 2)
    assert labelled_isomorphic(contract_edge(a, 0, 1), atomic_I(1, 1, 2))
    assert labelled_isomorphic(delete_edge(a, 0, 1), atomic_J(1))
    with pytest.raises(BilabelError):
        delete_unlabelled_vertex(a, 0)
    p = series(a, a)
    mid = p.unlabelled[0]
    assert delete_unlabelled_vertex(p, mid).graph.m == 0
    kids = minor_children(p)
    assert kids and all(k.graph.m + k.n < p.graph.m + p.n for k in kids)


def test_keys():
    rng = random.Random(2)
    for t in (1, 2):
        for _ in range(30):
            f = random_bilabelled(rng, t, 6)
            perm = list(range(f.n))
            rng.shuffle(perm)
            g = BilabelledGraph(t, f.graph.relabel(perm), tuple(perm[x] for x in f.ins), tuple(perm[x] for x in f.outs))
            assert canonical_key(f) == canonical_key(g) == f.key
    a = atomic_A(1, 1, 2)
    assert transpose(a).key == a.key
    assert atomic_I(1, 1, 2).key != atomic_J(1).key


def test_serialize_roundtrip():
    rng = random.Random(3)
    for t in (1, 2, 3):
        for _ in range(20):
            f = random_bilabelled(rng, t, 6)
            assert parse(serialize(f)) == f
    with pytest.raises(Exception):
        parse("1; 2; 0 5; 0; 1")


def test_atomic_set_is_generated_by_j_a_i():
    for t in (1, 2):
        gens = [atomic_J(t)] + [f(t, i, j) for f in (atomic_A, atomic_I)
                                for i in range(1, 2 * t + 1) for j in range(i + 1, 2 * t + 1)]
        seen = {g.key: g for g in gens}
        frontier = list(seen.values())
        while frontier:
            new = {}
            for a in frontier:
                for b in gens:
                    c = parallel(a, b)
                    if c.key not in seen and c.key not in new:
                        new[c.key] = c
            seen.update(new)
            frontier = list(new.values())
        assert set(seen) == {f.key for f in enumerate_atomic(t, with_loops=True)}
