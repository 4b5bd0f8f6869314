import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from lasserre_hom.bilabelled import (BilabelledGraph, atomic_A, atomic_I, atomic_J, identity, parallel,
                                     permute_labels, series, trace_graph, transpose, unlabel)
from lasserre_hom.canon import SizeLimitError
from lasserre_hom.corpus import all_graphs, graphs_up_to
from lasserre_hom.decomposition import TreeDecomposition, decomposition_from_order, pathwidth_exact, treewidth_exact
from lasserre_hom.graph import Graph, complete_graph, cycle_graph, empty_graph, path_graph
from lasserre_hom.homtensor import (HomTensor, QuantumGraph, algebra_dimension, algebra_dimension_generic,
                                    hom_count, hom_count_elim, hom_count_td, hom_tensor, matmul, quantum_eval,
                                    schur, sigma_act, soe, trace, transpose_tensor)

from conftest import random_bilabelled, random_graph, random_perm


def brute_hom(f: Graph, g: Graph) -> int:
    return sum(all(g.has_edge(h[u], h[v]) for u, v in f.edges) for h in product(range(g.n), repeat=f.n))


def test_frozen_counts():
    assert hom_count(complete_graph(1), cycle_graph(5)) == 5
    assert hom_count(complete_graph(3), cycle_graph(5)) == 0
    assert hom_count(complete_graph(3), complete_graph(3)) == 6
    assert hom_count(path_graph(4), complete_graph(3)) == 24
    assert hom_count(cycle_graph(6), complete_graph(3)) == 66
    for f in (path_graph(4), cycle_graph(6)):
        w, pd = pathwidth_exact(f)
        assert hom_count_td(f, pd, complete_graph(3)) == hom_count(f, complete_graph(3))
        assert hom_count_td(f, TreeDecomposition.single_bag(f), complete_graph(3)) == hom_count(f, complete_graph(3))


def test_counts_against_brute_force():
    rng = random.Random(0)
    for _ in range(60):
        f = random_graph(rng, rng.randint(0, 5))
        g = random_graph(rng, rng.randint(1, 4))
        ref = brute_hom(f, g)
        assert hom_count(f, g) == ref
        assert hom_count_elim(f, g) == ref
        assert hom_count_td(f, treewidth_exact(f)[1], g) == ref


def test_huge_counts_promote():
    # 20^15 does not fit in 63 bits
    f, g = empty_graph(15), complete_graph(20)
    assert hom_count_elim(f, g) == 20 ** 15
    assert hom_count_td(f, decomposition_from_order(f, range(15)), g) == 20 ** 15


def test_refusal():
    with pytest.raises(SizeLimitError):
        hom_count(path_graph(12), complete_graph(3))


def test_atomic_tensors():
    g = cycle_graph(5)
    n = g.n
    assert np.array_equal(hom_tensor(atomic_I(1, 1, 2), g).data, np.eye(n, dtype=np.int64))
    assert np.array_equal(hom_tensor(atomic_A(1, 1, 2), g).data, g.adjacency)
    assert np.array_equal(hom_tensor(atomic_J(1), g).data, np.ones((n, n), dtype=np.int64))
    a = hom_tensor(atomic_A(1, 1, 2), g)
    assert np.array_equal(matmul(a, a).data, g.adjacency @ g.adjacency)


def test_methods_agree():
    rng = random.Random(1)
    for t in (1, 2):
        for _ in range(25):
            f = random_bilabelled(rng, t, 5)
            g = random_graph(rng, rng.randint(1, 4))
            assert hom_tensor(f, g, method="elim") == hom_tensor(f, g, method="brute")


def test_functoriality_sample():
    rng = random.Random(2)
    for t in (1, 2):
        for _ in range(15):
            f, f2 = random_bilabelled(rng, t, 5), random_bilabelled(rng, t, 5)
            g = random_graph(rng, rng.randint(1, 4))
            s = random_perm(rng, t)
            fg, f2g = hom_tensor(f, g), hom_tensor(f2, g)
            assert soe(fg) == hom_count_elim(unlabel(f), g)
            assert trace(fg) == hom_count_elim(trace_graph(f), g)
            assert sigma_act(fg, s) == hom_tensor(permute_labels(f, s), g)
            assert matmul(fg, f2g) == hom_tensor(series(f, f2), g)
            assert schur(fg, f2g) == hom_tensor(parallel(f, f2), g)
            assert transpose_tensor(fg) == hom_tensor(transpose(f), g)


def test_inner_product_identity():
    # <R_G, S_G> = tr(R_G S_G^T) = hom(tr(R S*), G) = hom(soe(I-chain (.) R S*), G)
    rng = random.Random(3)
    for t in (1, 2):
        chain = identity(t)
        for _ in range(15):
            r, s = random_bilabelled(rng, t, 4), random_bilabelled(rng, t, 4)
            g = random_graph(rng, rng.randint(1, 4))
            rg, sg = hom_tensor(r, g).data, hom_tensor(s, g).data
            rs = series(r, transpose(s))
            inner = int((rg * sg).sum())
            assert inner == hom_count_elim(trace_graph(rs), g)
            assert inner == soe(hom_tensor(parallel(chain, rs), g))


def test_json_roundtrip():
    g = cycle_graph(4)
    a = hom_tensor(series(atomic_A(2, 1, 3), atomic_A(2, 2, 4)), g)
    assert HomTensor.from_json(a.to_json()) == a


def test_quantum():
    k2 = complete_graph(2)
    a, i, j = atomic_A(1, 1, 2), atomic_I(1, 1, 2), atomic_J(1)
    assert (quantum_eval(QuantumGraph.of([(1, j), (-1, j)]), k2) == 0).all()
    assert (quantum_eval(QuantumGraph.of([(1, i)]), k2) == np.eye(2)).all()
    q = quantum_eval(QuantumGraph.of([(2, a), (3, i)]), k2)
    assert q.tolist() == [[3, 2], [2, 3]]
    q = quantum_eval(QuantumGraph.of([(Fraction(1, 2), a)]), k2)
    assert q[0, 1] == Fraction(1, 2)


def test_algebra_dimension_examples():
    assert algebra_dimension(complete_graph(2), 1) == 2
    for n in (2, 3, 5):
        for v in ("coherent", "partially_coherent"):
            assert algebra_dimension(empty_graph(n), 1, v) == 2
    # vertex-transitive cycle: coherent algebra of C5 has distance classes 0, 1, 2
    assert algebra_dimension(cycle_graph(5), 1) == 3


def test_algebra_dimension_paths_agree():
    for g in graphs_up_to(4):
        if g.n == 0:
            continue
        pc = algebra_dimension(g, 1, "partially_coherent")
        c = algebra_dimension(g, 1, "coherent")
        assert c == algebra_dimension_generic(g, 1, "coherent")
        assert pc <= c
    for g in all_graphs(3):
        assert algebra_dimension(g, 2) == algebra_dimension_generic(g, 2, "coherent")
        assert algebra_dimension(g, 2, "partially_coherent") <= algebra_dimension(g, 2)
