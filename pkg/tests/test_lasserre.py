import random
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from lasserre_hom.canon import SizeLimitError, are_isomorphic
from lasserre_hom.corpus import isomorphic_pairs
from lasserre_hom.graph import Graph, GraphError, complete_graph, cycle_graph, empty_graph, path_graph
from lasserre_hom.lasserre import (build_system, enumerate_partial_isos, export_sdpa, free_variable_order,
                                   integral_solution_from_iso, is_partial_iso, jacobi_eigenvalues, ldl_psd,
                                   parse_solution, sdpa_text, verify_solution)

K1, K2 = complete_graph(1), complete_graph(2)


def _brute_partial_isos(g, h, k):
    pairs = [(a, b) for a in range(g.n) for b in range(h.n)]
    return {c for r in range(k + 1) for c in combinations(pairs, r) if is_partial_iso(g, h, c)}


def test_partial_iso_examples():
    ps = enumerate_partial_isos(K2, K2, 2)
    assert len(ps) == 7
    assert ((0, 0), (1, 1)) in ps and ((0, 1), (1, 0)) in ps and ((0, 0), (1, 0)) not in ps
    two = empty_graph(2)
    ps = enumerate_partial_isos(K2, two, 2)
    assert all(len(p) <= 1 for p in ps) and len(ps) == 5
    assert enumerate_partial_isos(path_graph(3), cycle_graph(3), 0) == [()]


def test_partial_isos_brute_force():
    rng = random.Random(4)
    for _ in range(10):
        g = Graph.from_edges(4, [e for e in combinations(range(4), 2) if rng.random() < 0.5])
        h = Graph.from_edges(4, [e for e in combinations(range(4), 2) if rng.random() < 0.5])
        assert set(enumerate_partial_isos(g, h, 3)) == _brute_partial_isos(g, h, 3)


def test_k1_system_and_export(tmp_path):
    sys_ = build_system(K1, K1, 1)
    assert len(sys_.variables) == 2 and sys_.summary()["free_variables"] == 1
    m = sys_.moment_value([1, 1])
    assert m.tolist() == [[1, 1], [1, 1]]
    assert verify_solution(sys_, {(): 1, ((0, 0),): 1}).accepted
    text = sdpa_text(sys_)
    lines = text.splitlines()
    assert lines[1] == "1"  # one free variable
    assert lines[3].split()[0] == "2"  # moment block of size 2
    p1, p2 = tmp_path / "a.dat-s", tmp_path / "b.dat-s"
    export_sdpa(sys_, p1)
    export_sdpa(build_system(K1, K1, 1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_k1_all_zero_rejected():
    sys_ = build_system(K1, K1, 1)
    res = verify_solution(sys_, {(): 0, ((0, 0),): 0})
    assert not res.accepted and any(v.startswith("norm") for v in res.violations)


def test_unequal_sizes_contradict():
    sys_ = build_system(K1, empty_graph(2), 1)
    # every 0/1 or fractional candidate fails some linear row
    for a in (0, Fraction(1, 2), 1):
        for b in (0, Fraction(1, 2), 1):
            res = verify_solution(sys_, {(): 1, ((0, 0),): a, ((0, 1),): b})
            assert not res.accepted


def test_nonneg_block():
    g = path_graph(3)
    plain, nn = sdpa_text(build_system(g, g, 1)), sdpa_text(build_system(g, g, 1, nonneg=True))
    nfree = len(free_variable_order(build_system(g, g, 1)))
    assert plain.splitlines()[2] == "2" and nn.splitlines()[2] == "3"
    assert nn.splitlines()[3].split()[-1] == str(-nfree)


def test_moment_symmetry_and_elimination():
    g, h = path_graph(4), cycle_graph(4)
    sys_ = build_system(g, h, 2)
    assert np.array_equal(sys_.moment, sys_.moment.T)
    valid = set(sys_.variables)
    assert valid == _brute_partial_isos(g, h, 4)
    for c in sys_.constraints:
        for k, a in c.coeffs:
            assert a != 0 and sys_.variables[k] in valid
    for k in sys_.moment.reshape(-1):
        assert k == -1 or 0 <= k < len(sys_.variables)


def test_integral_solutions_examples():
    sol = integral_solution_from_iso(K2, K2, [0, 1], t=1)
    ones = {v for v, x in sol.items() if x}
    assert ones == {(), ((0, 0),), ((1, 1),), ((0, 0), (1, 1))}
    with pytest.raises(GraphError):
        integral_solution_from_iso(path_graph(3), path_graph(3), [1, 0, 2])
    with pytest.raises(GraphError):
        integral_solution_from_iso(K2, K2, [0, 0])


def test_isomorphic_pairs_accept_and_automorphisms():
    for g, h in isomorphic_pairs(6, 8, seed=3):
        pi = are_isomorphic(g, h)
        for t in (1, 2):
            sys_ = build_system(g, h, t)
            assert verify_solution(sys_, integral_solution_from_iso(g, h, pi)).accepted
    # composing with automorphisms of C6 (rotation, reflection) gives other accepted points
    c6 = cycle_graph(6)
    sys_ = build_system(c6, c6, 2)
    for auto in ([(v + 1) % 6 for v in range(6)], [(-v) % 6 for v in range(6)]):
        point = integral_solution_from_iso(c6, c6, auto)
        assert point[((0, auto[0]),)] == 1
        assert verify_solution(sys_, point).accepted


def test_perturbation_names_constraint():
    g = cycle_graph(5)
    sys_ = build_system(g, g, 1)
    sol = dict(integral_solution_from_iso(g, g, list(range(5)), t=1))
    k = ((0, 0),)
    assert verify_solution(sys_, sol, 1e-8).accepted
    sol[k] = sol[k] + 1e-3
    res = verify_solution(sys_, sol, 1e-8)
    assert not res.accepted
    assert any(v.startswith(("row[I={}", "col[I={}")) for v in res.violations)
    sol[k] = Fraction(1) + Fraction(1, 1000)
    res = verify_solution(sys_, sol)
    assert not res.accepted and res.method == "exact-ldl"


def test_missing_variable_named():
    sys_ = build_system(K2, K2, 1)
    with pytest.raises(KeyError, match=r"y_\{00\}"):
        verify_solution(sys_, {(): 1})


def test_parse_solution_roundtrip():
    g = path_graph(3)
    sys_ = build_system(g, g, 1)
    sol = integral_solution_from_iso(g, g, [0, 1, 2], t=1)
    text = " ".join(str(sol[v]) for v in free_variable_order(sys_))
    back = parse_solution(sys_, text)
    assert verify_solution(sys_, back).accepted
    with pytest.raises(ValueError):
        parse_solution(sys_, "1 2")


def test_psd_routines():
    assert ldl_psd([[1, 1], [1, 1]])[0]
    assert not ldl_psd([[1, 2], [2, 1]])[0]
    assert not ldl_psd([[0, 1], [1, 1]])[0]
    assert ldl_psd([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])[0]
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6))
    a = a + a.T
    assert np.allclose(jacobi_eigenvalues(a), np.linalg.eigvalsh(a), atol=1e-9)


def test_size_refusal():
    with pytest.raises(SizeLimitError):
        build_system(cycle_graph(11), cycle_graph(11), 1)
