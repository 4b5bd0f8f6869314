import random

import pytest

from lasserre_hom.bilabelled import BilabelledGraph, atomic, enumerate_atomic, parallel, permute_labels, series
from lasserre_hom.families import enumerate_family
from lasserre_hom.graph import Graph


def random_graph(rng: random.Random, n: int, p: float = 0.5) -> Graph:
    es = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, es)


def random_bilabelled(rng: random.Random, t: int, max_n: int) -> BilabelledGraph:
    """Random (t,t)-bilabelled graph with at most ``max_n`` vertices (labels may repeat)."""
    n = rng.randint(1, max_n)
    g = random_graph(rng, n, rng.choice([0.3, 0.5, 0.7]))
    ins = tuple(rng.randrange(n) for _ in range(t))
    outs = tuple(rng.randrange(n) for _ in range(t))
    return BilabelledGraph(t, g, ins, outs)


def random_perm(rng: random.Random, t: int) -> tuple[int, ...]:
    p = list(range(2 * t))
    rng.shuffle(p)
    return tuple(p)


@pytest.fixture(scope="session")
def l1_plus_7():
    return enumerate_family(1, "L_t_plus", 7)


@pytest.fixture(scope="session")
def l1_7():
    return enumerate_family(1, "L_t", 7)
