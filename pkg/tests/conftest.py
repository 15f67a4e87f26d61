"""Shared generators and brute-force oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from typing import List, Optional

from treekd.graph_core import SecurityGraph, SpanningTree, WeightedEdge, _forms_tree


def random_tree_edges(n: int, rng: random.Random) -> List[WeightedEdge]:
    """A uniform-ish random spanning tree via random attachment."""
    order = list(range(n))
    rng.shuffle(order)
    edges = []
    for i in range(1, n):
        parent = order[rng.randrange(i)]
        edges.append(WeightedEdge(order[i], parent, weight=Fraction(1)))
    return edges


def random_connected_graph(
    n: int,
    rng: random.Random,
    extra_edges: int = 3,
    max_weight: int = 20,
    flip_prob: float = 0.0,
    distinct_weights: bool = False,
) -> SecurityGraph:
    """A random connected graph: a spanning tree plus a few chords.

    Every agent is a source, so the graph always satisfies the source
    invariant and the tests focus on connectivity and weights.
    """
    keys = {(e.a, e.b) for e in random_tree_edges(n, rng)}
    candidates = [
        (a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in keys
    ]
    rng.shuffle(candidates)
    keys.update(candidates[:extra_edges])
    if distinct_weights:
        weights = rng.sample(range(1, 10 * len(keys) + 1), len(keys))
    else:
        weights = [rng.randrange(1, max_weight + 1) for _ in keys]
    edges = [
        WeightedEdge(a, b, weight=Fraction(w), flip_prob=flip_prob)
        for (a, b), w in zip(sorted(keys), weights)
    ]
    return SecurityGraph(n=n, edges=edges, sources=range(n))


def brute_force_mst_weight(g: SecurityGraph) -> Optional[Fraction]:
    """Minimum spanning-tree weight by enumerating all (n-1)-edge subsets."""
    best = None
    for subset in combinations(g.edges, g.n - 1):
        if _forms_tree(g.n, subset):
            total = sum((e.weight for e in subset), Fraction(0))
            if best is None or total < best:
                best = total
    return best
