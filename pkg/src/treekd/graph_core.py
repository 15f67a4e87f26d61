"""Security graphs, validation, connectivity, and minimum spanning trees.

Agents are dense integer ids 0..n-1.  Edges are undirected; identity is the
unordered endpoint pair, stored normalized as (min, max).  Weights are exact
rationals so tie-breaking and brute-force comparisons are reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Sequence, Set, Tuple

EdgeKey = Tuple[int, int]


class DisconnectedGraphError(Exception):
    """No spanning tree exists: the security graph is disconnected."""

    def __init__(self, components: List[Set[int]]):
        self.components = components
        parts = "; ".join(
            "{" + ",".join(map(str, sorted(c))) + "}" for c in components
        )
        super().__init__(f"security graph is disconnected: components {parts}")


@dataclass(frozen=True)
class WeightedEdge:
    """An undirected edge carrying a resource cost and a noise model.

    flip_prob is the per-position probability of a bit mismatch on this
    link; anti_correlated marks links whose endpoint bits are complements
    before alignment.
    """

    a: int
    b: int
    weight: Fraction = Fraction(1)
    flip_prob: float = 0.0
    anti_correlated: bool = False

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("agent ids must be non-negative")
        if self.a > self.b:
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)
        object.__setattr__(self, "weight", Fraction(self.weight))
        if self.weight < 0:
            raise ValueError("edge weight must be non-negative")
        if not (0.0 <= self.flip_prob < 0.5):
            raise ValueError("flip_prob must lie in [0, 0.5)")

    @property
    def key(self) -> EdgeKey:
        return (self.a, self.b)

    def other(self, agent: int) -> int:
        if agent == self.a:
            return self.b
        if agent == self.b:
            return self.a
        raise ValueError(f"agent {agent} is not an endpoint of {self.key}")


@dataclass(frozen=True)
class SecurityGraph:
    """Agents, secure pairwise links, and the set of source-capable agents."""

    n: int
    edges: Tuple[WeightedEdge, ...]
    sources: FrozenSet[int]

    def __init__(self, n: int, edges: Sequence[WeightedEdge], sources):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "sources", frozenset(sources))

    def adjacency(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {v: [] for v in range(self.n)}
        for e in self.edges:
            adj[e.a].append(e.b)
            adj[e.b].append(e.a)
        return adj


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: Tuple[str, ...] = ()


@dataclass(frozen=True)
class SpanningTree:
    """Exactly n-1 edges forming a connected acyclic cover of all agents."""

    n: int
    edges: Tuple[WeightedEdge, ...]
    total_weight: Fraction = field(init=False)

    def __init__(self, n: int, edges: Sequence[WeightedEdge]):
        edges = tuple(edges)
        if n >= 2 and len(edges) != n - 1:
            raise ValueError(f"a spanning tree on {n} vertices needs {n - 1} edges")
        if not _forms_tree(n, edges):
            raise ValueError("edges do not form a spanning tree")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(
            self, "total_weight", sum((e.weight for e in edges), Fraction(0))
        )

    def adjacency(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {v: [] for v in range(self.n)}
        for e in self.edges:
            adj[e.a].append(e.b)
            adj[e.b].append(e.a)
        return adj

    def edge_by_key(self, key: EdgeKey) -> WeightedEdge:
        for e in self.edges:
            if e.key == key:
                return e
        raise KeyError(key)

    def incident_edges(self, agent: int) -> List[WeightedEdge]:
        return [e for e in self.edges if agent in (e.a, e.b)]


def _forms_tree(n: int, edges: Sequence[WeightedEdge]) -> bool:
    if len(edges) != max(n - 1, 0):
        return False
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        if e.a >= n or e.b >= n or e.a == e.b:
            return False
        ra, rb = find(e.a), find(e.b)
        if ra == rb:
            return False
        parent[ra] = rb
    return n <= 1 or len({find(v) for v in range(n)}) == 1


def validate_graph(g: SecurityGraph) -> ValidationReport:
    """Check all SecurityGraph invariants; violations are reported, not raised."""
    violations: List[str] = []
    if g.n < 2:
        violations.append(f"agent count {g.n} < 2")
    if not g.sources:
        violations.append("source set is empty")
    for s in g.sources:
        if not (0 <= s < g.n):
            violations.append(f"source {s} is not a valid agent id")
    seen: Set[EdgeKey] = set()
    for e in g.edges:
        if e.a == e.b:
            violations.append(f"self-loop at agent {e.a}")
            continue
        if e.b >= g.n:
            violations.append(f"edge {e.key} references unknown agent {e.b}")
        if e.key in seen:
            violations.append(f"duplicate edge {e.key}")
        seen.add(e.key)
        if g.sources and e.a not in g.sources and e.b not in g.sources:
            violations.append(f"edge {e.key} has no endpoint in the source set")
    return ValidationReport(ok=not violations, violations=tuple(violations))


def connected_components(g: SecurityGraph) -> List[Set[int]]:
    adj = g.adjacency()
    remaining = set(range(g.n))
    components: List[Set[int]] = []
    while remaining:
        start = min(remaining)
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        components.append(seen)
        remaining -= seen
    return components


def is_connected(g: SecurityGraph) -> bool:
    return len(connected_components(g)) == 1


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[rx] = ry
        return True


def mst_kruskal(g: SecurityGraph) -> SpanningTree:
    """Minimum spanning tree; equal weights break ties by input edge index."""
    if not is_connected(g):
        raise DisconnectedGraphError(connected_components(g))
    # Stable sort keeps input order within equal weights.
    ordered = sorted(g.edges, key=lambda e: e.weight)
    uf = _UnionFind(g.n)
    chosen: List[WeightedEdge] = []
    for e in ordered:
        if uf.union(e.a, e.b):
            chosen.append(e)
            if len(chosen) == g.n - 1:
                break
    return SpanningTree(g.n, chosen)


def mst_prim(g: SecurityGraph, root: int = 0) -> SpanningTree:
    """Prim's algorithm grown from root, same tie-break as Kruskal."""
    if not (0 <= root < g.n):
        raise ValueError(f"root {root} out of range")
    if not is_connected(g):
        raise DisconnectedGraphError(connected_components(g))
    index = {e: i for i, e in enumerate(g.edges)}
    in_tree = {root}
    chosen: List[WeightedEdge] = []
    while len(in_tree) < g.n:
        best = None
        for e in g.edges:
            if (e.a in in_tree) != (e.b in in_tree):
                cand = (e.weight, index[e])
                if best is None or cand < best[0]:
                    best = (cand, e)
        _, e = best
        chosen.append(e)
        in_tree.add(e.a)
        in_tree.add(e.b)
    return SpanningTree(g.n, chosen)


def terminal_agents(t: SpanningTree) -> Set[int]:
    """Tree vertices of degree exactly one; at least two for n >= 2."""
    degree = {v: 0 for v in range(t.n)}
    for e in t.edges:
        degree[e.a] += 1
        degree[e.b] += 1
    return {v for v, d in degree.items() if d == 1}


def tree_path(t: SpanningTree, a: int, b: int) -> List[WeightedEdge]:
    """The unique simple path from a to b; empty when a == b."""
    if not (0 <= a < t.n and 0 <= b < t.n):
        raise ValueError("endpoints out of range")
    if a == b:
        return []
    adj = t.adjacency()
    parent: Dict[int, int] = {a: a}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            break
        for v in adj[u]:
            if v not in parent:
                parent[v] = u
                queue.append(v)
    path: List[WeightedEdge] = []
    v = b
    while v != a:
        u = parent[v]
        path.append(t.edge_by_key((min(u, v), max(u, v))))
        v = u
    path.reverse()
    return path
