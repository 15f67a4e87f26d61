"""Line-based graph and run-configuration text format.

One record per line; ``#`` starts a comment.  Graph records:

    node <id>
    source <id>
    edge <a> <b> weight=<w> flip=<p> [anti]

A run config is the same graph format plus ``param key=value`` lines
(keys: leader, code, blocks, delta, epsilon, seed), so every run config
is also a valid graph file.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .graph_core import SecurityGraph, WeightedEdge

DEFAULTS = {
    "code": "hamming7_4",
    "delta": 0.05,
    "epsilon": 0.05,
    "leader": 0,
    "blocks": 10,
    "seed": 0,
}


class ConfigError(Exception):
    """Itemized parse or validation errors, each with its line number."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class RunSpec:
    graph: SecurityGraph
    graph_path: Optional[Path]
    leader: int
    code_name: str
    blocks: int
    delta: float
    epsilon: float
    seed: int


def _parse_lines(text: str) -> Tuple[SecurityGraph, Dict[str, str], List[str]]:
    nodes: List[int] = []
    sources: List[int] = []
    edges: List[WeightedEdge] = []
    params: Dict[str, str] = {}
    errors: List[str] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "node":
                nodes.append(int(fields[1]))
            elif kind == "source":
                sources.append(int(fields[1]))
            elif kind == "edge":
                a, b = int(fields[1]), int(fields[2])
                weight, flip, anti = Fraction(1), 0.0, False
                for extra in fields[3:]:
                    if extra == "anti":
                        anti = True
                    elif extra.startswith("weight="):
                        weight = Fraction(extra.split("=", 1)[1])
                    elif extra.startswith("flip="):
                        flip = float(extra.split("=", 1)[1])
                    else:
                        raise ValueError(f"unknown edge attribute {extra!r}")
                edges.append(
                    WeightedEdge(a, b, weight=weight, flip_prob=flip, anti_correlated=anti)
                )
            elif kind == "param":
                key, value = fields[1].split("=", 1)
                params[key] = value
            else:
                raise ValueError(f"unknown record kind {kind!r}")
        except (ValueError, IndexError) as exc:
            errors.append(f"line {lineno}: {exc}")

    if sorted(nodes) != list(range(len(nodes))):
        errors.append("node ids must be dense 0..n-1, each declared once")
    n = len(nodes)
    graph = SecurityGraph(n=n, edges=edges, sources=sources)
    return graph, params, errors


def parse_graph(text: str) -> SecurityGraph:
    graph, _params, errors = _parse_lines(text)
    if errors:
        raise ConfigError(errors)
    return graph


def load_graph(path: Path) -> SecurityGraph:
    if not path.exists():
        raise ConfigError([f"graph file not found: {path}"])
    return parse_graph(path.read_text())


def parse_config(text: str, path: Optional[Path] = None) -> RunSpec:
    """Parse a run config; collects every error before failing."""
    graph, params, errors = _parse_lines(text)

    merged = dict(DEFAULTS)
    for key, value in params.items():
        if key not in DEFAULTS:
            errors.append(f"unknown param key {key!r}")
            continue
        merged[key] = value

    def as_int(key: str) -> int:
        try:
            return int(merged[key])
        except ValueError:
            errors.append(f"param {key} must be an integer, got {merged[key]!r}")
            return 0

    def as_float(key: str) -> float:
        try:
            return float(merged[key])
        except ValueError:
            errors.append(f"param {key} must be a number, got {merged[key]!r}")
            return 0.0

    leader = as_int("leader")
    blocks = as_int("blocks")
    seed = as_int("seed")
    delta = as_float("delta")
    epsilon = as_float("epsilon")
    code_name = str(merged["code"])

    from .linear_code import code_by_name

    try:
        code_by_name(code_name)
    except ValueError as exc:
        errors.append(str(exc))
    if not (0.0 < delta < 1.0) or delta - delta * delta <= 0.0:
        errors.append(f"param delta={delta} out of range: delta - delta^2 must be positive")
    if epsilon <= 0.0:
        errors.append(f"param epsilon={epsilon} must be positive")
    if blocks < 1:
        errors.append(f"param blocks={blocks} must be >= 1")
    if graph.n and not (0 <= leader < graph.n):
        errors.append(f"param leader={leader} is not an agent id")

    if errors:
        raise ConfigError(errors)
    return RunSpec(
        graph=graph,
        graph_path=path,
        leader=leader,
        code_name=code_name,
        blocks=blocks,
        delta=delta,
        epsilon=epsilon,
        seed=seed,
    )


def load_config(path: Path) -> RunSpec:
    if not path.exists():
        raise ConfigError([f"config file not found: {path}"])
    return parse_config(path.read_text(), path=path)
