"""Brute-force certification of what the public transcript reveals.

The analyzer sees exactly what an eavesdropper sees: the masked
announcements and the terminal choice, never any ground-truth edge bit.
It enumerates every edge-bit assignment consistent with a round's
announcements and measures the entropy of the secret bit over that set.
Honest rounds must always leave exactly two complementary candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .channel_sim import Transcript
from .graph_core import EdgeKey, SpanningTree
from .subroutine import NonTerminalChoiceError

ENUMERATION_CAP = 20  # vertices; 2^(n-1) assignments are enumerated


class EnumerationCapError(Exception):
    """Brute-force enumeration refused beyond the configured size cap."""


@dataclass(frozen=True)
class ConsistencySet:
    round_index: int
    configurations: Tuple[Dict[EdgeKey, int], ...]


@dataclass(frozen=True)
class RoundView:
    """One round as visible on the wire: masked records plus the choice."""

    index: int
    announcements: Mapping[int, Mapping[EdgeKey, int]]
    chosen_terminal: int


def consistent_configurations(
    announcements: Mapping[int, Mapping[EdgeKey, int]],
    tree: SpanningTree,
    round_index: int = 0,
) -> ConsistencySet:
    """All edge assignments an eavesdropper cannot rule out.

    An assignment is consistent when every announcement can be explained
    by a single mask bit: all its masked bits differ from the assignment's
    bits by the same constant.

    A structurally invalid announcement (sender is a terminal, or the
    record's edge set is not exactly the sender's incident tree edges)
    is explainable by nothing, so the set comes back empty.  Note that a
    flipped announcement *value* is not structural: any per-agent record
    over the right edges still leaves exactly two complementary
    candidates, which is precisely the masking guarantee.
    """
    if tree.n > ENUMERATION_CAP:
        raise EnumerationCapError(
            f"{tree.n} agents exceeds the enumeration cap of {ENUMERATION_CAP}"
        )
    for agent, masked in announcements.items():
        incident = {e.key for e in tree.incident_edges(agent)}
        if len(incident) <= 1 or set(masked) != incident:
            return ConsistencySet(round_index=round_index, configurations=())
    edge_keys = sorted(e.key for e in tree.edges)
    kept: List[Dict[EdgeKey, int]] = []
    for bits in product((0, 1), repeat=len(edge_keys)):
        assignment = dict(zip(edge_keys, bits))
        if all(
            len({masked[e] ^ assignment[e] for e in masked}) == 1
            for masked in announcements.values()
        ):
            kept.append(assignment)
    return ConsistencySet(round_index=round_index, configurations=tuple(kept))


def secret_entropy(cs: ConsistencySet, chosen: int, tree: SpanningTree) -> float:
    """Shannon entropy (bits) of the secret bit over the consistent set."""
    incident = tree.incident_edges(chosen)
    if len(incident) != 1:
        raise NonTerminalChoiceError(f"agent {chosen} is not terminal")
    if not cs.configurations:
        return 0.0
    key = incident[0].key
    p = sum(cfg[key] for cfg in cs.configurations) / len(cs.configurations)
    if p in (0.0, 1.0):
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def rounds_from_transcript(transcript: Transcript) -> List[RoundView]:
    """Split a block transcript into rounds.

    A round is the run of announcements up to and including one
    terminal_choice; check/code/abort messages after the rounds are not
    part of the eavesdropper's round analysis.
    """
    rounds: List[RoundView] = []
    pending: Dict[int, Mapping[EdgeKey, int]] = {}
    for msg in transcript.messages:
        if msg.kind == "announcement":
            pending[msg.sender] = msg.payload
        elif msg.kind == "terminal_choice":
            rounds.append(
                RoundView(
                    index=len(rounds),
                    announcements=pending,
                    chosen_terminal=msg.payload,
                )
            )
            pending = {}
    return rounds


@dataclass(frozen=True)
class UniformityReport:
    samples: int
    counts: Dict[int, int]
    chi_square: float
    p_value: float
    per_bit_bias: Tuple[float, ...]
    rejects_uniformity: bool


class InsufficientSampleError(Exception):
    pass


def key_uniformity_test(
    indices: Sequence[int], k: int, significance: float = 0.001
) -> UniformityReport:
    """Chi-square test of completed-block key indices against uniform.

    `indices` are the agreed key indices of >= 1000 completed blocks.
    """
    from scipy import stats

    if len(indices) < 1000:
        raise InsufficientSampleError(
            f"need >= 1000 completed blocks, got {len(indices)}"
        )
    cells = 1 << k
    counts = {i: 0 for i in range(cells)}
    for idx in indices:
        counts[idx] += 1
    expected = len(indices) / cells
    chi_square = sum((c - expected) ** 2 / expected for c in counts.values())
    p_value = float(stats.chi2.sf(chi_square, cells - 1))
    bias = tuple(
        abs(
            sum((idx >> (k - 1 - bit)) & 1 for idx in indices) / len(indices) - 0.5
        )
        for bit in range(k)
    )
    return UniformityReport(
        samples=len(indices),
        counts=counts,
        chi_square=chi_square,
        p_value=p_value,
        per_bit_bias=bias,
        rejects_uniformity=p_value < significance,
    )
