"""Pairwise key distribution as a noisy shared-randomness source.

The quantum pairwise step is modeled abstractly: each tree edge yields two
endpoint bit strings that are (anti-)correlated up to independent symmetric
bit flips at the edge's flip probability, and an eavesdropper learns nothing
from this step.  Everything broadcast afterwards goes through an append-only
public transcript.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, List, Sequence, Tuple

from .bits import BitString
from .graph_core import WeightedEdge
from .rng import SeededRng

MESSAGE_KINDS = (
    "announcement",
    "terminal_choice",
    "check_positions",
    "check_values",
    "code_broadcast",
    "abort",
)


class SequenceGapError(Exception):
    """A broadcast arrived with a non-contiguous sequence number."""


@dataclass(frozen=True)
class EdgeKeyMaterial:
    """Both endpoints' bit strings from one simulated pairwise-KD session."""

    edge: WeightedEdge
    bits_at_a: BitString
    bits_at_b: BitString

    def __post_init__(self):
        if len(self.bits_at_a) != len(self.bits_at_b):
            raise ValueError("endpoint strings must have equal length")


@dataclass(frozen=True)
class BroadcastMessage:
    seq: int
    sender: int
    kind: str
    payload: Any

    def __post_init__(self):
        if self.kind not in MESSAGE_KINDS:
            raise ValueError(f"unknown message kind {self.kind!r}")


class Transcript:
    """The ordered public record of every authenticated broadcast."""

    def __init__(self):
        self._messages: List[BroadcastMessage] = []

    @property
    def messages(self) -> Tuple[BroadcastMessage, ...]:
        return tuple(self._messages)

    def __len__(self) -> int:
        return len(self._messages)

    def next_seq(self) -> int:
        return len(self._messages)


def broadcast(t: Transcript, msg: BroadcastMessage) -> Transcript:
    """Append one message; sequence numbers must be contiguous from 0."""
    if msg.seq != len(t):
        raise SequenceGapError(
            f"expected seq {len(t)}, got {msg.seq}"
        )
    t._messages.append(msg)
    return t


def simulate_pairwise_kd(
    edge: WeightedEdge, length: int, rng: SeededRng
) -> EdgeKeyMaterial:
    """One pairwise-KD session of `length` positions on an edge.

    The a-side string is uniform; the b-side is the (complemented, if the
    edge is anti-correlated) a-side XOR independent Bernoulli(flip_prob)
    noise.  Applying noise to one side only is equivalent in distribution
    to symmetric application.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    bits_a = BitString.random(length, rng)
    base = bits_a.complement() if edge.anti_correlated else bits_a
    noise = BitString.bernoulli(length, edge.flip_prob, rng)
    return EdgeKeyMaterial(edge=edge, bits_at_a=bits_a, bits_at_b=base ^ noise)


def align_correlation(m: EdgeKeyMaterial) -> EdgeKeyMaterial:
    """Complement the b-side of anti-correlated material and clear the flag."""
    if not m.edge.anti_correlated:
        return m
    return EdgeKeyMaterial(
        edge=dataclasses.replace(m.edge, anti_correlated=False),
        bits_at_a=m.bits_at_a,
        bits_at_b=m.bits_at_b.complement(),
    )


def combined_flip_probability(ps: Sequence[float]) -> float:
    """Probability of an odd number of independent flips along a path."""
    acc = 0.0
    for p in ps:
        if not (0.0 <= p < 0.5):
            raise ValueError("each flip probability must lie in [0, 0.5)")
        acc = acc + p - 2.0 * acc * p
    return acc
