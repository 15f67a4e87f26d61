"""End-to-end blocks: pairwise KD, rounds, check bits, abort, reconciliation.

A block runs 2m positions along the minimum spanning tree.  Half the
positions (chosen by the leader) are publicly compared as check bits and
discarded; the other half form each agent's code-bit string v.  The leader
broadcasts c XOR v for a random codeword c, every other agent XORs in its
own copy and decodes, and the shared key is the codeword's index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Set, Tuple

from .bits import BitString
from .channel_sim import (
    BroadcastMessage,
    EdgeKeyMaterial,
    Transcript,
    align_correlation,
    broadcast,
    simulate_pairwise_kd,
)
from .graph_core import (
    SecurityGraph,
    SpanningTree,
    is_connected,
    mst_kruskal,
    validate_graph,
)
from .linear_code import LinearCode, decode_to_codeword, index_of, random_codeword
from .rng import SeededRng
from .subroutine import random_efficiency, subroutine_round


class InvalidGraphError(Exception):
    """The protocol refuses to run on an invalid security graph."""


@dataclass(frozen=True)
class ProtocolConfig:
    graph: SecurityGraph
    leader: int
    code: LinearCode
    blocks: int
    delta: float
    epsilon: float
    seed: int

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if not (0 <= self.leader < self.graph.n):
            raise ValueError("leader out of range")
        if self.blocks < 1:
            raise ValueError("blocks must be >= 1")


@dataclass(frozen=True)
class EfficiencyReport:
    """Exact resource accounting for one completed block.

    eta_code counts, as the paper's formula does, only the m code-bit
    rounds that are turned into key material; the m check rounds are
    consumed but excluded from the yield ratio.
    """

    n: int
    m: int
    k: int
    pairwise_bits_consumed: int
    key_bits_per_agent: int
    eta_subroutine: Fraction
    eta_code: Fraction


@dataclass(frozen=True)
class AbortDecision:
    abort: bool
    mismatch: Mapping[int, Fraction]


@dataclass(frozen=True)
class KeyResult:
    status: str  # "completed" | "aborted"
    key_indices: Optional[Dict[int, int]]
    key_bits: Optional[Dict[int, BitString]]
    mismatch: Mapping[int, Fraction]
    efficiency: Optional[EfficiencyReport]
    transcript: Transcript


def random_efficiency_report(n: int, code: LinearCode) -> EfficiencyReport:
    return EfficiencyReport(
        n=n,
        m=code.m,
        k=code.k,
        pairwise_bits_consumed=(n - 1) * 2 * code.m,
        key_bits_per_agent=code.k,
        eta_subroutine=random_efficiency(n),
        eta_code=code_efficiency(n, code.k, code.m),
    )


def code_efficiency(n: int, k: int, m: int) -> Fraction:
    """Key yield of the full protocol: kn/(2m(n-1)), limit (1/2)k/m."""
    if n < 2:
        raise ValueError("need at least two agents")
    return Fraction(k * n, 2 * m * (n - 1))


def failure_bound(delta: float, epsilon: float, nbits: int) -> float:
    """exp(-eps^2 * nbits / (4 (delta - delta^2))), the asymptotic estimate
    of seeing few check errors yet many code errors."""
    variance = delta - delta * delta
    if variance <= 0.0:
        raise ValueError("delta - delta^2 must be positive")
    if nbits < 1:
        raise ValueError("nbits must be >= 1")
    return math.exp(-0.25 * epsilon * epsilon * nbits / variance)


def select_check_positions(rng: SeededRng, total: int) -> Tuple[int, ...]:
    """A uniform half-size subset of [0, total), returned sorted."""
    if total % 2 != 0:
        raise ValueError("total must be even (2m positions)")
    m = total // 2
    return tuple(sorted(rng.sample(range(total), m)))


def decide_abort(
    check_values: Mapping[int, BitString], leader: int, delta: float
) -> AbortDecision:
    """Abort iff any agent's mismatch fraction vs the leader strictly
    exceeds delta; exactly delta proceeds."""
    reference = check_values[leader]
    m = len(reference)
    mismatch: Dict[int, Fraction] = {}
    for agent, bits in check_values.items():
        if agent == leader:
            continue
        mismatch[agent] = Fraction(reference.hamming(bits), m)
    abort = any(frac > delta for frac in mismatch.values())
    return AbortDecision(abort=abort, mismatch=mismatch)


def reconcile(
    leader_codebits: BitString,
    code: LinearCode,
    rng: SeededRng,
    agent_codebits: Mapping[int, BitString],
    transcript: Transcript,
    leader: int,
) -> Dict[int, int]:
    """Code-based reconciliation: broadcast c XOR v, decode, output index."""
    index, codeword = random_codeword(code, rng)
    masked = codeword ^ leader_codebits
    broadcast(
        transcript,
        BroadcastMessage(transcript.next_seq(), leader, "code_broadcast", masked),
    )
    indices: Dict[int, int] = {leader: index}
    for agent, bits in agent_codebits.items():
        if agent == leader:
            continue
        received = masked ^ bits  # = codeword XOR error vector
        decoded, _ = decode_to_codeword(code, received)
        indices[agent] = index_of(code, decoded)
    return indices


@dataclass(frozen=True)
class BlockState:
    """Intermediate state after the 2m rounds, before the check phase."""

    tree: SpanningTree
    secret_strings: Dict[int, BitString]  # per agent, length 2m
    transcript: Transcript


def run_rounds(
    config: ProtocolConfig, block_index: int, positions: int
) -> BlockState:
    """Steps 1-3: pairwise KD on the tree and `positions` subroutine rounds."""
    report = validate_graph(config.graph)
    if not report.ok:
        raise InvalidGraphError("; ".join(report.violations))
    tree = mst_kruskal(config.graph)
    rng = SeededRng(config.seed).substream("block", block_index)

    materials: Dict[Tuple[int, int], EdgeKeyMaterial] = {}
    for edge in tree.edges:
        edge_rng = rng.substream("edge", edge.a, edge.b)
        materials[edge.key] = align_correlation(
            simulate_pairwise_kd(edge, positions, edge_rng)
        )

    transcript = Transcript()
    per_agent: Dict[int, List[int]] = {agent: [] for agent in range(tree.n)}
    for r in range(positions):
        position_bits = {
            key: (mat.bits_at_a[r], mat.bits_at_b[r])
            for key, mat in materials.items()
        }
        secrets = subroutine_round(
            tree, position_bits, rng.substream("round", r), transcript, config.leader
        )
        for agent, bit in secrets.items():
            per_agent[agent].append(bit)

    strings = {agent: BitString(bits) for agent, bits in per_agent.items()}
    return BlockState(tree=tree, secret_strings=strings, transcript=transcript)


def run_block(config: ProtocolConfig, block_index: int = 0) -> KeyResult:
    """One full block: rounds, check phase, abort decision, reconciliation."""
    m = config.code.m
    state = run_rounds(config, block_index, 2 * m)
    transcript = state.transcript
    rng = SeededRng(config.seed).substream("block", block_index)
    n = config.graph.n

    check_positions = select_check_positions(rng.substream("check"), 2 * m)
    broadcast(
        transcript,
        BroadcastMessage(
            transcript.next_seq(), config.leader, "check_positions", check_positions
        ),
    )
    check_values = {
        agent: state.secret_strings[agent].take(check_positions)
        for agent in range(n)
    }
    for agent in range(n):
        broadcast(
            transcript,
            BroadcastMessage(
                transcript.next_seq(), agent, "check_values", check_values[agent]
            ),
        )
    decision = decide_abort(check_values, config.leader, config.delta)
    if decision.abort:
        broadcast(
            transcript,
            BroadcastMessage(
                transcript.next_seq(), config.leader, "abort", dict(decision.mismatch)
            ),
        )
        return KeyResult(
            status="aborted",
            key_indices=None,
            key_bits=None,
            mismatch=decision.mismatch,
            efficiency=None,
            transcript=transcript,
        )

    code_positions = [i for i in range(2 * m) if i not in set(check_positions)]
    codebits = {
        agent: state.secret_strings[agent].take(code_positions)
        for agent in range(n)
    }
    indices = reconcile(
        codebits[config.leader],
        config.code,
        rng.substream("code"),
        codebits,
        transcript,
        config.leader,
    )
    key_bits = {
        agent: BitString(
            (idx >> (config.code.k - 1 - i)) & 1 for i in range(config.code.k)
        )
        for agent, idx in indices.items()
    }
    return KeyResult(
        status="completed",
        key_indices=indices,
        key_bits=key_bits,
        mismatch=decision.mismatch,
        efficiency=random_efficiency_report(n, config.code),
        transcript=transcript,
    )


def run_blocks(config: ProtocolConfig) -> List[KeyResult]:
    return [run_block(config, i) for i in range(config.blocks)]
