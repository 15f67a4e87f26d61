"""Plain-text transcript log rendering and parsing.

One line per message: ``<seq> <sender> <kind> <payload>``.  Lines starting
with ``#`` are comments.  Payload text per kind:

- announcement:      sorted ``(a,b):bit`` pairs, comma-separated
- terminal_choice:   the chosen agent id
- check_positions:   sorted position indices, comma-separated
- check_values:      the m check bits as 0/1 characters, index 0 first
- code_broadcast:    the m broadcast bits as 0/1 characters
- abort:             ``agent:mismatch`` pairs, comma-separated, exact rationals
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

from .bits import BitString
from .channel_sim import BroadcastMessage, Transcript, broadcast
from .graph_core import EdgeKey


def format_payload(msg: BroadcastMessage) -> str:
    kind, payload = msg.kind, msg.payload
    if kind == "announcement":
        return ",".join(
            f"({a},{b}):{bit}" for (a, b), bit in sorted(payload.items())
        )
    if kind == "terminal_choice":
        return str(payload)
    if kind == "check_positions":
        return ",".join(str(i) for i in payload)
    if kind in ("check_values", "code_broadcast"):
        return str(payload)
    if kind == "abort":
        return ",".join(f"{agent}:{frac}" for agent, frac in sorted(payload.items()))
    raise ValueError(f"unknown kind {kind!r}")


def format_message(msg: BroadcastMessage) -> str:
    return f"{msg.seq} {msg.sender} {msg.kind} {format_payload(msg)}"


def transcript_lines(t: Transcript) -> List[str]:
    return [format_message(m) for m in t.messages]


def _parse_payload(kind: str, text: str):
    if kind == "announcement":
        record: Dict[EdgeKey, int] = {}
        matches = re.findall(r"\((\d+),(\d+)\):([01])", text)
        if text and not matches:
            raise ValueError(f"malformed announcement payload {text!r}")
        for a, b, bit in matches:
            record[(int(a), int(b))] = int(bit)
        return record
    if kind == "terminal_choice":
        return int(text)
    if kind == "check_positions":
        return tuple(int(x) for x in text.split(",")) if text else ()
    if kind in ("check_values", "code_broadcast"):
        return BitString.from_text(text)
    if kind == "abort":
        out: Dict[int, Fraction] = {}
        if text:
            for item in text.split(","):
                agent, frac = item.split(":")
                out[int(agent)] = Fraction(frac)
        return out
    raise ValueError(f"unknown kind {kind!r}")


def parse_transcript(lines: Iterable[str]) -> List[Transcript]:
    """Parse one or more concatenated block transcripts.

    Sequence numbers restart at 0 at each block boundary.
    """
    transcripts: List[Transcript] = []
    current: Transcript | None = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            seq_s, sender_s, kind, payload_text = (line.split(" ", 3) + [""])[:4]
            seq, sender = int(seq_s), int(sender_s)
            payload = _parse_payload(kind, payload_text)
        except (ValueError, IndexError) as exc:
            raise ValueError(f"transcript line {lineno}: {exc}") from exc
        if seq == 0:
            current = Transcript()
            transcripts.append(current)
        if current is None:
            raise ValueError(f"transcript line {lineno}: stream starts at seq {seq}")
        broadcast(current, BroadcastMessage(seq, sender, kind, payload))
    return transcripts
