"""Seeded deterministic randomness with labeled substreams.

The generator is CPython's Mersenne Twister (``random.Random``), which is
stable across platforms and Python versions for the operations used here.
Substreams are derived by hashing the parent seed together with string
labels (SHA-256, first 8 bytes as the child seed), so every component of a
run draws from its own independent, reproducible stream.
"""

from __future__ import annotations

import hashlib
import random


class SeededRng:
    """A deterministic random stream identified by a 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def substream(self, *labels: object) -> "SeededRng":
        """Derive an independent child stream from this seed and labels."""
        material = "/".join([str(self.seed), *(str(x) for x in labels)])
        digest = hashlib.sha256(material.encode("utf-8")).digest()
        return SeededRng(int.from_bytes(digest[:8], "big"))

    def bit(self) -> int:
        return self._rng.getrandbits(1)

    def random(self) -> float:
        return self._rng.random()

    def randrange(self, n: int) -> int:
        return self._rng.randrange(n)

    def choice(self, seq):
        return self._rng.choice(seq)

    def sample(self, seq, k: int):
        return self._rng.sample(seq, k)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed})"
