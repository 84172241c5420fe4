"""Deterministic RNG derivation.

Every stochastic choice in the toolkit draws from a generator derived from
(global seed, string tags) so that regenerating any entity is reproducible
in isolation: same seed + same tags -> bit-identical draws, regardless of
what else ran before.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _tag_words(tag: str) -> list[int]:
    # 4 x 32-bit words from a stable hash; SeedSequence mixes them with the seed
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def rng_for(seed: int, *tags: object) -> np.random.Generator:
    """Generator keyed by a global seed plus any hashable tag path.

    Tags are stringified, so `rng_for(7, "participant", 3)` and
    `rng_for(7, "participant", "3")` coincide; keep tag types consistent.
    """
    entropy: list[int] = [int(seed) & 0xFFFFFFFF]
    for tag in tags:
        entropy.extend(_tag_words(str(tag)))
    return np.random.default_rng(np.random.SeedSequence(entropy))


def seed_for(seed: int, *tags: object) -> int:
    """A 32-bit integer seed derived the same way (for torch.manual_seed)."""
    return int(rng_for(seed, *tags).integers(0, 2**31 - 1))
