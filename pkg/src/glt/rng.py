"""Deterministic, splittable random streams.

Streams are numpy ``Generator`` objects over the counter-based Philox bit
generator, keyed by ``(seed, *keys)`` through ``SeedSequence``. Philox output
is platform independent, so a given key tuple yields the same draws
everywhere, and independent tasks can derive their own streams from a
shared seed plus a task index.
"""

from __future__ import annotations

import zlib

import numpy as np

MAX_SEED = 2**64 - 1


def make_rng(seed: int, *keys: int | str) -> np.random.Generator:
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    words = [int(seed)] + [stable_key(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


def stable_key(key: int | str) -> int:
    """Map a stream key to a non-negative int (strings via CRC32)."""
    if isinstance(key, str):
        return zlib.crc32(key.encode())
    key = int(key)
    if key < 0:
        raise ValueError(f"stream keys must be non-negative, got {key}")
    return key


def ensure_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(0 if rng is None else rng)
