"""Deterministic random streams.

Every stream is a ``random.Random`` seeded from a hash of the root seed and a
key path, so stream ``(seed, "sample", 17)`` is the same no matter how many
other streams were created before it or in which process.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(root: int, *path) -> int:
    text = ":".join([str(int(root))] + [str(p) for p in path])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=16).digest()
    return int.from_bytes(digest, "big")


def make_rng(root: int, *path) -> random.Random:
    """Return the independent stream addressed by ``path`` under ``root``."""
    return random.Random(derive_seed(root, *path))


def as_rng(rng) -> random.Random:
    """Accept a ``random.Random``, an int seed, or None (fresh OS entropy)."""
    if isinstance(rng, random.Random):
        return rng
    if rng is None:
        return random.Random()
    return make_rng(rng)
