"""Deterministic seed derivation.

All randomness in the package flows from explicit integer seeds. Child
seeds are derived by feeding the (parent seed, index...) tuple through
numpy's SeedSequence, so any unit of work (a tree, a forest, a fold, a
repetition, a participant) gets an independent stream that does not
depend on execution order or thread count.
"""

from __future__ import annotations

import hashlib

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed {seed} outside [0, {MAX_SEED}]")
    return seed


def derive_seed(*parts: int) -> int:
    """Mix integer parts into one 64-bit child seed."""
    return int(np.random.SeedSequence(parts).generate_state(1, np.uint64)[0])


def derive_seed_pair(*parts: int) -> tuple[int, int]:
    """Two independent 64-bit child seeds from the same parts."""
    state = np.random.SeedSequence(parts).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def participant_key(participant_id: str) -> int:
    """Stable 64-bit key for a participant id (process-independent)."""
    digest = hashlib.sha256(participant_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
