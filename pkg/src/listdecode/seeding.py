"""Deterministic, platform-independent randomness.

Every random draw in the package goes through :func:`make_rng`, which wraps
numpy's PCG64 bit generator.  PCG64 output for a given integer seed is fixed
by numpy's stream-compatibility policy, so generator matrices and experiment
records reproduce bit-for-bit across machines.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

SEED_MASK = (1 << 64) - 1


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) <= SEED_MASK:
        raise ValueError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def derive_seed(master_seed: int, *path: int) -> int:
    """Stable 64-bit hash of ``(master_seed, *path)`` using BLAKE2b."""
    parts = [check_seed(master_seed), *(int(p) & SEED_MASK for p in path)]
    payload = struct.pack(f"<{len(parts)}Q", *parts)
    digest = hashlib.blake2b(payload, digest_size=8, person=b"listdecode").digest()
    return int.from_bytes(digest, "little")
