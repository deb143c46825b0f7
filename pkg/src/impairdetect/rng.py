"""Seed derivation.

Every random stream in the package is a numpy ``Generator`` backed by PCG64
(a 64-bit permuted congruential generator).  Streams are derived from one root
seed and a purpose string::

    child = int.from_bytes(sha256(f"{root}:{purpose}").digest()[:8], "little")

so adding a new consumer never shifts the draws of an existing one.
"""
import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(seed: int, purpose: str) -> int:
    digest = hashlib.sha256(f"{int(seed) & MASK64}:{purpose}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(seed: int, purpose: str = "") -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(seed, purpose)))
