"""Deterministic stream derivation.

Every random draw in the harness comes from a Philox generator keyed by a
tuple of integers and short strings, so any piece of the computation can be
reproduced in isolation and results do not depend on evaluation order or
worker count.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK32 = 0xFFFFFFFF


def _key_word(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8")) & _MASK32
    if isinstance(part, (int, np.integer)):
        return int(part) & _MASK32
    raise TypeError(f"stream key parts must be int or str, got {type(part)!r}")


def stream(*parts) -> np.random.Generator:
    """Return a generator for the substream named by ``parts``."""
    words = [_key_word(p) for p in parts]
    seq = np.random.SeedSequence(words)
    return np.random.Generator(np.random.Philox(seq))


def substream_seed(*parts) -> int:
    """Collapse ``parts`` into a single 32-bit seed for kernel-level use."""
    words = [_key_word(p) for p in parts]
    return int(np.random.SeedSequence(words).generate_state(1, np.uint32)[0])
