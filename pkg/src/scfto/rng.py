"""Deterministic random stream derivation.

Every random draw in a simulation comes from a stream keyed by
(master seed, subsystem tag, node id, round index).  Streams are therefore
independent of iteration order and of how many draws other subsystems make,
so adding a metric or reordering bookkeeping cannot perturb the protocol.
"""
from __future__ import annotations

import random

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _key_to_int(key) -> int:
    if isinstance(key, int):
        return key & _MASK64
    if isinstance(key, str):
        # stable across processes, unlike hash()
        acc = 0xCBF29CE484222325
        for b in key.encode("utf-8"):
            acc = _splitmix64(acc ^ b)
        return acc
    raise TypeError(f"unsupported stream key type: {type(key)!r}")


def derive_seed(master_seed: int, *keys) -> int:
    """Mix the master seed with an arbitrary key tuple into a 64-bit seed."""
    state = _splitmix64(master_seed & _MASK64)
    for key in keys:
        state = _splitmix64(state ^ _key_to_int(key))
    return state


class StreamFactory:
    """Hands out independent `random.Random` streams for one master seed."""

    def __init__(self, master_seed: int):
        self.master_seed = master_seed & _MASK64

    def stream(self, subsystem: str, node: int = -1, round_idx: int = -1) -> random.Random:
        return random.Random(derive_seed(self.master_seed, subsystem, node, round_idx))
