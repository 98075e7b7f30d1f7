"""Fixed non-semantic text encoding: FNV-1a -> SplitMix64 -> Box-Muller.

The whole path is integer/float arithmetic pinned to exact constants, so a
given token sequence maps to the same Gaussian vector in any process, on any
platform, forever.  Nothing here is trainable.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
FNV_OFFSET_BASIS = 14695981039346656037
FNV_PRIME = 1099511628211

_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MUL1 = 0xBF58476D1CE4E5B9
_SM_MUL2 = 0x94D049BB133111EB


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a over a byte stream."""
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def hash_tokens(seq) -> int:
    """FNV-1a over token ids serialized as 4 little-endian bytes each."""
    return fnv1a_64(b"".join(int(t).to_bytes(4, "little") for t in seq))


def splitmix64_next(state: int) -> tuple[int, int]:
    """One SplitMix64 output; returns (value, new_state)."""
    state = (state + _SM_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _SM_MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _SM_MUL2) & MASK64
    return (z ^ (z >> 31)), state


def gaussian_from_seed(seed: int, d: int) -> np.ndarray:
    """d standard-normal draws (d even) from a SplitMix64 stream via Box-Muller.

    Each uint64 x maps to u = ((x >> 11) + 1) * 2**-53 in (0, 1]; pairs
    (u1, u2) give z1 = sqrt(-2 ln u1) cos(2 pi u2), z2 = ... sin(2 pi u2).
    """
    if d % 2 != 0:
        raise ValueError("gaussian_from_seed needs an even dimension")
    out = np.empty(d)
    state = seed & MASK64
    for i in range(d // 2):
        x1, state = splitmix64_next(state)
        x2, state = splitmix64_next(state)
        u1 = ((x1 >> 11) + 1) * 2.0 ** -53
        u2 = ((x2 >> 11) + 1) * 2.0 ** -53
        rad = math.sqrt(-2.0 * math.log(u1))
        ang = 2.0 * math.pi * u2
        out[2 * i] = rad * math.cos(ang)
        out[2 * i + 1] = rad * math.sin(ang)
    return out


def hash_encode(seq, d: int) -> np.ndarray:
    """Fixed Gaussian vector for a token sequence (the hash front end)."""
    return gaussian_from_seed(hash_tokens(seq), d)


class HashEncoder:
    """Caching wrapper around hash_encode; vectors are frozen read-only."""

    def __init__(self, d: int):
        if d % 2 != 0:
            raise ValueError("hash encoder dimension must be even")
        self.d = d
        self._cache: dict[tuple, np.ndarray] = {}

    def encode(self, seq) -> np.ndarray:
        key = tuple(seq)
        vec = self._cache.get(key)
        if vec is None:
            vec = hash_encode(key, self.d)
            vec.setflags(write=False)
            self._cache[key] = vec
        return vec

    def encode_batch(self, seqs) -> np.ndarray:
        out = np.empty((len(seqs), self.d))
        for i, s in enumerate(seqs):
            out[i] = self.encode(s)
        return out
