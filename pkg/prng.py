"""Counter-based Philox4x32-10 generator with splittable streams.

Every random draw in the toolkit comes from a ``PhiloxStream``: a 64-bit key
(the seed) plus a 32-bit stream id, encrypted block counters give the raw
words. Child streams are split off by encrypting a path index under the
parent key, so replication r of cell (d, n) always sees the same numbers no
matter how many workers run the study or in which order.
"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np

MASK32 = np.uint64(0xFFFFFFFF)
MASK64 = 0xFFFFFFFFFFFFFFFF
PHILOX_M0 = np.uint64(0xD2511F53)
PHILOX_M1 = np.uint64(0xCD9E8D57)
PHILOX_W0 = np.uint64(0x9E3779B9)
PHILOX_W1 = np.uint64(0xBB67AE85)
ROUNDS = 10

_SPAWN_TAG = 0x5EED5EED
_TWO_POW_M53 = 2.0 ** -53


def philox4x32(counters: np.ndarray, key: Tuple[int, int]) -> np.ndarray:
    """Encrypt an (N, 4) array of 32-bit counter words under ``key``."""
    ctr = np.asarray(counters, dtype=np.uint64) & MASK32
    c0, c1, c2, c3 = (ctr[:, i].copy() for i in range(4))
    k0 = np.uint64(key[0] & 0xFFFFFFFF)
    k1 = np.uint64(key[1] & 0xFFFFFFFF)
    for _ in range(ROUNDS):
        p0 = c0 * PHILOX_M0
        p1 = c2 * PHILOX_M1
        hi0, lo0 = p0 >> np.uint64(32), p0 & MASK32
        hi1, lo1 = p1 >> np.uint64(32), p1 & MASK32
        c0, c1, c2, c3 = (hi1 ^ c1 ^ k0) & MASK32, lo1, (hi0 ^ c3 ^ k1) & MASK32, lo0
        k0 = (k0 + PHILOX_W0) & MASK32
        k1 = (k1 + PHILOX_W1) & MASK32
    return np.stack([c0, c1, c2, c3], axis=1)


def _split64(value: int) -> Tuple[int, int]:
    value &= MASK64
    return value & 0xFFFFFFFF, value >> 32


class PhiloxStream:
    """Sequential view over one Philox stream; draws advance the block counter."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & MASK64
        self.stream = int(stream) & MASK64
        self._key = _split64(self.seed)
        self._block = 0

    def __repr__(self) -> str:
        return f"PhiloxStream(seed={self.seed}, stream={self.stream}, block={self._block})"

    def words(self, count: int) -> np.ndarray:
        """Next ``count`` raw 32-bit words (whole blocks are consumed)."""
        blocks = max(0, math.ceil(count / 4))
        idx = np.arange(self._block, self._block + blocks, dtype=np.uint64)
        s_lo, s_hi = _split64(self.stream)
        counters = np.empty((blocks, 4), dtype=np.uint64)
        counters[:, 0] = idx & MASK32
        counters[:, 1] = idx >> np.uint64(32)
        counters[:, 2] = s_lo
        counters[:, 3] = s_hi
        self._block += blocks
        return philox4x32(counters, self._key).reshape(-1)[:count]

    def uniforms(self, count: int) -> np.ndarray:
        """Doubles strictly inside (0, 1) with 53 random bits each."""
        w = self.words(2 * count).reshape(count, 2)
        hi = (w[:, 0] >> np.uint64(5)).astype(np.float64)
        lo = (w[:, 1] >> np.uint64(6)).astype(np.float64)
        return (hi * 67108864.0 + lo + 0.5) * _TWO_POW_M53

    def normals(self, count: int) -> np.ndarray:
        """Standard normals by the Box-Muller transform."""
        pairs = math.ceil(count / 2)
        u = self.uniforms(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log(u[:, 0]))
        angle = 2.0 * np.pi * u[:, 1]
        z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
        return z[:count]

    def spawn_seed(self, index: int) -> int:
        i_lo, i_hi = _split64(index)
        s_lo, _ = _split64(self.stream)
        block = np.array([[i_lo, i_hi, s_lo ^ _SPAWN_TAG, _SPAWN_TAG]], dtype=np.uint64)
        out = philox4x32(block, self._key)[0]
        return int(out[0]) | (int(out[1]) << 32)

    def spawn(self, index: int) -> "PhiloxStream":
        """Independent child stream; does not advance this stream."""
        return PhiloxStream(self.spawn_seed(index))


def derive_seed(seed: int, *path: int) -> int:
    """Seed of the stream reached by spawning along ``path`` from ``seed``."""
    current = int(seed) & MASK64
    for index in path:
        current = PhiloxStream(current).spawn_seed(index)
    return current
