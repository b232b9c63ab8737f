"""Counter-based random streams built on the SplitMix64 mixer.

Every random quantity is addressed by a key path ``(seed, tag, index, ...)``
and a counter. The key path is folded with the SplitMix64 finalizer
(Steele, Lea & Flood 2014; constants from Vigna's reference code); the
counter-th output of a stream with key ``k`` is ``mix64(k + (counter+1)*GOLDEN)``,
i.e. the SplitMix64 sequence started at ``k``. Outputs therefore depend only
on their address, never on evaluation order, batching or parallelism, and
whole trial batches are generated with vectorized numpy arithmetic.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31 = np.uint64(30), np.uint64(27), np.uint64(31)
_S11, _S63 = np.uint64(11), np.uint64(63)
_TWO_M53 = 2.0**-53

# stream tags
STATES = 1
SELECTIONS = 2
INPUTS = 3
CODE_ERASURE = 11
CODE_MESSAGE = 12
CODE_GENERATOR = 13


def mix64(z):
    """SplitMix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)


def stream_key(seed, *path):
    """Fold ``seed`` and a path of tags/indices into a 64-bit key.

    The last path element may be an integer array, giving one key per entry.
    """
    key = mix64(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF))
    for part in path:
        part = np.asarray(part, dtype=np.uint64)
        with np.errstate(over="ignore"):
            key = mix64(key + (part + np.uint64(1)) * GOLDEN)
    return key


def raw(keys, count: int, start: int = 0) -> np.ndarray:
    """``count`` consecutive 64-bit outputs per key; shape ``keys.shape + (count,)``."""
    keys = np.asarray(keys, dtype=np.uint64)
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(keys[..., None] + counters * GOLDEN)


def to_index(words: np.ndarray, n: int) -> np.ndarray:
    """Map 64-bit words to integers uniform on ``[0, n)`` via their top 53 bits."""
    u = (words >> _S11).astype(np.float64) * _TWO_M53
    return (u * n).astype(np.int64)


def to_bits(words: np.ndarray) -> np.ndarray:
    return (words >> _S63).astype(np.uint8)
