"""Dense linear algebra over GF(2) on bit-packed rows.

Rows are packed little-endian into uint64 words: bit ``j`` of a row lives in
word ``j // 64`` at position ``j % 64``.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

_ONE = np.uint64(1)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


def words_for(bits: int) -> int:
    return (bits + 63) // 64


def pack_rows(bits: np.ndarray, width: Optional[int] = None) -> np.ndarray:
    """Pack an ``(n, m)`` 0/1 array into ``(n, words_for(width or m))`` uint64."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    n, m = bits.shape
    W = words_for(width if width is not None else m)
    padded = np.zeros((n, W * 64), dtype=np.uint8)
    padded[:, :m] = bits & 1
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64)


def unpack_rows(words: np.ndarray, m: int) -> np.ndarray:
    words = np.ascontiguousarray(np.atleast_2d(words), dtype=np.uint64)
    return np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")[:, :m]


def _block_mask(nb: int) -> np.uint64:
    return _ALL if nb == 64 else np.uint64((1 << nb) - 1)


def _pick_pivots(V: np.ndarray, nb: int) -> Optional[np.ndarray]:
    """Row order putting ``nb`` rows independent on the low ``nb`` bits first."""
    V = V.copy()
    order = np.arange(V.size)
    for b in range(nb):
        bit = np.uint64(1 << b)
        hits = np.flatnonzero(V[b:] & bit)
        if hits.size == 0:
            return None
        p = b + int(hits[0])
        if p != b:
            V[[b, p]] = V[[p, b]]
            order[[b, p]] = order[[p, b]]
        V[b + 1 :] ^= V[b] * ((V[b + 1 :] >> np.uint64(b)) & _ONE)
    return order


def _combination_table(P: np.ndarray) -> np.ndarray:
    """XOR of every subset of the rows of ``P`` (at most 8 rows)."""
    k = P.shape[0]
    T = np.zeros((1 << k, P.shape[1]), dtype=np.uint64)
    for i in range(k):
        T[1 << i : 2 << i] = T[: 1 << i] ^ P[i]
    return T


def _forward_eliminate(A: np.ndarray, K: int) -> bool:
    """Bring the first ``K`` columns of ``A`` to block-echelon form in place.

    Works one 64-column word at a time: pick that word's pivot rows, reduce
    them among themselves, then clear the word from all rows below with
    8-bit lookup tables of pivot-row combinations. Returns False as soon as
    some column has no pivot.
    """
    n = A.shape[0]
    r = 0
    for w in range(words_for(K)):
        nb = min(64, K - 64 * w)
        mask = _block_mask(nb)
        # a short window almost always holds a full set of pivots
        window = min(n - r, nb + 64)
        order = _pick_pivots(A[r : r + window, w] & mask, nb)
        if order is None and window < n - r:
            window = n - r
            order = _pick_pivots(A[r:, w] & mask, nb)
        if order is None:
            return False
        A[r : r + window] = A[r : r + window][order]

        P = A[r : r + nb, w:]
        for b in range(nb):
            bit = np.uint64(1 << b)
            if not P[b, 0] & bit:
                p = b + int(np.flatnonzero(P[b:, 0] & bit)[0])
                P[[b, p]] = P[[p, b]]
            sel = (P[:, 0] >> np.uint64(b)) & _ONE
            sel[b] = 0
            P ^= P[b] * sel[:, None]

        below = A[r + nb :, w:]
        if below.shape[0]:
            lead = below[:, 0] & mask
            for g in range(0, nb, 8):
                k = min(8, nb - g)
                table = _combination_table(P[g : g + k])
                idx = ((lead >> np.uint64(g)) & np.uint64((1 << k) - 1)).astype(np.intp)
                below ^= table[idx]
        r += nb
    return True


def solve_augmented(A: np.ndarray, K: int) -> Optional[np.ndarray]:
    """Solve ``M x = y`` where ``A`` packs ``[M | y]`` with ``y`` in column ``K``.

    Returns the unique solution as a 0/1 array of length ``K``, or None when
    ``M`` has rank below ``K`` or the system is inconsistent. ``A`` is not
    modified.
    """
    A = np.array(A, dtype=np.uint64, copy=True)
    n = A.shape[0]
    if K == 0:
        return np.zeros(0, dtype=np.uint8)
    if n < K or not _forward_eliminate(A, K):
        return None
    aug_word, aug_shift = K // 64, np.uint64(K % 64)
    if np.any((A[K:, aug_word] >> aug_shift) & _ONE):
        return None
    rhs = ((A[:K, aug_word] >> aug_shift) & _ONE).astype(np.uint8)
    pivots = A[:K].copy()
    pivots[:, aug_word] &= ~(_ONE << aug_shift)
    x_words = np.zeros(A.shape[1], dtype=np.uint64)
    for w in reversed(range(words_for(K))):
        lo, hi = 64 * w, min(64 * w + 64, K)
        parity = np.bitwise_count(pivots[lo:hi] & x_words).sum(axis=1) & 1
        xb = rhs[lo:hi] ^ parity.astype(np.uint8)
        x_words[w] = pack_rows(xb[None, :], 64)[0, 0]
    return unpack_rows(x_words[None, :], K)[0]


def rank(bits: np.ndarray) -> int:
    """Rank over GF(2) of a 0/1 matrix (plain row reduction on bytes)."""
    M = np.array(bits, dtype=np.uint8) & 1
    r = 0
    for c in range(M.shape[1]):
        if r == M.shape[0]:
            break
        rows = np.flatnonzero(M[r:, c])
        if rows.size == 0:
            continue
        p = r + int(rows[0])
        M[[r, p]] = M[[p, r]]
        others = np.flatnonzero(M[:, c])
        others = others[others != r]
        M[others] ^= M[r]
        r += 1
    return r
