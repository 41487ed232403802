"""Packed bit-row helpers.

Row ``i`` of an N x N binary matrix is stored as ``ceil(N / 64)`` uint64
words; column ``j`` lives in word ``j >> 6`` at bit ``j & 63``.
"""
import numpy as np
from numba import njit

WORD = 64


def n_words(n):
    return (n + WORD - 1) // WORD


def pack_rows(dense):
    """Pack a 2-D boolean array into uint64 bit rows."""
    dense = np.asarray(dense, dtype=bool)
    n_rows, n_cols = dense.shape
    w = n_words(n_cols)
    packed = np.packbits(dense, axis=1, bitorder="little")
    buf = np.zeros((n_rows, w * 8), dtype=np.uint8)
    buf[:, : packed.shape[1]] = packed
    return buf.view("<u8").astype(np.uint64)


def unpack_rows(bits, n_cols):
    """Inverse of :func:`pack_rows`."""
    as_bytes = np.ascontiguousarray(bits.astype("<u8")).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little",
                         count=n_cols).astype(bool)


@njit(cache=True, nogil=True)
def popcount(w):
    w = w - ((w >> np.uint64(1)) & np.uint64(0x5555555555555555))
    w = (w & np.uint64(0x3333333333333333)) + \
        ((w >> np.uint64(2)) & np.uint64(0x3333333333333333))
    w = (w + (w >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((w * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True, nogil=True)
def lowest_bit_index(w):
    """Index of the least significant set bit of a nonzero word."""
    return popcount((w & (~w + np.uint64(1))) - np.uint64(1))


@njit(cache=True, nogil=True)
def get_bit(bits, i, j):
    return (bits[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1)
