"""Packed adjacency rows: bit ``j`` of row ``i`` lives in word ``j // 64``."""

import numpy as np

from ._accel import jit


def num_words(n):
    return (n + 63) // 64


def pack_rows(dense):
    """Pack an ``(n, n)`` boolean matrix into ``(n, ceil(n/64))`` uint64 rows."""
    dense = np.asarray(dense, dtype=bool)
    n = dense.shape[0]
    nw = num_words(n)
    padded = np.zeros((n, nw * 64), dtype=bool)
    padded[:, : dense.shape[1]] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed.view("<u8").astype(np.uint64))


def unpack_rows(rows, n):
    as_bytes = np.ascontiguousarray(rows.astype("<u8")).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :n].astype(bool)


def rows_to_ints(rows):
    """Rows as Python ints, for the interpreter fallback path."""
    return [int.from_bytes(np.ascontiguousarray(r.astype("<u8")).tobytes(), "little") for r in rows]


def row_popcounts(rows):
    """Number of set bits in every row (NumPy path)."""
    as_bytes = np.ascontiguousarray(rows.astype("<u8")).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1).sum(axis=1, dtype=np.int64)


@jit
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@jit
def popcount_row(row):
    c = 0
    for w in range(row.shape[0]):
        c += popcount64(row[w])
    return c


@jit
def pop_lowest(row):
    """Clear the lowest set bit of ``row`` and return its index (-1 if empty)."""
    for w in range(row.shape[0]):
        x = row[w]
        if x != np.uint64(0):
            low = x & (~x + np.uint64(1))
            row[w] = x ^ low
            return w * 64 + popcount64(low - np.uint64(1))
    return -1
