"""GF(2) bit-matrix arithmetic: word-packed Gaussian elimination and rank."""

from __future__ import annotations

import numpy as np

WORD_BITS = 64


def _n_words(cols: int) -> int:
    return max(1, -(-cols // WORD_BITS))


_SHIFTS = np.arange(WORD_BITS, dtype=np.uint64)


class BitMatrix:
    """Dense matrix over GF(2) with rows packed into 64-bit words.

    Packing is row-major so that a row XOR (the elimination inner loop)
    is one contiguous word-wise operation. Bit j of row i lives in
    ``data[i, j // 64]`` at position ``j % 64``.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: np.ndarray):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        if data.shape != (rows, _n_words(cols)) or data.dtype != np.uint64:
            raise ValueError("data does not match packed shape")
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _n_words(cols)), dtype=np.uint64))

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "BitMatrix":
        """Pack a (rows, cols) array of 0/1 values."""
        bits = np.asarray(bits)
        if bits.ndim != 2:
            raise ValueError("expected a 2-d bit array")
        rows, cols = bits.shape
        nw = _n_words(cols)
        padded = np.zeros((rows, nw * WORD_BITS), dtype=np.uint64)
        padded[:, :cols] = bits & 1
        words = (padded.reshape(rows, nw, WORD_BITS) << _SHIFTS).sum(axis=2, dtype=np.uint64)
        return cls(rows, cols, words)

    def to_bits(self) -> np.ndarray:
        """Unpack to a (rows, cols) uint8 array."""
        expanded = (self.data[:, :, None] >> _SHIFTS) & np.uint64(1)
        return expanded.reshape(self.rows, -1)[:, : self.cols].astype(np.uint8)

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError("bit index out of range")
        return int((self.data[i, j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & np.uint64(1))

    def set(self, i: int, j: int, value: int) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError("bit index out of range")
        mask = np.uint64(1) << np.uint64(j % WORD_BITS)
        if value & 1:
            self.data[i, j // WORD_BITS] |= mask
        else:
            self.data[i, j // WORD_BITS] &= ~mask

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def row_reduce(m: BitMatrix) -> tuple[BitMatrix, int]:
    """Gaussian elimination on a copy; returns (row-echelon form, rank).

    First-set-bit pivoting only; GF(2) needs nothing fancier.
    """
    w = m.data.copy()
    rank = 0
    for col in range(m.cols):
        if rank == m.rows:
            break
        word, bit = divmod(col, WORD_BITS)
        bit = np.uint64(bit)
        colbits = (w[rank:, word] >> bit) & np.uint64(1)
        hits = np.nonzero(colbits)[0]
        if hits.size == 0:
            continue
        pivot = rank + int(hits[0])
        if pivot != rank:
            w[[rank, pivot]] = w[[pivot, rank]]
        below = rank + 1 + np.nonzero((w[rank + 1 :, word] >> bit) & np.uint64(1))[0]
        if below.size:
            w[below] ^= w[rank]
        rank += 1
    return BitMatrix(m.rows, m.cols, w), rank


def rank(m: BitMatrix) -> int:
    """GF(2) row rank. The input is not modified."""
    return row_reduce(m)[1]
