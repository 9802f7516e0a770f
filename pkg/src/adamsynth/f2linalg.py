"""Bit-packed linear algebra over GF(2).

Rows are packed little-endian into ``uint64`` words: column ``j`` lives in
word ``j // 64`` at bit ``j % 64``.  Bits past ``cols`` in the last word of a
row are always zero, so two matrices are equal iff their word arrays are.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

WORD = 64
_ONE = np.uint64(1)


def _nwords(cols: int) -> int:
    return max(1, (cols + WORD - 1) // WORD)


def _tail_mask(cols: int) -> np.uint64:
    rem = cols % WORD
    if cols == 0:
        return np.uint64(0)
    if rem == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << rem) - 1)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 2d 0/1 array into rows of uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    rows, cols = bits.shape
    nw = _nwords(cols)
    padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
    padded[:, :cols] = bits & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").astype(np.uint64).reshape(rows, nw)


def unpack_bits(words: np.ndarray, cols: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    rows = words.shape[0]
    as_bytes = words.view(np.uint8).reshape(rows, -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


class DimensionError(ValueError):
    """Raised when operands have incompatible shapes."""


class F2Matrix:
    """Immutable matrix over GF(2), stored as packed rows."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: Optional[np.ndarray] = None):
        if rows < 0 or cols < 0:
            raise DimensionError(f"negative shape ({rows}, {cols})")
        nw = _nwords(cols)
        if words is None:
            words = np.zeros((rows, nw), dtype=np.uint64)
        else:
            words = np.array(words, dtype=np.uint64, copy=True).reshape(rows, nw)
            if rows:
                words[:, -1] &= _tail_mask(cols)
        words.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self.words = words

    # -- construction ---------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "F2Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, bits) -> "F2Matrix":
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise DimensionError("expected a 2d array")
        return cls(bits.shape[0], bits.shape[1], pack_bits(bits))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "F2Matrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        dense = np.zeros((len(rows), cols), dtype=np.uint8)
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise DimensionError(f"row {i} has length {len(r)}, expected {cols}")
            dense[i] = r
        return cls.from_dense(dense)

    @classmethod
    def from_text(cls, text: str) -> "F2Matrix":
        """Parse the fixture format: one row of '0'/'1' per line, blank line ends."""
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                if rows:
                    break
                continue
            if set(line) - {"0", "1"}:
                raise ValueError(f"bad matrix row {line!r}")
            rows.append([int(ch) for ch in line])
        return cls.from_rows(rows)

    def to_text(self) -> str:
        return "".join("".join(map(str, r)) + "\n" for r in self.to_dense())

    # -- access ---------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        return unpack_bits(self.words, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return int((self.words[i, j // WORD] >> np.uint64(j % WORD)) & _ONE)

    def row(self, i: int) -> np.ndarray:
        return unpack_bits(self.words[i : i + 1], self.cols)[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"F2Matrix({self.rows}x{self.cols})"

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} + {other.shape}")
        return F2Matrix(self.rows, self.cols, self.words ^ other.words)

    def transpose(self) -> "F2Matrix":
        return F2Matrix.from_dense(self.to_dense().T)

    @property
    def T(self) -> "F2Matrix":
        return self.transpose()

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.cols != other.rows:
            raise DimensionError(f"{self.shape} @ {other.shape}")
        out = np.zeros((self.rows, _nwords(other.cols)), dtype=np.uint64)
        dense = self.to_dense()
        for i in range(self.rows):
            sel = np.flatnonzero(dense[i])
            if sel.size:
                out[i] = np.bitwise_xor.reduce(other.words[sel], axis=0)
        return F2Matrix(self.rows, other.cols, out)

    def apply(self, v: Sequence[int]) -> np.ndarray:
        """Return m·vᵀ as a 0/1 vector of length ``rows``."""
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} for {self.shape}")
        vw = pack_bits(np.asarray(v, dtype=np.uint8).reshape(1, -1))[0]
        return (np.bitwise_count(self.words & vw).sum(axis=1) & 1).astype(np.uint8)

    def hstack(self, other: "F2Matrix") -> "F2Matrix":
        if self.rows != other.rows:
            raise DimensionError(f"hstack {self.shape} | {other.shape}")
        return F2Matrix.from_dense(np.hstack([self.to_dense(), other.to_dense()]))

    def vstack(self, other: "F2Matrix") -> "F2Matrix":
        if self.cols != other.cols:
            raise DimensionError(f"vstack {self.shape} / {other.shape}")
        return F2Matrix(self.rows + other.rows, self.cols, np.vstack([self.words, other.words]))

    def select_rows(self, idx: Iterable[int]) -> "F2Matrix":
        idx = list(idx)
        return F2Matrix(len(idx), self.cols, self.words[idx] if idx else None)

    def is_zero(self) -> bool:
        return not self.words.any()


@dataclass(frozen=True)
class RowBasis:
    """Linearly independent vectors in reduced echelon form."""

    ambient_dim: int
    vectors: F2Matrix

    @property
    def dim(self) -> int:
        return self.vectors.rows

    def __len__(self) -> int:
        return self.vectors.rows

    def __iter__(self):
        for i in range(self.vectors.rows):
            yield self.vectors.row(i)


def _echelon(words: np.ndarray, stop_col: int) -> tuple[np.ndarray, list[int]]:
    """Reduce packed rows in place, pivoting on columns < stop_col only."""
    nrows = words.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(stop_col):
        if r == nrows:
            break
        w, b = divmod(c, WORD)
        shift = np.uint64(b)
        col = (words[r:, w] >> shift) & _ONE
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        hits = np.flatnonzero((words[:, w] >> shift) & _ONE)
        hits = hits[hits != r]
        if hits.size:
            words[hits, w:] ^= words[r, w:]
        pivots.append(c)
        r += 1
    return words, pivots


def rref(m: F2Matrix) -> tuple[F2Matrix, list[int]]:
    """Reduced row echelon form and its pivot columns."""
    words, pivots = _echelon(np.array(m.words, copy=True), m.cols)
    return F2Matrix(m.rows, m.cols, words), pivots


def rank(m: F2Matrix) -> int:
    return len(_echelon(np.array(m.words, copy=True), m.cols)[1])


def row_basis(m: F2Matrix) -> RowBasis:
    red, pivots = rref(m)
    return RowBasis(m.cols, red.select_rows(range(len(pivots))))


def kernel_basis(m: F2Matrix) -> RowBasis:
    """Basis of {v : m·vᵀ = 0}, in reduced echelon form."""
    n = m.cols
    red, pivots = rref(m)
    dense = red.to_dense()
    free = [c for c in range(n) if c not in set(pivots)]
    vecs = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        vecs[k, f] = 1
        for i, p in enumerate(pivots):
            vecs[k, p] = dense[i, f]
    if not free:
        return RowBasis(n, F2Matrix.zeros(0, n))
    return row_basis(F2Matrix.from_dense(vecs))


def left_kernel_and_image(m: F2Matrix) -> tuple[RowBasis, RowBasis]:
    """For the map v ↦ v·m, return (kernel, image) as row bases.

    Row-reduces ``[m | I]``; rows whose ``m`` part vanishes carry kernel vectors.
    """
    aug = m.hstack(F2Matrix.identity(m.rows))
    words, pivots = _echelon(np.array(aug.words, copy=True), m.cols)
    red = F2Matrix(aug.rows, aug.cols, words).to_dense()
    k = len(pivots)
    image = F2Matrix.from_dense(red[:k, : m.cols]) if k else F2Matrix.zeros(0, m.cols)
    kern = F2Matrix.from_dense(red[k:, m.cols :]) if k < m.rows else F2Matrix.zeros(0, m.rows)
    return row_basis(kern), RowBasis(m.cols, image)


def solve(m: F2Matrix, b: Sequence[int]) -> Optional[np.ndarray]:
    """A vector x with m·xᵀ = b, or None when b is outside the column space."""
    if len(b) != m.rows:
        raise DimensionError(f"right-hand side of length {len(b)} for {m.rows} rows")
    aug = np.hstack([m.to_dense(), np.asarray(b, dtype=np.uint8).reshape(-1, 1)])
    red, pivots = rref(F2Matrix.from_dense(aug))
    if pivots and pivots[-1] == m.cols:
        return None
    dense = red.to_dense()
    x = np.zeros(m.cols, dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = dense[i, m.cols]
    return x


def reduce_vector(basis: F2Matrix, pivots: Sequence[int], v: np.ndarray) -> np.ndarray:
    """Reduce v against rows already in reduced echelon form with the given pivots."""
    v = np.array(v, dtype=np.uint8, copy=True)
    dense = basis.to_dense()
    for i, p in enumerate(pivots):
        if v[p]:
            v ^= dense[i]
    return v
