"""
Recurrence matrices and their line-structure measures (DET, LAM).

Matrices are stored as packed bit rows so that a full 6000-point series
fits in a few megabytes. Line histograms count maximal runs only; runs cut
by the matrix border count at their truncated length.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ._bitops import get_bit, n_words, pack_rows, unpack_rows
from .embedding import EmbeddedTrajectory
from .errors import InvalidInput, UndefinedMeasure

NORMS = ("euclidean", "maximum")
RP_MAGIC = b"RPV1"
_RP_HEADER = struct.Struct("<4sQd")


@dataclass(frozen=True)
class RecurrenceMatrix:
    bits: np.ndarray = field(repr=False)
    n: int
    epsilon: float
    norm: str = "euclidean"

    def __post_init__(self):
        if self.bits.shape != (self.n, n_words(self.n)):
            raise InvalidInput("bit rows do not match matrix size")
        self.bits.setflags(write=False)

    @classmethod
    def from_dense(cls, dense, epsilon=np.nan, norm="euclidean"):
        """Wrap an explicit symmetric, reflexive 0/1 matrix."""
        dense = np.asarray(dense).astype(bool)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise InvalidInput("recurrence matrix must be square")
        if not np.array_equal(dense, dense.T):
            raise InvalidInput("recurrence matrix must be symmetric")
        if not dense.diagonal().all():
            raise InvalidInput("recurrence matrix must have a unit diagonal")
        return cls(pack_rows(dense), len(dense), float(epsilon), norm)

    def to_dense(self):
        return unpack_rows(self.bits, self.n)

    def __getitem__(self, ij):
        i, j = ij
        return int(get_bit(self.bits, i, j))

    def __len__(self):
        return self.n

    def recurrence_count(self):
        """Total number of ones, line of identity included."""
        return int(np.unpackbits(
            np.ascontiguousarray(self.bits).view(np.uint8)).sum())


@dataclass(frozen=True)
class LineHistogram:
    """``counts[l]`` is the number of maximal lines of length ``l``."""

    counts: np.ndarray
    orientation: str

    def as_dict(self):
        return {int(l): int(c) for l, c in enumerate(self.counts) if c}

    def points(self, min_length=1):
        """Recurrence points covered by lines of at least ``min_length``."""
        lengths = np.arange(len(self.counts), dtype=np.int64)
        lo = max(int(min_length), 1)
        return int(np.dot(lengths[lo:], self.counts[lo:].astype(np.int64)))


@njit(cache=True, nogil=True)
def _fill_rp(points, eps, maxnorm, bits):
    n, m = points.shape
    for i in range(n):
        bits[i, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        for j in range(i + 1, n):
            if maxnorm:
                d = 0.0
                for k in range(m):
                    t = abs(points[i, k] - points[j, k])
                    if t > d:
                        d = t
            else:
                s = 0.0
                for k in range(m):
                    t = points[i, k] - points[j, k]
                    s += t * t
                d = np.sqrt(s)
            if d <= eps:
                bits[i, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
                bits[j, i >> 6] |= np.uint64(1) << np.uint64(i & 63)


def recurrence_matrix(traj, epsilon: float = 0.25,
                      norm: str = "euclidean") -> RecurrenceMatrix:
    """R[i, j] = 1 iff the distance between states i and j is <= epsilon.

    ``traj`` may be an :class:`EmbeddedTrajectory` or a 1-D/2-D array of
    states (a 1-D array is treated as scalar states).
    """
    points = traj.points if isinstance(traj, EmbeddedTrajectory) else traj
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if norm not in NORMS:
        raise InvalidInput(f"unknown norm {norm!r}; expected one of {NORMS}")
    if not epsilon > 0:
        raise InvalidInput("epsilon must be positive")
    if len(points) < 2:
        raise InvalidInput("need at least two states")
    if not np.all(np.isfinite(points)):
        raise InvalidInput("non-finite coordinates in trajectory")
    n = len(points)
    bits = np.zeros((n, n_words(n)), dtype=np.uint64)
    _fill_rp(np.ascontiguousarray(points), float(epsilon),
             norm == "maximum", bits)
    return RecurrenceMatrix(bits, n, float(epsilon), norm)


@njit(cache=True, nogil=True)
def _diagonal_counts(bits, n, include_loi):
    counts = np.zeros(n + 1, dtype=np.int64)
    for k in range(1, n):
        run = 0
        for i in range(n - k):
            if get_bit(bits, i, i + k):
                run += 1
            elif run:
                counts[run] += 1
                run = 0
        if run:
            counts[run] += 1
    # lower triangle mirrors the upper one
    counts *= 2
    if include_loi:
        run = 0
        for i in range(n):
            if get_bit(bits, i, i):
                run += 1
            elif run:
                counts[run] += 1
                run = 0
        if run:
            counts[run] += 1
    return counts


@njit(cache=True, nogil=True)
def _vertical_counts(bits, n):
    # column j equals row j by symmetry; rows are contiguous in memory
    counts = np.zeros(n + 1, dtype=np.int64)
    for j in range(n):
        run = 0
        for i in range(n):
            if get_bit(bits, j, i):
                run += 1
            elif run:
                counts[run] += 1
                run = 0
        if run:
            counts[run] += 1
    return counts


def diagonal_histogram(R: RecurrenceMatrix,
                       exclude_loi: bool = True) -> LineHistogram:
    counts = _diagonal_counts(R.bits, R.n, not exclude_loi)
    return LineHistogram(counts, "diagonal")


def vertical_histogram(R: RecurrenceMatrix) -> LineHistogram:
    return LineHistogram(_vertical_counts(R.bits, R.n), "vertical")


def _ratio(hist, min_length, name):
    den = hist.points(1)
    if den == 0:
        raise UndefinedMeasure(f"{name}: no recurrence points to classify")
    # int / int is correctly rounded, so this equals float(Fraction(num, den))
    return hist.points(min_length) / den


def det(R: RecurrenceMatrix, l_min: int = 2, include_loi: bool = False) -> float:
    """Fraction of recurrence points on diagonal lines of length >= l_min.

    The line of identity is left out of numerator and denominator unless
    ``include_loi`` is set.
    """
    if l_min < 2:
        raise ValueError("l_min must be >= 2")
    hist = diagonal_histogram(R, exclude_loi=not include_loi)
    return _ratio(hist, l_min, "DET")


def lam(R: RecurrenceMatrix, v_min: int = 2) -> float:
    """Fraction of recurrence points on vertical lines of length >= v_min."""
    if v_min < 2:
        raise ValueError("v_min must be >= 2")
    return _ratio(vertical_histogram(R), v_min, "LAM")


def write_rp_binary(path, R: RecurrenceMatrix) -> None:
    """Dump R as header + packed rows.

    Header: magic ``RPV1``, N as little-endian uint64, epsilon as
    little-endian float64. Each row then takes ceil(N/8) bytes, column j at
    bit ``j % 8`` (least significant first) of byte ``j // 8``.
    """
    row_bytes = (R.n + 7) // 8
    as_bytes = np.ascontiguousarray(R.bits.astype("<u8")).view(np.uint8)
    with open(path, "wb") as fh:
        fh.write(_RP_HEADER.pack(RP_MAGIC, R.n, R.epsilon))
        fh.write(np.ascontiguousarray(as_bytes[:, :row_bytes]).tobytes())


def read_rp_binary(path, norm: str = "euclidean") -> RecurrenceMatrix:
    with open(path, "rb") as fh:
        head = fh.read(_RP_HEADER.size)
        if len(head) != _RP_HEADER.size:
            raise InvalidInput(f"{path}: truncated header")
        magic, n, eps = _RP_HEADER.unpack(head)
        if magic != RP_MAGIC:
            raise InvalidInput(f"{path}: bad magic {magic!r}")
        row_bytes = (n + 7) // 8
        body = np.frombuffer(fh.read(), dtype=np.uint8)
    if body.size != n * row_bytes:
        raise InvalidInput(f"{path}: expected {n * row_bytes} bytes of rows")
    rows = np.unpackbits(body.reshape(n, row_bytes), axis=1,
                         bitorder="little", count=n).astype(bool)
    return RecurrenceMatrix(pack_rows(rows), int(n), float(eps), norm)


def upper_coordinates(bits, n):
    """(i, j) pairs with i < j and a set bit, in row-major order."""
    dense = unpack_rows(bits, n)
    i, j = np.nonzero(np.triu(dense, k=1))
    return i, j
