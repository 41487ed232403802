"""
Recurrence networks: the recurrence matrix with its self-loops removed,
read as an unweighted undirected graph.

Clustering and path lengths run on the packed bit rows. Triangles through
a node are counted by intersecting its row with each neighbour's row, and
all-pairs distances come from one breadth-first search per source whose
frontier expansion is a word-wise OR of adjacency rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ._bitops import (get_bit, lowest_bit_index, pack_rows, popcount,
                      unpack_rows)
from .errors import InvalidInput, UndefinedMeasure
from .recurrence import RecurrenceMatrix


@dataclass(frozen=True)
class RecurrenceNetwork:
    bits: np.ndarray = field(repr=False)
    n: int
    degrees: np.ndarray = field(repr=False)
    epsilon: float = np.nan

    def __post_init__(self):
        self.bits.setflags(write=False)
        self.degrees.setflags(write=False)

    @classmethod
    def from_adjacency(cls, adjacency, epsilon=np.nan):
        """Build from an explicit symmetric 0/1 adjacency matrix."""
        a = np.asarray(adjacency).astype(bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput("adjacency must be square")
        if not np.array_equal(a, a.T):
            raise InvalidInput("adjacency must be symmetric")
        a = a.copy()
        np.fill_diagonal(a, False)
        bits = pack_rows(a)
        return cls(bits, len(a), _degrees(bits), float(epsilon))

    def to_dense(self):
        return unpack_rows(self.bits, self.n)

    def has_edge(self, i, j):
        return bool(get_bit(self.bits, i, j))

    @property
    def n_edges(self):
        return int(self.degrees.sum()) // 2


@njit(cache=True, nogil=True)
def _degrees(bits):
    n, w = bits.shape
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        s = 0
        for k in range(w):
            s += popcount(bits[i, k])
        out[i] = s
    return out


def to_network(R: RecurrenceMatrix) -> RecurrenceNetwork:
    bits = np.array(R.bits, copy=True)
    idx = np.arange(R.n)
    bits[idx, idx >> 6] &= ~(np.uint64(1) << (idx & 63).astype(np.uint64))
    return RecurrenceNetwork(bits, R.n, _degrees(bits), R.epsilon)


@njit(cache=True, nogil=True)
def _triangle_counts(bits):
    """Closed walks of length 3 through each node (twice the triangles)."""
    n, w = bits.shape
    out = np.zeros(n, dtype=np.int64)
    for v in range(n):
        total = 0
        for k in range(w):
            word = bits[v, k]
            while word:
                i = k * 64 + lowest_bit_index(word)
                word &= word - np.uint64(1)
                for q in range(w):
                    total += popcount(bits[v, q] & bits[i, q])
        out[v] = total
    return out


def local_clustering_all(net: RecurrenceNetwork) -> np.ndarray:
    """Local clustering of every node; nodes of degree < 2 get 0."""
    tri = _triangle_counts(net.bits).astype(float)
    k = net.degrees.astype(float)
    denom = k * (k - 1.0)
    out = np.zeros(net.n)
    ok = net.degrees > 1
    out[ok] = tri[ok] / denom[ok]
    return out


def local_clustering(net: RecurrenceNetwork, node: int) -> float:
    if not 0 <= node < net.n:
        raise IndexError(f"node {node} out of range for N={net.n}")
    k = int(net.degrees[node])
    if k <= 1:
        return 0.0
    row = net.bits[node]
    closed = 0
    for i in np.flatnonzero(unpack_rows(row[None, :], net.n)[0]):
        closed += int(np.unpackbits(
            (row & net.bits[i]).astype("<u8").view(np.uint8)).sum())
    return closed / (k * (k - 1))


def clustering_coefficient(net: RecurrenceNetwork) -> float:
    """Mean local clustering over all N nodes, isolated nodes included."""
    if net.n < 1:
        raise InvalidInput("empty network")
    return math.fsum(local_clustering_all(net)) / net.n


@njit(cache=True, nogil=True)
def _bfs_from(bits, source, visited, nxt, frontier, dist):
    """BFS from ``source``; writes hop counts into ``dist`` if it is
    non-empty. Returns (sum of distances, number of reached nodes)."""
    n, w = bits.shape
    record = dist.shape[0] > 0
    for k in range(w):
        visited[k] = np.uint64(0)
    visited[source >> 6] |= np.uint64(1) << np.uint64(source & 63)
    frontier[0] = source
    size = 1
    level = 0
    total = 0
    reached = 0
    while size > 0:
        level += 1
        for k in range(w):
            nxt[k] = np.uint64(0)
        for f in range(size):
            u = frontier[f]
            for k in range(w):
                nxt[k] |= bits[u, k]
        size = 0
        for k in range(w):
            word = nxt[k] & ~visited[k]
            visited[k] |= word
            while word:
                v = k * 64 + lowest_bit_index(word)
                word &= word - np.uint64(1)
                frontier[size] = v
                size += 1
                if record:
                    dist[v] = level
        total += level * size
        reached += size
    return total, reached


@njit(cache=True, nogil=True)
def _path_sums(bits):
    n, w = bits.shape
    visited = np.zeros(w, dtype=np.uint64)
    nxt = np.zeros(w, dtype=np.uint64)
    frontier = np.zeros(n, dtype=np.int64)
    no_dist = np.zeros(0, dtype=np.int64)
    total = 0
    pairs = 0
    for s in range(n):
        t, r = _bfs_from(bits, s, visited, nxt, frontier, no_dist)
        total += t
        pairs += r
    return total, pairs


@njit(cache=True, nogil=True)
def _distance_matrix(bits):
    n, w = bits.shape
    visited = np.zeros(w, dtype=np.uint64)
    nxt = np.zeros(w, dtype=np.uint64)
    frontier = np.zeros(n, dtype=np.int64)
    out = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        out[s, s] = 0
        _bfs_from(bits, s, visited, nxt, frontier, out[s])
    return out


@njit(cache=True, nogil=True)
def _component_count(bits):
    n, w = bits.shape
    seen = np.zeros(w, dtype=np.uint64)
    visited = np.zeros(w, dtype=np.uint64)
    nxt = np.zeros(w, dtype=np.uint64)
    frontier = np.zeros(n, dtype=np.int64)
    no_dist = np.zeros(0, dtype=np.int64)
    count = 0
    for s in range(n):
        if get_bit(seen.reshape(1, w), 0, s):
            continue
        count += 1
        _bfs_from(bits, s, visited, nxt, frontier, no_dist)
        for k in range(w):
            seen[k] |= visited[k]
    return count


def distance_matrix(net: RecurrenceNetwork) -> np.ndarray:
    """Hop distances between all node pairs; -1 marks unreachable pairs."""
    return _distance_matrix(net.bits)


@dataclass(frozen=True)
class PathLengthReport:
    cpl: float
    reachable_fraction: float
    n_components: int
    reachable_pairs: int
    distance_sum: int


def characteristic_path_length(net: RecurrenceNetwork) -> PathLengthReport:
    """Mean shortest-path length over ordered pairs that can reach each other.

    Pairs in different components are left out of the mean; the report
    carries the fraction of ordered pairs that were reachable and the
    number of connected components.
    """
    if net.n < 2:
        raise InvalidInput("path length needs at least two nodes")
    if net.n_edges == 0:
        raise UndefinedMeasure("CPL: network has no edges")
    total, pairs = _path_sums(net.bits)
    return PathLengthReport(
        cpl=int(total) / int(pairs),
        reachable_fraction=int(pairs) / (net.n * (net.n - 1)),
        n_components=int(_component_count(net.bits)),
        reachable_pairs=int(pairs),
        distance_sum=int(total),
    )


def write_edge_list(path, net: RecurrenceNetwork, meta=None) -> None:
    """Upper-triangle edge list ``i,j`` with a ``#`` metadata header."""
    from .recurrence import upper_coordinates

    meta = dict(meta or {})
    meta.setdefault("N", net.n)
    meta.setdefault("epsilon", net.epsilon)
    i, j = upper_coordinates(net.bits, net.n)
    with open(path, "w", newline="") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}={value}\n")
        fh.write("i,j\n")
        for a, b in zip(i.tolist(), j.tolist()):
            fh.write(f"{a},{b}\n")
