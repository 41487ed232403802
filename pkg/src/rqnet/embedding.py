"""
Delay-embedding parameter estimation and phase-space reconstruction.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateVariance, InsufficientData, NoCrossing
from .preprocess import TimeSeries

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX = 2000


@dataclass(frozen=True)
class EmbeddingParams:
    dimension: int
    delay: int

    def __post_init__(self):
        if int(self.dimension) < 1 or int(self.delay) < 1:
            raise ValueError("embedding dimension and delay must be >= 1")
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "delay", int(self.delay))

    @property
    def span(self):
        """Index span (m-1)*tau covered by one delay vector."""
        return (self.dimension - 1) * self.delay

    def n_points(self, n):
        return n - self.span


@dataclass(frozen=True)
class EmbeddedTrajectory:
    points: np.ndarray
    params: EmbeddingParams

    def __len__(self):
        return len(self.points)


def _values(ts):
    if isinstance(ts, TimeSeries):
        return ts.values
    return np.asarray(ts, dtype=float)


def autocorrelation(ts, max_lag: int) -> np.ndarray:
    """Sample autocorrelation for lags ``0..max_lag``.

    Lag-k autocovariance is averaged over its N-k available products and
    divided by the lag-0 variance, so a periodic signal returns to ~1 at
    its period rather than decaying with lag.
    """
    x = _values(ts)
    n = len(x)
    if max_lag < 0 or max_lag >= n:
        raise InsufficientData(f"max_lag must be in [0, {n - 1}], got {max_lag}")
    d = x - x.mean()
    var = np.dot(d, d) / n
    if np.ptp(x) == 0.0:
        raise DegenerateVariance("autocorrelation of a constant series")
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(d, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    acov /= n - np.arange(max_lag + 1)
    acf = acov / var
    acf[0] = 1.0
    return acf


def estimate_delay(ts, max_lag: int | None = None) -> int:
    """First lag at which the autocorrelation drops to 1/e or below.

    ``max_lag`` defaults to N // 2. Raises :class:`NoCrossing` when the
    autocorrelation stays above 1/e up to ``max_lag``.
    """
    n = len(_values(ts))
    if max_lag is None:
        max_lag = n // 2
    acf = autocorrelation(ts, max_lag)
    below = np.nonzero(acf[1:] <= np.exp(-1.0))[0]
    if len(below) == 0:
        raise NoCrossing(f"autocorrelation stays above 1/e up to lag {max_lag}")
    return int(below[0]) + 1


def embed(ts, params: EmbeddingParams) -> EmbeddedTrajectory:
    """Delay vectors ``(x[i], x[i+tau], ..., x[i+(m-1)tau])``."""
    x = _values(ts)
    count = params.n_points(len(x))
    if count < 2:
        raise InsufficientData(
            f"series of length {len(x)} too short for m={params.dimension}, "
            f"tau={params.delay}")
    idx = np.arange(count)[:, None] + params.delay * np.arange(params.dimension)
    return EmbeddedTrajectory(np.ascontiguousarray(x[idx]), params)


def _nearest_neighbors(points):
    """Index and distance of each point's nearest other point.

    Exact search; ties go to the lowest index. Brute force up to
    ``BRUTE_FORCE_MAX`` points, a k-d tree above.
    """
    n = len(points)
    if n <= BRUTE_FORCE_MAX:
        idx = np.empty(n, dtype=np.int64)
        dist = np.empty(n)
        step = max(1, 2_000_000 // max(1, n * points.shape[1]))
        for lo in range(0, n, step):
            hi = min(lo + step, n)
            diff = points[lo:hi, None, :] - points[None, :, :]
            d2 = np.einsum("ijk,ijk->ij", diff, diff)
            d2[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
            j = np.argmin(d2, axis=1)
            idx[lo:hi] = j
            dist[lo:hi] = np.sqrt(d2[np.arange(hi - lo), j])
        return idx, dist
    tree = cKDTree(points)
    # the second-smallest distance counting the point itself is the
    # nearest-other distance, duplicates included
    d, _ = tree.query(points, k=2)
    radius = d[:, 1] * (1 + 1e-9) + 1e-300
    idx = np.empty(n, dtype=np.int64)
    dist = np.empty(n)
    for i, cand in enumerate(tree.query_ball_point(points, radius)):
        cand = np.array(sorted(c for c in cand if c != i), dtype=np.int64)
        # same arithmetic as the brute-force path, so ties resolve alike
        diff = points[i] - points[cand]
        d2 = np.einsum("jk,jk->j", diff, diff)
        k = int(np.argmin(d2))
        idx[i] = cand[k]
        dist[i] = np.sqrt(d2[k])
    return idx, dist


def fnn_fractions(ts, delay: int, m_max: int, r_tol: float = 10.0,
                  a_tol: float = 2.0) -> np.ndarray:
    """Fraction of false nearest neighbours for m = 1..m_max.

    Kennel's two tests: a neighbour is false if the added coordinate
    separates it by more than ``r_tol`` times the m-dimensional distance,
    or if the (m+1)-dimensional distance exceeds ``a_tol`` times the
    standard deviation of the series.
    """
    x = _values(ts)
    n = len(x)
    if n - m_max * delay < 2:
        raise InsufficientData(
            f"series of length {n} too short for FNN up to m={m_max}, "
            f"tau={delay}")
    attractor_size = np.std(x)
    fractions = np.empty(m_max)
    for m in range(1, m_max + 1):
        count = n - m * delay
        idx = np.arange(count)[:, None] + delay * np.arange(m)
        points = x[idx]
        nn, r_m = _nearest_neighbors(points)
        extra = np.abs(x[np.arange(count) + m * delay] - x[nn + m * delay])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(r_m > 0, extra / r_m,
                             np.where(extra > 0, np.inf, 0.0))
        r_next = np.sqrt(r_m ** 2 + extra ** 2)
        false = (ratio > r_tol) | (r_next > a_tol * attractor_size)
        fractions[m - 1] = false.mean()
        logger.debug("FNN m=%d fraction=%.4f", m, fractions[m - 1])
    return fractions


def fnn_dimension(ts, delay: int, m_max: int = 10, r_tol: float = 10.0,
                  a_tol: float = 2.0, threshold: float = 0.01) -> int:
    """Smallest m whose false-neighbour fraction is below ``threshold``.

    Returns ``m_max`` and issues a warning if no dimension qualifies.
    """
    fractions = fnn_fractions(ts, delay, m_max, r_tol, a_tol)
    return dimension_from_fractions(fractions, threshold)


def dimension_from_fractions(fractions, threshold: float = 0.01) -> int:
    """First dimension (1-based) with a fraction below ``threshold``."""
    below = np.nonzero(np.asarray(fractions) < threshold)[0]
    if len(below) == 0:
        m_max = len(fractions)
        warnings.warn(
            f"FNN fraction never fell below {threshold} up to m={m_max}; "
            f"returning m_max", RuntimeWarning, stacklevel=3)
        return m_max
    return int(below[0]) + 1
