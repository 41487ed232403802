"""
Monotone trend tests: Kendall's tau against time and the Mann-Kendall test
with Hamed & Rao's (1998) variance correction for serially correlated data.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import norm, rankdata

from .errors import DegenerateSeries, InvalidInput


@dataclass(frozen=True)
class TrendResult:
    S: int
    tau: float
    variance: float
    z: float
    p: float
    direction: str
    n: int
    n_effective_ratio: float
    variance_uncorrected: float

    def as_dict(self):
        return asdict(self)


def _checked(series):
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise InvalidInput("trend tests take a 1-D series")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("non-finite values in series; drop them first")
    if len(x) < 3:
        raise DegenerateSeries(f"need at least 3 values, got {len(x)}")
    if np.all(x == x[0]):
        raise DegenerateSeries("all values are equal")
    return x


def mk_score(x) -> int:
    """S = sum over i < j of sign(x[j] - x[i])."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    s = 0
    for lo in range(0, n, 1024):
        hi = min(lo + 1024, n)
        d = np.sign(x[None, :] - x[lo:hi, None])
        # keep only j > i
        mask = np.arange(n)[None, :] > np.arange(lo, hi)[:, None]
        s += int(d[mask].sum())
    return s


def _tie_sizes(x):
    _, counts = np.unique(x, return_counts=True)
    return counts[counts > 1].astype(np.int64)


def kendall_tau(series) -> float:
    """Kendall's tau-b between the series and its time index."""
    x = _checked(series)
    n = len(x)
    n0 = n * (n - 1) // 2
    t = _tie_sizes(x)
    n1 = int(np.sum(t * (t - 1) // 2))
    return mk_score(x) / math.sqrt(n0 * (n0 - n1))


def _mk_variance(x):
    n = len(x)
    t = _tie_sizes(x)
    return (n * (n - 1) * (2 * n + 5)
            - float(np.sum(t * (t - 1) * (2 * t + 5)))) / 18.0


def sen_slope(x) -> float:
    n = len(x)
    i, j = np.triu_indices(n, k=1)
    return float(np.median((x[j] - x[i]) / (j - i)))


def _acf(x, nlags):
    d = x - x.mean()
    denom = np.dot(d, d)
    n = len(x)
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(d, nfft)
    return np.fft.irfft(f * np.conj(f), nfft)[: nlags + 1] / denom


def hamed_rao_factor(x, alpha_lag: float = 0.05) -> float:
    """Variance inflation n/n* from significant rank autocorrelations.

    The series is detrended with Sen's slope and ranked; each lag's
    autocorrelation enters only if it is outside the two-sided
    ``alpha_lag`` band of +-z/sqrt(n). A negative sum floors the factor at 1.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    resid = x - sen_slope(x) * np.arange(1, n + 1)
    ranks = rankdata(resid)
    if np.all(ranks == ranks[0]):
        return 1.0
    rho = _acf(ranks, n - 1)[1:]
    bound = norm.ppf(1 - alpha_lag / 2) / math.sqrt(n)
    lags = np.arange(1, n)
    weights = (n - lags) * (n - lags - 1.0) * (n - lags - 2.0)
    keep = np.abs(rho) > bound
    total = float(np.sum(weights[keep] * rho[keep]))
    if total <= 0:
        return 1.0
    return 1.0 + 2.0 / (n * (n - 1.0) * (n - 2.0)) * total


def _z_score(s, var):
    if s > 0:
        return (s - 1) / math.sqrt(var)
    if s < 0:
        return (s + 1) / math.sqrt(var)
    return 0.0


def _mann_kendall(series, alpha, corrected):
    x = _checked(series)
    n = len(x)
    if n < 10:
        warnings.warn(f"Mann-Kendall test on only {n} values", stacklevel=3)
    s = mk_score(x)
    var0 = _mk_variance(x)
    factor = hamed_rao_factor(x) if corrected else 1.0
    var = var0 * factor
    z = _z_score(s, var)
    p = float(2.0 * norm.sf(abs(z)))
    if p < alpha:
        direction = "increasing" if s > 0 else "decreasing"
    else:
        direction = "none"
    return TrendResult(S=s, tau=kendall_tau(x), variance=var, z=z, p=p,
                       direction=direction, n=n, n_effective_ratio=factor,
                       variance_uncorrected=var0)


def mann_kendall_modified(series, alpha: float = 0.05) -> TrendResult:
    """Two-sided Mann-Kendall test with the Hamed-Rao correction.

    z carries the usual continuity correction; ``direction`` is set only
    when p < alpha.
    """
    return _mann_kendall(series, alpha, corrected=True)


def mann_kendall(series, alpha: float = 0.05) -> TrendResult:
    """Classic Mann-Kendall test (independent observations assumed)."""
    return _mann_kendall(series, alpha, corrected=False)


def trend_in_range(values, alpha: float = 0.05, corrected: bool = True):
    """Drop missing values, then test; returns (result, retained count)."""
    x = np.asarray(values, dtype=float)
    x = x[np.isfinite(x)]
    fn = mann_kendall_modified if corrected else mann_kendall
    return fn(x, alpha), len(x)
