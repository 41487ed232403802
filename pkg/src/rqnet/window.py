"""
Sliding-window analyses.

Two presets cover the usual set-ups: a long embedded window (1500 steps,
slide 100, m = 4 with a per-market delay) and a short non-embedded window
(250 steps, slide 10). Every window value is assigned to the window centre
``start + length // 2``. Windows whose measure cannot be computed keep a
NaN with a status string instead of being dropped.
"""
from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import network, recurrence
from .embedding import EmbeddingParams, autocorrelation, embed
from .errors import ConfigError, ConfigMismatch, InsufficientData, RqnetError
from .preprocess import TimeSeries, uniform_deviate

logger = logging.getLogger(__name__)

MEASURES = ("DET", "LAM", "CC", "CPL", "VAR", "AC1")
RECURRENCE_MEASURES = ("DET", "LAM", "CC", "CPL")
OK = "ok"


@dataclass(frozen=True)
class WindowConfig:
    length: int
    step: int
    embedding: Optional[EmbeddingParams] = None
    epsilon: float = 0.25
    measures: tuple = ("DET", "LAM")
    normalize: bool = True
    norm: str = "euclidean"
    l_min: int = 2
    v_min: int = 2
    include_loi: bool = False

    def __post_init__(self):
        object.__setattr__(self, "measures", tuple(self.measures))
        if self.length < 2 or self.step < 1:
            raise ConfigError("window length must be >= 2 and step >= 1")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if not self.measures:
            raise ConfigError("no measures requested")
        unknown = set(self.measures) - set(MEASURES)
        if unknown:
            raise ConfigError(f"unknown measures {sorted(unknown)}")
        if self.embedding is not None and \
                self.embedding.n_points(self.length) < 10:
            raise ConfigError(
                f"window of {self.length} leaves fewer than 10 states at "
                f"m={self.embedding.dimension}, tau={self.embedding.delay}")
        if self.length < 2 * self.step:
            warnings.warn(f"window length {self.length} is less than twice "
                          f"the step {self.step}", stacklevel=3)

    @property
    def dimension(self):
        return 1 if self.embedding is None else self.embedding.dimension

    def describe(self):
        """Flat key/value view used in output headers."""
        return {
            "window_length": self.length,
            "window_step": self.step,
            "embed_m": self.dimension,
            "tau": "none" if self.embedding is None else self.embedding.delay,
            "epsilon": self.epsilon,
            "measures": ",".join(self.measures),
            "normalize": self.normalize,
            "norm": self.norm,
            "l_min": self.l_min,
            "v_min": self.v_min,
            "include_loi": self.include_loi,
        }


def gfc_preset(delay, dimension=4, measures=("DET", "LAM", "CC", "CPL"),
               **kw) -> WindowConfig:
    """1500-step windows slid by 100, embedded with global (m, tau)."""
    return WindowConfig(1500, 100, EmbeddingParams(dimension, delay),
                        measures=measures, **kw)


def short_preset(measures=("DET", "LAM"), **kw) -> WindowConfig:
    """250-step windows slid by 10, recurrence built from raw values."""
    return WindowConfig(250, 10, None, measures=measures, **kw)


@dataclass
class MeasureSeries:
    centers: np.ndarray
    values: dict
    status: dict
    config: WindowConfig
    label: str = ""
    dates: Optional[tuple] = field(default=None)

    def __len__(self):
        return len(self.centers)

    @property
    def measures(self):
        return tuple(self.values)

    def merge(self, other: "MeasureSeries") -> "MeasureSeries":
        """Combine the measures of two series over the same windows."""
        if not np.array_equal(self.centers, other.centers):
            raise ConfigMismatch("cannot merge series with different centres")
        values = dict(self.values)
        values.update(other.values)
        status = dict(self.status)
        status.update(other.status)
        return MeasureSeries(self.centers, values, status, self.config,
                             self.label, self.dates or other.dates)


def window_starts(n, length, step):
    if n < length:
        raise InsufficientData(
            f"series of length {n} shorter than one window ({length})")
    return np.arange(0, n - length + 1, step)


def sliding_windows(ts, cfg: WindowConfig):
    """List of ``(start, values)`` for every full window."""
    x = ts.values if isinstance(ts, TimeSeries) else np.asarray(ts, float)
    return [(int(s), x[s:s + cfg.length])
            for s in window_starts(len(x), cfg.length, cfg.step)]


def _failure(exc):
    return np.nan, type(exc).__name__


def measure_window(x, cfg: WindowConfig) -> dict:
    """All requested measures for one window: name -> (value, status)."""
    out = {}
    wanted = cfg.measures
    if any(m in wanted for m in RECURRENCE_MEASURES):
        try:
            y = uniform_deviate(x) if cfg.normalize else np.asarray(x, float)
            states = y if cfg.embedding is None else embed(y, cfg.embedding)
            R = recurrence.recurrence_matrix(states, cfg.epsilon, cfg.norm)
        except RqnetError as exc:
            for m in RECURRENCE_MEASURES:
                if m in wanted:
                    out[m] = _failure(exc)
        else:
            if "DET" in wanted:
                out["DET"] = _guard(recurrence.det, R, cfg.l_min,
                                    cfg.include_loi)
            if "LAM" in wanted:
                out["LAM"] = _guard(recurrence.lam, R, cfg.v_min)
            if "CC" in wanted or "CPL" in wanted:
                net = network.to_network(R)
                if "CC" in wanted:
                    out["CC"] = _guard(network.clustering_coefficient, net)
                if "CPL" in wanted:
                    out["CPL"] = _guard(
                        lambda g: network.characteristic_path_length(g).cpl,
                        net)
    if "VAR" in wanted:
        out["VAR"] = (float(np.var(x, ddof=1)), OK)
    if "AC1" in wanted:
        out["AC1"] = _guard(lambda v: float(autocorrelation(v, 1)[1]), x)
    return out


def _guard(fn, *args):
    try:
        return float(fn(*args)), OK
    except RqnetError as exc:
        return _failure(exc)


def windowed_measures(ts: TimeSeries, cfg: WindowConfig,
                      jobs: int = 1) -> MeasureSeries:
    """Evaluate ``cfg.measures`` on every window of ``ts``.

    Windows are independent; with ``jobs > 1`` they run on a thread pool
    (the numeric kernels release the GIL) and are gathered in window
    order, so the result does not depend on ``jobs``.
    """
    if not isinstance(ts, TimeSeries):
        ts = TimeSeries(ts)
    windows = sliding_windows(ts, cfg)
    starts = np.array([s for s, _ in windows], dtype=np.int64)
    if jobs > 1 and len(windows) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda w: measure_window(w[1], cfg),
                                    windows))
    else:
        results = [measure_window(w, cfg) for _, w in windows]
    centers = starts + cfg.length // 2
    values = {m: np.array([r[m][0] for r in results]) for m in cfg.measures}
    status = {m: tuple(r[m][1] for r in results) for m in cfg.measures}
    dates = None
    if ts.dates is not None:
        dates = tuple(ts.dates[c] for c in centers)
    logger.debug("%s: %d windows", ts.label, len(windows))
    return MeasureSeries(centers, values, status, cfg, ts.label, dates)


def variance_series(ts: TimeSeries, cfg: WindowConfig,
                    jobs: int = 1) -> MeasureSeries:
    """Unbiased variance of each window's values."""
    return windowed_measures(ts, replace(cfg, measures=("VAR",)), jobs)


def autocorr1_series(ts: TimeSeries, cfg: WindowConfig,
                     jobs: int = 1) -> MeasureSeries:
    """Lag-1 autocorrelation of each window; constant windows are missing."""
    return windowed_measures(ts, replace(cfg, measures=("AC1",)), jobs)


@dataclass(frozen=True)
class HeatmapTable:
    measure: str
    labels: tuple
    centers: np.ndarray
    dates: Optional[tuple]
    values: np.ndarray
    scores: np.ndarray


def _comparable(cfg):
    # the delay is estimated per market, so it may differ between rows
    return (cfg.length, cfg.step, cfg.dimension, cfg.epsilon, cfg.normalize,
            cfg.norm, cfg.l_min, cfg.v_min, cfg.include_loi)


def change_score(values):
    finite = values[np.isfinite(values)]
    if len(finite) == 0:
        return np.nan
    return float(finite.max() - finite.min())


def heatmap_table(series_set, measure: str) -> HeatmapTable:
    """Markets x window-centres matrix, rows in ascending order of change.

    The change score of a market is max - min of its measure over time;
    ties are broken by label and markets without any value go last.
    """
    series_set = list(series_set)
    if not series_set:
        raise ValueError("no series given")
    ref = _comparable(series_set[0].config)
    for s in series_set[1:]:
        if _comparable(s.config) != ref:
            raise ConfigMismatch(
                f"{s.label}: window configuration differs from "
                f"{series_set[0].label}")
    for s in series_set:
        if measure not in s.values:
            raise KeyError(f"{s.label} has no {measure} series")

    centers = np.unique(np.concatenate([s.centers for s in series_set]))
    pos = {c: k for k, c in enumerate(centers.tolist())}
    date_of = {}
    rows = []
    for s in series_set:
        row = np.full(len(centers), np.nan)
        for k, c in enumerate(s.centers.tolist()):
            row[pos[c]] = s.values[measure][k]
            if s.dates is not None:
                date_of.setdefault(c, s.dates[k])
        rows.append(row)
    scores = np.array([change_score(r) for r in rows])
    order = sorted(range(len(series_set)),
                   key=lambda k: (np.isnan(scores[k]),
                                  0.0 if np.isnan(scores[k]) else scores[k],
                                  series_set[k].label))
    dates = None
    if date_of and len(date_of) == len(centers):
        dates = tuple(date_of[c] for c in centers.tolist())
    return HeatmapTable(
        measure=measure,
        labels=tuple(series_set[k].label for k in order),
        centers=centers,
        dates=dates,
        values=np.array([rows[k] for k in order]).reshape(len(order),
                                                           len(centers)),
        scores=scores[order],
    )
