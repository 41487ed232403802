import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from rqnet.embedding import EmbeddingParams
from rqnet.errors import ConfigError, ConfigMismatch, InsufficientData
from rqnet.preprocess import TimeSeries
from rqnet.trend import mann_kendall_modified
from rqnet.window import (OK, WindowConfig, autocorr1_series, gfc_preset,
                          heatmap_table, measure_window, short_preset,
                          sliding_windows, variance_series, windowed_measures)


def cfg(length, step, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return WindowConfig(length, step, **kw)


def test_window_starts():
    assert [s for s, _ in sliding_windows(np.zeros(300), cfg(100, 100))] == \
        [0, 100, 200]
    assert len(sliding_windows(np.zeros(299), cfg(100, 100))) == 2
    windows = sliding_windows(np.arange(6000.0), gfc_preset(5))
    assert len(windows) == 46
    assert all(len(w) == 1500 for _, w in windows)
    assert windows[-1][0] == 4500
    with pytest.raises(InsufficientData):
        sliding_windows(np.zeros(99), cfg(100, 10))


@given(st.integers(2, 500), st.integers(2, 200), st.integers(1, 60))
def test_window_count_formula(n, length, step):
    if n < length:
        return
    starts = [s for s, _ in sliding_windows(np.zeros(n), cfg(length, step))]
    assert len(starts) == (n - length) // step + 1
    assert starts[-1] <= n - length


def test_config_validation():
    with pytest.raises(ConfigError):
        WindowConfig(100, 10, EmbeddingParams(4, 31))
    assert WindowConfig(100, 10, EmbeddingParams(4, 30)).dimension == 4
    with pytest.raises(ConfigError):
        WindowConfig(100, 10, measures=("DET", "ENTR"))
    with pytest.raises(ConfigError):
        WindowConfig(100, 10, epsilon=0)
    with pytest.warns(UserWarning):
        WindowConfig(100, 60)
    assert short_preset().length == 250 and short_preset().step == 10
    g = gfc_preset(7)
    assert (g.length, g.step, g.dimension, g.embedding.delay) == (1500, 100, 4, 7)


def test_near_constant_series_det_near_one(rng):
    x = 3.0 + 1e-6 * rng.normal(size=600)
    c = cfg(250, 50, measures=("DET",), normalize=False)
    series = windowed_measures(TimeSeries(x), c)
    n = 250
    # every state recurs with every other, so R is all ones
    assert np.all(series.values["DET"] == 1 - 2 / (n * (n - 1)))
    dense = oracles.recurrence_dense(x[:n], c.epsilon)
    assert dense.all()


def test_sine_windows_beat_noise_windows(rng):
    t = np.arange(3000)
    sine = np.sin(2 * np.pi * t / 37)
    noise = rng.normal(size=3000)
    c = short_preset(measures=("DET", "LAM"))
    a = windowed_measures(TimeSeries(sine), c)
    b = windowed_measures(TimeSeries(noise), c)
    assert np.array_equal(a.centers, b.centers)
    assert np.all(a.values["DET"] > b.values["DET"])


def test_centers_and_alignment(rng):
    ts = TimeSeries(rng.normal(size=700))
    c = cfg(200, 50, measures=("DET", "LAM", "CC", "CPL", "VAR", "AC1"))
    s = windowed_measures(ts, c)
    assert s.centers.tolist() == list(range(100, 601, 50))
    for m in c.measures:
        assert len(s.values[m]) == len(s.centers)
        assert len(s.status[m]) == len(s.centers)
    assert np.all(np.diff(s.centers) == 50)


def test_window_equals_isolated_slice(rng):
    x = rng.normal(size=900).cumsum()
    c = cfg(300, 150, embedding=EmbeddingParams(3, 4),
            measures=("DET", "LAM", "CC", "CPL", "VAR", "AC1"))
    s = windowed_measures(TimeSeries(x), c)
    for k, (start, w) in enumerate(sliding_windows(x, c)):
        alone = measure_window(x[start:start + 300].copy(), c)
        for m in c.measures:
            assert alone[m][0] == s.values[m][k]


def test_shift_invariance_without_embedding(rng):
    block = rng.random(250)
    x = np.concatenate([block, rng.random(130), block])
    c = cfg(250, 10, measures=("DET", "LAM"), normalize=False)
    s = windowed_measures(TimeSeries(x), c)
    first, last = 0, len(s) - 1
    assert s.centers[last] - s.centers[first] == 380
    for m in ("DET", "LAM"):
        assert s.values[m][first] == s.values[m][last]


def test_failed_windows_marked_not_dropped():
    x = np.concatenate([np.zeros(100), np.arange(100.0) * 10])
    c = cfg(100, 100, measures=("DET", "AC1"), normalize=False)
    s = windowed_measures(TimeSeries(x), c)
    assert len(s) == 2
    assert math.isnan(s.values["AC1"][0])
    assert s.status["AC1"][0] == "DegenerateVariance"
    assert math.isnan(s.values["DET"][1])
    assert s.status["DET"][1] == "UndefinedMeasure"
    assert s.status["DET"][0] == OK


def test_jobs_do_not_change_results(rng):
    ts = TimeSeries(rng.normal(size=800))
    c = cfg(200, 20, embedding=EmbeddingParams(2, 3),
            measures=("DET", "LAM", "CC", "CPL"))
    a = windowed_measures(ts, c, jobs=1)
    b = windowed_measures(ts, c, jobs=4)
    for m in c.measures:
        assert np.array_equal(a.values[m], b.values[m], equal_nan=True)


def test_variance_examples(rng):
    c = cfg(50, 10)
    assert np.all(variance_series(TimeSeries(np.full(200, 2.0)), c)
                  .values["VAR"] == 0)
    n = 50
    alt = np.tile([0.0, 1.0], 100)
    assert np.allclose(variance_series(TimeSeries(alt), c).values["VAR"],
                       0.25 * n / (n - 1), rtol=1e-14)
    sigma = np.exp(np.linspace(0, math.log(2), 3000))
    ramp = rng.normal(size=3000) * sigma
    v = variance_series(TimeSeries(ramp), short_preset())
    res = mann_kendall_modified(v.values["VAR"])
    assert res.direction == "increasing"


def test_ac1_examples(rng):
    n = 250
    c = short_preset()
    alt = autocorr1_series(TimeSeries(np.tile([1.0, -1.0], 500)), c)
    assert np.all(np.abs(alt.values["AC1"] + 1) <= 1 / n)
    ar = np.zeros(5000)
    eps = rng.normal(size=5000)
    for t in range(1, 5000):
        ar[t] = 0.95 * ar[t - 1] + eps[t]
    smooth = autocorr1_series(TimeSeries(ar[1000:]), cfg(1000, 500))
    assert np.all(smooth.values["AC1"] > 0.9)
    iid = autocorr1_series(TimeSeries(rng.normal(size=5000)), c)
    inside = np.abs(iid.values["AC1"]) < 3 / math.sqrt(n)
    assert inside.mean() > 0.95


def _series(label, values, c):
    s = windowed_measures(TimeSeries(np.zeros(c.length + 10)),
                          cfg(c.length, c.step, measures=("VAR",)))
    s.values["VAR"] = np.asarray(values, float)
    s.label = label
    return s


def test_heatmap_orders_by_change():
    c = cfg(10, 5, measures=("VAR",))
    flat = _series("zz", [1.0, 1.0, 1.0], c)
    moving = _series("aa", [0.0, 2.0, 1.0], c)
    table = heatmap_table([moving, flat], "VAR")
    assert table.labels == ("zz", "aa")
    assert table.scores.tolist() == [0.0, 2.0]
    assert table.values.shape == (2, 3)
    dup = heatmap_table([_series("b", [0, 1, 2], c), _series("a", [0, 1, 2], c)],
                        "VAR")
    assert dup.labels == ("a", "b")


def test_heatmap_shape_for_batch(rng):
    c = short_preset(measures=("DET",))
    batch = []
    for k in range(26):
        s = windowed_measures(TimeSeries(rng.normal(size=400), label=f"m{k:02d}"), c)
        batch.append(s)
    table = heatmap_table(batch, "DET")
    assert table.values.shape == (26, (400 - 250) // 10 + 1)
    assert len(set(table.labels)) == 26
    assert np.all(np.diff(table.scores) >= 0)


def test_heatmap_rejects_mixed_configs():
    a = _series("a", [0, 1, 2], cfg(10, 5))
    b = windowed_measures(TimeSeries(np.zeros(30)), cfg(12, 5, measures=("VAR",)))
    with pytest.raises(ConfigMismatch):
        heatmap_table([a, b], "VAR")
