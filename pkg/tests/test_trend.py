import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from rqnet.errors import DegenerateSeries, InvalidInput
from rqnet.trend import (hamed_rao_factor, kendall_tau, mann_kendall,
                         mann_kendall_modified, mk_score, trend_in_range)

SERIES = [2.6, 9.9, 5, 0.6, 2.5, 7.5, -4.3, -7, 4.9, -1.3, 3.2, -7.9, -5.2,
          6.9, 4.1]


def ar1(rng, n, phi):
    e = rng.normal(size=n)
    y = np.zeros(n)
    for t in range(1, n):
        y[t] = phi * y[t - 1] + e[t]
    return y


def test_tau_monotone():
    x = np.arange(20.0)
    assert mk_score(x) == 190
    assert kendall_tau(x) == 1.0
    assert kendall_tau(-x) == -1.0


def test_tau_matches_pair_count_on_permutations(rng):
    for _ in range(50):
        x = rng.permutation(8).astype(float)
        s = oracles.mk_s(x)
        assert mk_score(x) == s
        assert kendall_tau(x) == s / 28


def test_tau_with_ties_uses_tau_b():
    x = [1.0, 1.0, 2.0, 3.0]
    # five concordant pairs, one tied pair: 5 / sqrt(6 * 5)
    assert kendall_tau(x) == pytest.approx(5 / math.sqrt(30), rel=1e-15)


def test_degenerate_inputs():
    with pytest.raises(DegenerateSeries):
        kendall_tau([2.0] * 5)
    with pytest.raises(DegenerateSeries):
        mann_kendall_modified([1.0, 2.0])
    with pytest.raises(InvalidInput):
        mann_kendall_modified([1.0, np.nan, 2.0, 3.0])


def test_increasing_series_detected():
    res = mann_kendall_modified(np.arange(20.0), 0.05)
    assert res.direction == "increasing"
    assert res.p < 0.001
    assert res.S == 190


def test_zero_score():
    x = [0, 1, 2, 3, 4, 5, 5, 4, 3, 2, 1, 0]
    res = mann_kendall_modified(x)
    assert res.S == 0
    assert res.z == 0.0
    assert res.p == 1.0
    assert res.direction == "none"


def test_frozen_statistics():
    # S, variance and correction from the loop oracles; p via erfc
    res = mann_kendall_modified(SERIES)
    assert res.S == -21
    assert res.variance_uncorrected == pytest.approx(408.3333333333333,
                                                     rel=1e-15)
    assert res.n_effective_ratio == 1.0
    assert res.z == pytest.approx(-0.989743318610787, rel=1e-12)
    assert res.p == pytest.approx(0.32229959587191925, rel=1e-12)
    assert res.direction == "none"


def test_correction_matches_oracle():
    y = ar1(np.random.default_rng(3), 60, 0.8)
    assert hamed_rao_factor(y) == pytest.approx(3.7910197187705075, rel=1e-10)
    res = mann_kendall_modified(y)
    assert res.S == 286
    assert res.variance == pytest.approx(
        res.variance_uncorrected * 3.7910197187705075, rel=1e-10)
    assert res.p > mann_kendall(y).p


def test_correction_against_oracle_random(rng):
    for _ in range(10):
        x = rng.normal(size=40).cumsum()
        assert hamed_rao_factor(x) == pytest.approx(
            oracles.hamed_rao_factor(x), rel=1e-9)


def test_tie_corrected_variance():
    x = [1, 1, 1, 2, 2, 3, 4, 5, 6, 7, 8]
    n = len(x)
    want = (n * (n - 1) * (2 * n + 5) - 3 * 2 * 11 - 2 * 1 * 9) / 18
    assert mann_kendall(x).variance == want


def test_short_series_warns():
    with pytest.warns(UserWarning):
        mann_kendall_modified([1.0, 3.0, 2.0, 4.0])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=3, max_size=60))
def test_result_invariants(values):
    x = np.asarray(values, dtype=float)
    if np.all(x == x[0]):
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = mann_kendall_modified(x)
        rev = mann_kendall_modified(x[::-1])
        mono = mann_kendall_modified(np.exp(x / 7) + 3)
    # the continuity correction maps |S| = 1 to z = 0
    if abs(res.S) > 1:
        assert np.sign(res.z) == np.sign(res.S)
    else:
        assert res.z == 0.0
    assert (res.direction == "none") == (res.p >= 0.05)
    assert 0 <= res.p <= 1
    assert -1 <= res.tau <= 1
    assert res.n_effective_ratio >= 1
    assert rev.S == -res.S
    flip = {"increasing": "decreasing", "decreasing": "increasing",
            "none": "none"}
    assert rev.direction == flip[res.direction]
    assert rev.z == -res.z
    assert mono.S == res.S
    if len(set(values)) == len(values):
        assert res.tau == res.S / (len(x) * (len(x) - 1) / 2)


def test_iid_correction_near_one(rng):
    factors = [hamed_rao_factor(rng.normal(size=100)) for _ in range(300)]
    assert np.median(factors) == 1.0
    assert np.mean(factors) < 1.15


def test_ar1_modified_rejects_less(rng):
    classic = modified = 0
    for _ in range(400):
        y = ar1(rng, 100, 0.8)
        classic += mann_kendall(y).p < 0.05
        modified += mann_kendall_modified(y).p < 0.05
    assert modified < classic


def test_trend_in_range_drops_missing():
    x = np.array([1.0, np.nan, 2.0, 3.0, np.nan, 4.0, 5.0, 6.0, 7.0, 8.0,
                  9.0, 10.0])
    res, kept = trend_in_range(x)
    assert kept == 10
    assert res.n == 10
    assert res.direction == "increasing"
    with pytest.raises(DegenerateSeries):
        trend_in_range(np.full(12, np.nan))
