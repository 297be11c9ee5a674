"""Accuracy and pattern metrics against brute-force recomputation."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sparesim.errors import InvalidInputError
from sparesim.metrics import (
    adi,
    classify_pattern,
    cv2,
    iae,
    mae,
    pattern_report,
    r2,
    rmse,
)


# brute-force re-implementations with naive loops
def brute_mae(a, f):
    return sum(abs(x - y) for x, y in zip(a, f)) / len(a)


def brute_rmse(a, f):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, f)) / len(a))


def brute_r2(a, f):
    mean = sum(a) / len(a)
    sst = sum((x - mean) ** 2 for x in a)
    if sst == 0:
        return None
    sse = sum((x - y) ** 2 for x, y in zip(a, f))
    return 1 - sse / sst


def brute_iae(a, f):
    num = den = 0.0
    ca = cf = 0.0
    for x, y in zip(a, f):
        ca += x
        cf += y
        num += abs(cf - ca)
        den += max(ca, 1.0)
    return num / den


def brute_adi(series):
    nonzero = [i for i, v in enumerate(series) if v > 0]
    if not nonzero:
        return None
    intervals = [nonzero[0] + 1] + [b - a for a, b in zip(nonzero, nonzero[1:])]
    return sum(intervals) / len(intervals)


def brute_cv2(series):
    sizes = [v for v in series if v > 0]
    if len(sizes) < 2:
        return 0.0
    mean = sum(sizes) / len(sizes)
    var = sum((s - mean) ** 2 for s in sizes) / len(sizes)
    return var / mean**2


def test_perfect_forecast():
    a = np.array([0.0, 2.0, 1.0, 0.0, 3.0])
    assert mae(a, a) == 0.0
    assert rmse(a, a) == 0.0
    assert r2(a, a) == 1.0
    assert iae(a, a) == 0.0


def test_hand_computed_examples():
    actual = np.array([0.0, 2.0])
    forecast = np.array([1.0, 1.0])
    assert mae(actual, forecast) == pytest.approx(1.0)
    assert rmse(actual, forecast) == pytest.approx(1.0)
    assert r2(actual, forecast) == pytest.approx(0.0)


def test_r2_of_mean_forecast_is_zero():
    actual = np.array([1.0, 4.0, 2.0, 5.0])
    forecast = np.full(4, actual.mean())
    assert r2(actual, forecast) == pytest.approx(0.0, abs=1e-15)


def test_r2_undefined_for_constant_actuals():
    assert r2(np.full(5, 2.0), np.arange(5.0)) is None


def test_iae_examples():
    assert iae(np.zeros(4), np.zeros(4)) == 0.0
    actual = np.array([1.0, 0.0, 0.0])
    forecast = np.array([0.0, 0.0, 1.0])
    assert iae(actual, forecast) == pytest.approx(2.0 / 3.0, rel=1e-12)


def test_length_mismatch_raises():
    for fn in (mae, rmse, r2, iae):
        with pytest.raises(InvalidInputError):
            fn(np.ones(3), np.ones(4))


def test_metrics_match_brute_force(rng):
    for _ in range(200):
        n = int(rng.integers(1, 60))
        a = np.round(rng.gamma(1.0, 2.0, size=n) * (rng.random(n) < 0.4), 3)
        f = np.round(rng.gamma(1.0, 1.5, size=n), 3)
        assert mae(a, f) == pytest.approx(brute_mae(a, f), rel=1e-12, abs=1e-15)
        assert rmse(a, f) == pytest.approx(brute_rmse(a, f), rel=1e-12, abs=1e-15)
        expected_r2 = brute_r2(a, f)
        got_r2 = r2(a, f)
        if expected_r2 is None:
            assert got_r2 is None
        else:
            assert got_r2 == pytest.approx(expected_r2, rel=1e-12, abs=1e-12)
        assert iae(a, f) == pytest.approx(brute_iae(a, f), rel=1e-12, abs=1e-15)
        assert rmse(a, f) >= mae(a, f) - 1e-15  # power-mean inequality


def test_rmse_equals_mae_iff_errors_equal():
    a = np.array([1.0, 2.0, 3.0])
    f = a + 0.5
    assert rmse(a, f) == pytest.approx(mae(a, f), rel=1e-12)


def test_iae_scale_covariance_above_denominator_floor(rng):
    # once every cumulative actual is >= 1, scaling both series by c >= 1
    # scales numerator and denominator identically
    for _ in range(50):
        n = int(rng.integers(5, 40))
        a = rng.poisson(2.0, size=n).astype(float)
        a[0] = max(a[0], 1.0)
        f = rng.gamma(2.0, 1.0, size=n)
        c = float(rng.uniform(1.0, 10.0))
        assert iae(c * a, c * f) == pytest.approx(iae(a, f), rel=1e-12)


def test_adi_examples():
    assert adi(np.ones(10)) == 1.0
    every_third = np.array([0.0, 0.0, 1.0] * 5)
    assert adi(every_third) == pytest.approx(3.0)
    assert adi(np.zeros(6)) is None


def test_cv2_examples():
    assert cv2(np.array([0.0, 2.0, 0.0, 2.0, 2.0])) == 0.0
    assert cv2(np.zeros(5)) == 0.0
    assert cv2(np.array([0.0, 3.0])) == 0.0  # single size: zero variance


def test_adi_cv2_match_brute_force(rng):
    for _ in range(200):
        n = int(rng.integers(1, 80))
        y = (rng.random(n) < 0.3) * rng.poisson(3.0, size=n)
        y = y.astype(float)
        expected_adi = brute_adi(y)
        got = adi(y)
        if expected_adi is None:
            assert got is None
        else:
            assert got == pytest.approx(expected_adi, rel=1e-12)
            assert got >= 1.0
        assert cv2(y) == pytest.approx(brute_cv2(y), rel=1e-12, abs=1e-15)


def test_adi_depends_only_on_gap_multiset(rng):
    # permuting the gap structure preserves the mean interval
    y = np.array([1.0, 0.0, 0.0, 1.0, 0.0, 1.0])  # intervals 1,3,2
    z = np.array([0.0, 1.0, 0.0, 1.0, 0.0, 1.0])  # intervals 2,2,2
    assert adi(y) == adi(z) == 2.0


def test_classification_quadrants():
    assert classify_pattern(2.0, 0.2) == "intermittent"
    assert classify_pattern(1.0, 0.0) == "smooth"
    assert classify_pattern(2.0, 1.0) == "lumpy"
    assert classify_pattern(1.1, 0.8) == "erratic"
    # boundary behaviour: cutoffs belong to the upper region
    assert classify_pattern(1.32, 0.49) == "lumpy"
    with pytest.raises(InvalidInputError):
        classify_pattern(0.5, 0.1)


def test_pattern_report_handles_empty_series():
    report = pattern_report(np.zeros(10))
    assert report.adi is None and report.pattern is None and report.cv2 == 0.0
