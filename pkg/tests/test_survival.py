"""Hazard-model math: examples, quadrature oracle, median recovery."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import empirical_median_lifetime
from sparesim.errors import InvalidInputError
from sparesim.survival import (
    DEFAULT_SHAPE_RANGES,
    FAMILY_CODES,
    Family,
    HazardModel,
    MedianSpec,
    conditional_failure_prob,
    cumulative_hazard_batch,
    cumulative_hazard_increment,
    draw_model,
    hazard_rate,
    scale_from_median,
)

LN2 = math.log(2.0)


def test_hazard_rate_exponential_is_constant():
    model = HazardModel(Family.EXPONENTIAL, scale=0.01)
    assert hazard_rate(model, 50.0) == 0.01
    assert hazard_rate(model, 0.0) == 0.01


def test_hazard_rate_weibull_shape_one_reduces_to_exponential():
    model = HazardModel(Family.WEIBULL, scale=100.0, shape=1.0)
    assert hazard_rate(model, 73.0) == pytest.approx(0.01, rel=1e-12)


def test_hazard_rate_gompertz_example():
    model = HazardModel(Family.GOMPERTZ, scale=0.005, shape=0.002)
    expected = 0.002 * 0.005 * math.exp(0.005 * 200.0)
    assert hazard_rate(model, 200.0) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(2.718e-5, rel=1e-3)


def test_hazard_rate_rejects_bad_input():
    model = HazardModel(Family.EXPONENTIAL, scale=0.01)
    with pytest.raises(InvalidInputError):
        hazard_rate(model, -1.0)
    with pytest.raises(InvalidInputError):
        hazard_rate(model, math.nan)
    with pytest.raises(InvalidInputError):
        HazardModel(Family.WEIBULL, scale=-5.0, shape=2.0)


def test_cumulative_increment_examples():
    exp = HazardModel(Family.EXPONENTIAL, scale=0.1)
    assert cumulative_hazard_increment(exp, 0.0, 10.0) == pytest.approx(1.0, rel=1e-12)

    weib = HazardModel(Family.WEIBULL, scale=100.0, shape=2.0)
    assert cumulative_hazard_increment(weib, 100.0, 101.0) == pytest.approx(0.0201, rel=1e-12)

    loglog = HazardModel(Family.LOGLOGISTIC, scale=0.01, shape=2.0)
    assert cumulative_hazard_increment(loglog, 0.0, 100.0) == pytest.approx(LN2, rel=1e-12)


def test_cumulative_increment_rejects_reversed_bounds():
    model = HazardModel(Family.EXPONENTIAL, scale=0.1)
    with pytest.raises(InvalidInputError):
        cumulative_hazard_increment(model, 5.0, 4.0)


def _random_model(family: Family, rng: np.random.Generator) -> HazardModel:
    spec = MedianSpec(t_m_range=(100.0, 730.0), shape_range=DEFAULT_SHAPE_RANGES[family])
    return draw_model(family, spec, rng)


@pytest.mark.parametrize("family", list(Family))
def test_closed_form_matches_quadrature(family, rng):
    for _ in range(200):
        model = _random_model(family, rng)
        t0 = float(rng.uniform(0.0, 400.0))
        t1 = t0 + float(rng.uniform(0.01, 50.0))
        closed = cumulative_hazard_increment(model, t0, t1)
        numeric, err = quad(lambda u: hazard_rate(model, u), t0, t1, epsabs=0.0, epsrel=1e-11, limit=200)
        assert closed == pytest.approx(numeric, rel=1e-8, abs=1e-12), (model, t0, t1, err)


def test_batch_kernel_matches_scalar_forms(rng):
    models = [_random_model(family, rng) for family in Family for _ in range(25)]
    codes = np.array([FAMILY_CODES[m.family] for m in models], dtype=np.int64)
    scales = np.array([m.scale for m in models])
    shapes = np.array([m.shape for m in models])
    t0 = rng.uniform(0.0, 500.0, size=len(models))
    t1 = t0 + rng.uniform(0.0, 30.0, size=len(models))
    batch = cumulative_hazard_batch(codes, scales, shapes, t0, t1)
    for i, model in enumerate(models):
        assert batch[i] == pytest.approx(
            cumulative_hazard_increment(model, t0[i], t1[i]), rel=1e-12, abs=1e-15
        )


def test_conditional_prob_memoryless_examples():
    model = HazardModel(Family.EXPONENTIAL, scale=LN2)
    assert conditional_failure_prob(model, 0.0, 1.0) == pytest.approx(0.5, rel=1e-12)
    assert conditional_failure_prob(model, 500.0, 1.0) == pytest.approx(0.5, rel=1e-12)


def test_conditional_prob_vanishes_with_interval(rng):
    for family in Family:
        model = _random_model(family, rng)
        t_p = float(rng.uniform(0.0, 300.0))
        assert conditional_failure_prob(model, t_p, 1e-12) < 1e-9


def test_conditional_prob_bounds_and_monotonicity(rng):
    for _ in range(100):
        family = list(Family)[int(rng.integers(4))]
        model = _random_model(family, rng)
        t_p = float(rng.uniform(0.0, 400.0))
        dts = sorted(rng.uniform(0.01, 40.0, size=3))
        probs = [conditional_failure_prob(model, t_p, d) for d in dts]
        assert all(0.0 <= p <= 1.0 for p in probs)
        assert probs == sorted(probs)
        mults = sorted(rng.uniform(0.1, 3.0, size=3))
        by_mult = [conditional_failure_prob(model, t_p, 1.0, m) for m in mults]
        assert by_mult == sorted(by_mult)


def test_scale_from_median_examples():
    assert scale_from_median(Family.EXPONENTIAL, 100.0) == pytest.approx(0.0069315, rel=1e-4)
    lam = scale_from_median(Family.WEIBULL, 100.0, shape=1.0)
    assert lam == pytest.approx(100.0 / LN2, rel=1e-12)
    weib = HazardModel(Family.WEIBULL, scale=lam, shape=1.0)
    assert hazard_rate(weib, 5.0) == pytest.approx(LN2 / 100.0, rel=1e-12)
    gomp = scale_from_median(Family.GOMPERTZ, 100.0, shape=1.0)
    assert gomp == pytest.approx(math.log(1.0 + LN2) / 100.0, rel=1e-12)


@pytest.mark.parametrize("family", list(Family))
def test_median_inversion_puts_half_mass_at_t_m(family, rng):
    # P(T <= t_m) must be exactly one half under the closed-form hazard
    for _ in range(20):
        shape = float(rng.uniform(*DEFAULT_SHAPE_RANGES[family]))
        t_m = float(rng.uniform(50.0, 700.0))
        model = HazardModel(family, scale=scale_from_median(family, t_m, shape), shape=shape)
        p = conditional_failure_prob(model, 0.0, t_m)
        assert p == pytest.approx(0.5, rel=1e-10)


def test_weibull_shape_one_equals_exponential(rng):
    t_m = 140.0
    weib = HazardModel(Family.WEIBULL, scale=scale_from_median(Family.WEIBULL, t_m, 1.0), shape=1.0)
    expo = HazardModel(Family.EXPONENTIAL, scale=scale_from_median(Family.EXPONENTIAL, t_m))
    for _ in range(50):
        t_p = float(rng.uniform(0.0, 500.0))
        dt_ = float(rng.uniform(0.01, 30.0))
        assert conditional_failure_prob(weib, t_p, dt_) == pytest.approx(
            conditional_failure_prob(expo, t_p, dt_), rel=1e-12
        )


def test_draw_model_degenerate_range(rng):
    spec = MedianSpec(t_m_range=(100.0, 100.0))
    model = draw_model(Family.EXPONENTIAL, spec, rng)
    assert model.scale == pytest.approx(LN2 / 100.0, rel=1e-12)


def test_draw_model_uniform_support_and_mean(rng):
    spec = MedianSpec(t_m_range=(100.0, 150.0))
    medians = []
    for _ in range(10000):
        model = draw_model(Family.EXPONENTIAL, spec, rng)
        t_m = LN2 / model.scale
        assert 100.0 <= t_m <= 150.0
        medians.append(t_m)
    # uniform-mean oracle with the tolerance pinned by the contract
    assert abs(float(np.mean(medians)) - 125.0) < 1.5


def test_median_recovery_quick(rng):
    # fast single-family check; the full four-family run lives in acceptance
    model = HazardModel(
        Family.WEIBULL, scale=scale_from_median(Family.WEIBULL, 200.0, 2.0), shape=2.0
    )
    median = empirical_median_lifetime(model, 4000, rng)
    assert abs(median - 200.0) / 200.0 < 0.05
