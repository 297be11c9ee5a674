"""Shared fixtures and simulation helpers for the test suite."""

from __future__ import annotations

import datetime as dt

import numpy as np
import pytest

from sparesim.demand import GeneratorConfig
from sparesim.seasonality import SeasonalBasis, SeasonalProfile
from sparesim.survival import Family, HazardModel, conditional_failure_prob

START = dt.date(2022, 1, 1)


def unity_catalog() -> dict[str, SeasonalProfile]:
    """A catalog whose coefficient is exactly 1.0 in float64 on every day."""
    basis = SeasonalBasis(center_mu=0.0, width_sigma=1.0e12, amplitude=1.0)
    return {"none": SeasonalProfile(label="none", bases=(basis,))}


def zero_catalog() -> dict[str, SeasonalProfile]:
    """A catalog that multiplies every hazard by zero (floor bypassed)."""
    basis = SeasonalBasis(center_mu=0.0, width_sigma=1.0e6, amplitude=0.0)
    return {"none": SeasonalProfile(label="none", bases=(basis,))}


def small_config(**overrides) -> GeneratorConfig:
    """A fast single-dealer world with flat seasonality; override freely."""
    defaults = dict(
        start_date=START,
        horizon_days=100,
        n_dealers=1,
        trucks_range=(5, 5),
        parts_range=(2, 2),
        median_range=(100.0, 100.0),
        drift_mode="none",
        master_seed=7,
        hard_probability=0.0,
        families=(Family.EXPONENTIAL,),
        label_pool=("none",),
    )
    defaults.update(overrides)
    return GeneratorConfig(**defaults)


def empirical_median_lifetime(
    model: HazardModel, n: int, rng: np.random.Generator, max_days: int = 20000
) -> float:
    """Median first-failure day of n fresh parts under daily evaluation.

    Parts are exchangeable, so one shared age per day suffices; the loop
    stops as soon as the median order statistics are pinned down.
    """
    failures: list[int] = []
    remaining = n
    need = n // 2 + 1
    for day in range(max_days):
        if len(failures) >= need:
            break
        p = conditional_failure_prob(model, float(day), 1.0)
        k = int((p >= rng.random(remaining)).sum())
        failures.extend([day] * k)
        remaining -= k
    assert len(failures) >= need, "lifetime simulation did not reach the median"
    ordered = sorted(failures)
    if n % 2 == 1:
        return float(ordered[n // 2])
    return (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
