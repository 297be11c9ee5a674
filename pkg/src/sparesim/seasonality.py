"""Periodic seasonal coefficient w(t) built from radial basis functions.

w scales a part's hazard by calendar day and region:

    w(d) = sum_m A'_m * exp(-dist(mu_m, d)^2 / sigma_m^2)

with dist the circular (wrap-around) distance on a year of D days and
A'_m the basis amplitude scaled by a per-region multiplier. A flat
"no seasonality" profile is a single near-infinite-width basis with
amplitude 1, so every profile goes through the same formula.
"""

from __future__ import annotations

import datetime as dt
from calendar import isleap
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvalidInputError

REGIONS = ("southern", "northern")

LABEL_BOTH = "both_seasons"
LABEL_SUMMER = "summer"
LABEL_WINTER = "winter"
LABEL_NONE = "none"
LABELS = (LABEL_BOTH, LABEL_SUMMER, LABEL_WINTER, LABEL_NONE)

#: effectively-constant basis: exp(-d^2/sigma^2) differs from 1 by < 4e-8
#: anywhere on the year
FLAT_SIGMA = 1.0e6

#: minimum allowed w on any day; a near-zero multiplier would silently
#: freeze failures
DEFAULT_FLOOR = 0.05


@dataclass(frozen=True)
class SeasonalBasis:
    center_mu: float  # day-of-year in [0, D)
    width_sigma: float
    amplitude: float

    def __post_init__(self) -> None:
        if self.width_sigma <= 0.0:
            raise InvalidInputError(f"width_sigma must be > 0, got {self.width_sigma!r}")
        if self.amplitude < 0.0:
            raise InvalidInputError(f"amplitude must be >= 0, got {self.amplitude!r}")


@dataclass(frozen=True)
class SeasonalProfile:
    """An ordered basis set plus per-region amplitude scalings."""

    label: str
    bases: tuple[SeasonalBasis, ...]
    year_length: int = 365
    # region -> one amplitude scale per basis; missing regions scale by 1
    region_multipliers: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.bases) < 1:
            raise InvalidInputError("profile needs at least one basis")
        if self.year_length <= 0:
            raise InvalidInputError(f"year_length must be positive, got {self.year_length!r}")
        for region, mults in self.region_multipliers.items():
            if len(mults) != len(self.bases):
                raise InvalidInputError(
                    f"region {region!r} has {len(mults)} multipliers for {len(self.bases)} bases"
                )
        mu_max = max(b.center_mu for b in self.bases)
        mu_min = min(b.center_mu for b in self.bases)
        if mu_min < 0 or mu_max >= self.year_length:
            raise InvalidInputError("basis centers must lie in [0, year_length)")


def circular_distance(a: float, b: float, period: float) -> float:
    """Wrap-around distance between days a and b on a circle of the given period."""
    gap = abs(a - b)
    return min(gap, period - gap)


def day_of_year(date: dt.date, period: int = 365) -> int:
    """Map a calendar date to a 0-based day-of-year in [0, period).

    Leap days are folded onto a 365-day year: Feb 29 shares slot 59 with
    Mar 1, keeping every other date aligned with its non-leap slot.
    """
    offset = date.timetuple().tm_yday - 1
    if isleap(date.year) and offset >= 60:
        offset -= 1
    return offset % period


def seasonal_coefficient(profile: SeasonalProfile, region: str, date: dt.date) -> float:
    """Evaluate w for one region on one calendar date."""
    return _coefficient_at(profile, region, float(day_of_year(date, profile.year_length)))


def _coefficient_at(profile: SeasonalProfile, region: str, d: float) -> float:
    mults = profile.region_multipliers.get(region)
    total = 0.0
    for i, basis in enumerate(profile.bases):
        amp = basis.amplitude * (mults[i] if mults is not None else 1.0)
        dist = circular_distance(basis.center_mu, d, profile.year_length)
        total += amp * np.exp(-(dist * dist) / (basis.width_sigma**2))
    return float(total)


def coefficient_table(profile: SeasonalProfile, region: str) -> np.ndarray:
    """w evaluated on every day of the year; used by the demand generator."""
    return np.array(
        [_coefficient_at(profile, region, float(d)) for d in range(profile.year_length)]
    )


def validate_profile(profile: SeasonalProfile, floor: float = DEFAULT_FLOOR) -> None:
    """Reject profiles whose w dips below the positivity floor on any day/region."""
    regions = set(REGIONS) | set(profile.region_multipliers)
    for region in sorted(regions):
        table = coefficient_table(profile, region)
        if table.min() < floor:
            day = int(table.argmin())
            raise ConfigError(
                f"profile {profile.label!r}: w({day}) = {table.min():.4g} for region "
                f"{region!r} is below the floor {floor}"
            )


def default_catalog(
    winter_mu: float = 0.0,
    winter_sigma: float = 35.0,
    winter_amp: float = 1.2,
    summer_mu: float = 195.0,
    summer_sigma: float = 35.0,
    summer_amp: float = 0.8,
    region_boost: float = 1.3,
) -> dict[str, SeasonalProfile]:
    """Build the four stock profiles: both seasons, summer, winter, flat.

    Northern regions amplify the winter bump, southern regions the
    summer bump, both by ``region_boost``.
    """
    baseline = SeasonalBasis(center_mu=0.0, width_sigma=FLAT_SIGMA, amplitude=1.0)
    winter = SeasonalBasis(center_mu=winter_mu, width_sigma=winter_sigma, amplitude=winter_amp)
    summer = SeasonalBasis(center_mu=summer_mu, width_sigma=summer_sigma, amplitude=summer_amp)
    return {
        LABEL_BOTH: SeasonalProfile(
            label=LABEL_BOTH,
            bases=(baseline, winter, summer),
            region_multipliers={
                "northern": (1.0, region_boost, 1.0),
                "southern": (1.0, 1.0, region_boost),
            },
        ),
        LABEL_SUMMER: SeasonalProfile(
            label=LABEL_SUMMER,
            bases=(baseline, summer),
            region_multipliers={
                "northern": (1.0, 1.0),
                "southern": (1.0, region_boost),
            },
        ),
        LABEL_WINTER: SeasonalProfile(
            label=LABEL_WINTER,
            bases=(baseline, winter),
            region_multipliers={
                "northern": (1.0, region_boost),
                "southern": (1.0, 1.0),
            },
        ),
        LABEL_NONE: SeasonalProfile(label=LABEL_NONE, bases=(baseline,)),
    }
