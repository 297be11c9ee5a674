"""Discrete-time demand generation over a dealer -> truck -> part hierarchy.

Time advances in fixed daily steps. Each step evaluates every part's
conditional failure probability (survival model x seasonal coefficient
x usage multiplier), triggers failures against uniform draws, applies
fleet drift, and ages all parts. Failures are demand events; they are
aggregated into per-(dealer, part type) daily count series.

Randomness is structured for reproducibility: the master seed spawns
one world-level stream (part-type catalog) plus one independent stream
per dealer, and every per-part draw consumes from its dealer's stream
in fixed iteration order. Changing one dealer's fleet therefore never
perturbs another dealer's event stream. Drift times are sampled even
when drift is disabled so that worlds with the same seed share the
same base fleet across drift modes.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

from . import seasonality
from .errors import ConfigError
from .seasonality import LABELS, REGIONS, SeasonalProfile, default_catalog, validate_profile
from .survival import (
    DEFAULT_SHAPE_RANGES,
    FAMILY_CODES,
    Family,
    HazardModel,
    MedianSpec,
    UsageModifier,
    cumulative_hazard_batch,
    draw_model,
)

DRIFT_MODES = ("none", "sudden", "slow", "combined")

USAGE_NORMAL = "normal"
USAGE_HARD = "hard"


@dataclass
class GeneratorConfig:
    start_date: dt.date
    horizon_days: int
    n_dealers: int
    trucks_range: tuple[int, int]
    parts_range: tuple[int, int]
    median_range: tuple[float, float]
    drift_mode: str = "none"
    master_seed: int = 0
    step_days: int = 1
    slow_period_days: int = 7
    sudden_alpha_range: tuple[float, float] = (1.25, 1.5)
    hard_multiplier: float = 1.5
    hard_probability: float = 0.5
    families: tuple[Family, ...] = tuple(Family)
    shape_ranges: dict[Family, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_SHAPE_RANGES)
    )
    seasonal_catalog: dict[str, SeasonalProfile] = field(default_factory=default_catalog)
    label_pool: tuple[str, ...] = LABELS
    seasonal_floor: float = seasonality.DEFAULT_FLOOR

    def validate(self) -> None:
        if self.horizon_days < 0:
            raise ConfigError(f"horizon_days must be >= 0, got {self.horizon_days}")
        if self.step_days < 1:
            raise ConfigError(f"step_days must be >= 1, got {self.step_days}")
        if self.n_dealers < 1:
            raise ConfigError(f"n_dealers must be >= 1, got {self.n_dealers}")
        for name, rng_ in (("trucks_range", self.trucks_range), ("parts_range", self.parts_range)):
            lo, hi = rng_
            if lo < 1 or hi < lo:
                raise ConfigError(f"{name} must satisfy 1 <= lower <= upper, got {rng_}")
        lo, hi = self.median_range
        if lo <= 0 or hi < lo:
            raise ConfigError(f"median_range must satisfy 0 < lower <= upper, got {self.median_range}")
        if self.drift_mode not in DRIFT_MODES:
            raise ConfigError(f"drift_mode must be one of {DRIFT_MODES}, got {self.drift_mode!r}")
        a_lo, a_hi = self.sudden_alpha_range
        if a_lo <= 1.0 or a_hi < a_lo:
            raise ConfigError(f"sudden_alpha_range must lie in (1, inf), got {self.sudden_alpha_range}")
        if self.slow_period_days < 1:
            raise ConfigError(f"slow_period_days must be >= 1, got {self.slow_period_days}")
        if not 0.0 <= self.hard_probability <= 1.0:
            raise ConfigError(f"hard_probability must be in [0, 1], got {self.hard_probability}")
        if self.hard_multiplier < 1.0:
            raise ConfigError(f"hard_multiplier must be >= 1, got {self.hard_multiplier}")
        for label in self.label_pool:
            if label not in self.seasonal_catalog:
                raise ConfigError(f"label {label!r} missing from the seasonal catalog")
        if self.seasonal_floor > 0.0:
            for profile in self.seasonal_catalog.values():
                validate_profile(profile, self.seasonal_floor)


@dataclass(frozen=True)
class PartType:
    id: str
    index: int
    model: HazardModel
    label: str


@dataclass
class Truck:
    id: str
    model_type: str
    usage: str


@dataclass
class DemandEvent:
    time: dt.date
    dealer_id: str
    truck_id: str
    part_id: str
    part_type: str


@dataclass
class DemandSeries:
    dealer_id: str
    part_type: str
    start_date: dt.date
    daily_counts: np.ndarray


@dataclass
class Dealer:
    """One dealer's fleet, with part state in parallel arrays.

    Parts are slots identified by (truck, part type); a failed part is
    replaced in place, which resets its age to zero.
    """

    id: str
    index: int
    location: str
    sudden_day: float
    slow_day: float
    rng: np.random.Generator
    trucks: list[Truck] = field(default_factory=list)
    ages: np.ndarray = field(default_factory=lambda: np.empty(0))
    type_idx: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    truck_idx: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    usage_mult: np.ndarray = field(default_factory=lambda: np.empty(0))
    sudden_fired: bool = False
    slow_spawned: int = 0


@dataclass
class World:
    config: GeneratorConfig
    part_types: list[PartType]
    dealers: list[Dealer]
    counts: np.ndarray  # (n_dealers, n_part_types, horizon_days)
    # per-type survival parameters, indexed by PartType.index
    type_codes: np.ndarray
    type_scales: np.ndarray
    type_shapes: np.ndarray
    # region -> (n_part_types, 365) seasonal coefficient table
    w_tables: dict[str, np.ndarray]
    day_of_year: np.ndarray  # day offset -> folded day-of-year

    def date_at(self, day: int) -> dt.date:
        return self.config.start_date + dt.timedelta(days=day)


def initialize(config: GeneratorConfig) -> World:
    """Build a world: part-type catalog, dealers, fleets, RNG streams.

    Deterministic given ``config.master_seed``. Every truck carries one
    part of each catalog type, so all trucks share one model type and
    per-(dealer, part type) series are comparable across dealers.
    """
    config.validate()
    root = np.random.SeedSequence(config.master_seed)
    streams = root.spawn(config.n_dealers + 1)
    world_rng = np.random.default_rng(streams[0])

    n_types = int(world_rng.integers(config.parts_range[0], config.parts_range[1], endpoint=True))
    part_types: list[PartType] = []
    for j in range(n_types):
        family = config.families[int(world_rng.integers(len(config.families)))]
        spec = MedianSpec(
            t_m_range=config.median_range,
            shape_range=config.shape_ranges.get(family, (1.0, 1.0)),
        )
        model = draw_model(family, spec, world_rng)
        label = config.label_pool[int(world_rng.integers(len(config.label_pool)))]
        part_types.append(PartType(id=f"pt{j:02d}", index=j, model=model, label=label))

    type_codes = np.array([FAMILY_CODES[pt.model.family] for pt in part_types], dtype=np.int64)
    type_scales = np.array([pt.model.scale for pt in part_types])
    type_shapes = np.array([pt.model.shape for pt in part_types])

    w_tables = {}
    for region in REGIONS:
        w_tables[region] = np.stack(
            [
                seasonality.coefficient_table(config.seasonal_catalog[pt.label], region)
                for pt in part_types
            ]
        )

    horizon = config.horizon_days
    doy = np.array(
        [
            seasonality.day_of_year(config.start_date + dt.timedelta(days=d))
            for d in range(horizon)
        ],
        dtype=np.int64,
    )

    dealers: list[Dealer] = []
    for i in range(config.n_dealers):
        rng = np.random.default_rng(streams[i + 1])
        location = REGIONS[int(rng.integers(len(REGIONS)))]
        sudden_day = float(rng.uniform(0.0, horizon))
        slow_day = float(rng.uniform(0.0, horizon))
        n_trucks = int(rng.integers(config.trucks_range[0], config.trucks_range[1], endpoint=True))
        dealer = Dealer(
            id=f"d{i:02d}",
            index=i,
            location=location,
            sudden_day=sudden_day,
            slow_day=slow_day,
            rng=rng,
        )
        _spawn_trucks(dealer, n_trucks, config, n_types)
        dealers.append(dealer)

    counts = np.zeros((config.n_dealers, n_types, horizon), dtype=np.int64)
    return World(
        config=config,
        part_types=part_types,
        dealers=dealers,
        counts=counts,
        type_codes=type_codes,
        type_scales=type_scales,
        type_shapes=type_shapes,
        w_tables=w_tables,
        day_of_year=doy,
    )


def usage_modifiers(config: GeneratorConfig) -> dict[str, UsageModifier]:
    return {
        USAGE_NORMAL: UsageModifier(USAGE_NORMAL, 1.0),
        USAGE_HARD: UsageModifier(USAGE_HARD, config.hard_multiplier),
    }


def _spawn_trucks(dealer: Dealer, count: int, config: GeneratorConfig, n_types: int) -> list[Truck]:
    """Add trucks with freshly sampled usage and age-zero parts."""
    modifiers = usage_modifiers(config)
    added: list[Truck] = []
    for _ in range(count):
        j = len(dealer.trucks)
        usage = USAGE_HARD if dealer.rng.random() < config.hard_probability else USAGE_NORMAL
        truck = Truck(id=f"{dealer.id}-t{j:04d}", model_type="m00", usage=usage)
        dealer.trucks.append(truck)
        added.append(truck)
    if count > 0:
        mult = np.array([modifiers[t.usage].hazard_multiplier for t in added])
        dealer.ages = np.concatenate([dealer.ages, np.zeros(count * n_types)])
        dealer.type_idx = np.concatenate(
            [dealer.type_idx, np.tile(np.arange(n_types, dtype=np.int64), count)]
        )
        start = len(dealer.trucks) - count
        dealer.truck_idx = np.concatenate(
            [dealer.truck_idx, np.repeat(np.arange(start, start + count, dtype=np.int64), n_types)]
        )
        dealer.usage_mult = np.concatenate([dealer.usage_mult, np.repeat(mult, n_types)])
    return added


def evaluate_demand(world: World, day: int) -> list[DemandEvent]:
    """Run one step of failure evaluation; emit events and reset failed ages.

    One uniform draw is consumed per part, in fixed part order, from the
    owning dealer's stream. A part fails when its step failure
    probability is >= the draw.
    """
    config = world.config
    date = world.date_at(day)
    doy = int(world.day_of_year[day]) if day < len(world.day_of_year) else seasonality.day_of_year(date)
    events: list[DemandEvent] = []
    for dealer in world.dealers:
        n = dealer.ages.shape[0]
        if n == 0:
            continue
        codes = world.type_codes[dealer.type_idx]
        scales = world.type_scales[dealer.type_idx]
        shapes = world.type_shapes[dealer.type_idx]
        increment = cumulative_hazard_batch(
            codes, scales, shapes, dealer.ages, dealer.ages + config.step_days
        )
        w = world.w_tables[dealer.location][dealer.type_idx, doy]
        prob = -np.expm1(-(w * dealer.usage_mult) * increment)
        u = dealer.rng.random(n)
        failed = np.nonzero(prob >= u)[0]
        if failed.size:
            dealer.ages[failed] = 0.0
            np.add.at(world.counts[dealer.index, :, day], dealer.type_idx[failed], 1)
            for idx in failed:
                truck = dealer.trucks[int(dealer.truck_idx[idx])]
                part_type = world.part_types[int(dealer.type_idx[idx])]
                events.append(
                    DemandEvent(
                        time=date,
                        dealer_id=dealer.id,
                        truck_id=truck.id,
                        part_id=f"{truck.id}-{part_type.id}",
                        part_type=part_type.id,
                    )
                )
    return events


def apply_drift(world: World, day: int) -> list[Truck]:
    """Grow fleets per the drift schedule; returns the trucks added today.

    Sudden drift fires once per dealer when the clock reaches its
    sudden time, scaling the fleet to ceil(alpha * N). Slow drift adds
    one truck per elapsed period after the dealer's slow time.
    """
    config = world.config
    mode = config.drift_mode
    n_types = len(world.part_types)
    added: list[Truck] = []
    for dealer in world.dealers:
        if mode in ("sudden", "combined") and not dealer.sudden_fired and day >= dealer.sudden_day:
            current = len(dealer.trucks)
            alpha = float(dealer.rng.uniform(*config.sudden_alpha_range))
            target = math.ceil(alpha * current)
            added.extend(_spawn_trucks(dealer, target - current, config, n_types))
            dealer.sudden_fired = True
        if mode in ("slow", "combined") and day >= dealer.slow_day:
            due = int((day - dealer.slow_day) // config.slow_period_days)
            if due > dealer.slow_spawned:
                added.extend(_spawn_trucks(dealer, due - dealer.slow_spawned, config, n_types))
                dealer.slow_spawned = due
    return added


def run(config: GeneratorConfig) -> tuple[list[DemandEvent], list[DemandSeries]]:
    """Run the full horizon and aggregate events into daily series.

    Step order per day: demand evaluation, drift, then the clock and all
    part ages advance by one step.
    """
    world = initialize(config)
    events: list[DemandEvent] = []
    for day in range(0, config.horizon_days, config.step_days):
        events.extend(evaluate_demand(world, day))
        apply_drift(world, day)
        for dealer in world.dealers:
            dealer.ages += config.step_days
    return events, collect_series(world)


def collect_series(world: World) -> list[DemandSeries]:
    """Per-(dealer, part type) daily count series, in (dealer, type) order."""
    series = []
    for dealer in world.dealers:
        for pt in world.part_types:
            series.append(
                DemandSeries(
                    dealer_id=dealer.id,
                    part_type=pt.id,
                    start_date=world.config.start_date,
                    daily_counts=world.counts[dealer.index, pt.index].copy(),
                )
            )
    return series
