"""Run configuration: TOML parsing, defaults, and per-scenario wiring.

One config file drives the whole pipeline. ``DEFAULT_TOML`` below is
the single source of defaults: it is parsed for missing sections and
printed verbatim by ``--print-defaults``. Scenario seeds derive from
the master seed and the scenario id by stable hashing, so results are
independent of execution order and parallelism.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import seasonality
from .analysis import ScenarioSpec, build_scenario_grid
from .demand import DRIFT_MODES, GeneratorConfig
from .errors import ConfigError
from .forecasting import NATIVE_MODELS
from .inventory import CostParams, PolicyParams
from .survival import Family

DEFAULT_TOML = """\
# sparesim run configuration (defaults)

master_seed = 0

[generator]
start_date = "2022-01-01"
horizon_days = 1095
step_days = 1
n_dealers = 4
parts_per_truck_range = [5, 10]
hard_usage_multiplier = 1.5
hard_usage_probability = 0.5
seasonal_labels = ["both_seasons", "summer", "winter", "none"]

[generator.shape_ranges]
weibull = [0.8, 3.0]
loglogistic = [1.2, 3.0]
gompertz = [0.001, 0.1]

[grid]
drift_modes = ["none", "sudden", "slow", "combined"]
trucks_ranges = [[5, 10], [10, 30], [30, 50], [50, 100]]
median_ranges = [[100, 150], [150, 365], [365, 730]]

[drift]
slow_period_days = 7
sudden_alpha_range = [1.25, 1.5]

[seasonality]
winter_center_day = 0.0
winter_width_days = 35.0
winter_amplitude = 1.2
summer_center_day = 195.0
summer_width_days = 35.0
summer_amplitude = 0.8
region_boost = 1.3
positivity_floor = 0.05

[forecast]
train_days = 730
tune_holdout_days = 180
models = ["croston", "sba", "tsb", "ses", "seasonal_naive"]
smoothing_grid = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]
seasonal_period_days = 365

[policy]
review_period_days = 7
lead_time_days = 14
rush_lead_days = 2
service_z = 1.645
initial_stock = "auto"

[costs]
holding_per_unit_day = 0.1
order_fixed = 50.0
rush_order_fixed_premium = 200.0
transport_per_unit = 5.0
badwill_per_unit = 500.0
"""


@dataclass
class ForecastSettings:
    train_days: int = 730
    tune_holdout_days: int = 180
    models: tuple[str, ...] = NATIVE_MODELS
    smoothing_grid: tuple[float, ...] = tuple(i / 100 for i in range(5, 51, 5))
    seasonal_period_days: int = 365


@dataclass
class RunConfig:
    master_seed: int
    start_date: dt.date
    horizon_days: int
    step_days: int
    n_dealers: int
    parts_range: tuple[int, int]
    hard_multiplier: float
    hard_probability: float
    shape_ranges: dict[Family, tuple[float, float]]
    label_pool: tuple[str, ...]
    drift_modes: tuple[str, ...]
    trucks_ranges: tuple[tuple[int, int], ...]
    median_ranges: tuple[tuple[float, float], ...]
    slow_period_days: int
    sudden_alpha_range: tuple[float, float]
    seasonal: dict[str, float]
    forecast: ForecastSettings
    policy: PolicyParams
    costs: CostParams

    def catalog(self) -> dict[str, seasonality.SeasonalProfile]:
        s = self.seasonal
        return seasonality.default_catalog(
            winter_mu=s["winter_center_day"],
            winter_sigma=s["winter_width_days"],
            winter_amp=s["winter_amplitude"],
            summer_mu=s["summer_center_day"],
            summer_sigma=s["summer_width_days"],
            summer_amp=s["summer_amplitude"],
            region_boost=s["region_boost"],
        )

    def scenario_specs(self) -> list[ScenarioSpec]:
        return build_scenario_grid(self.drift_modes, self.trucks_ranges, self.median_ranges)

    def generator_config_for(self, spec: ScenarioSpec) -> GeneratorConfig:
        return GeneratorConfig(
            start_date=self.start_date,
            horizon_days=self.horizon_days,
            n_dealers=self.n_dealers,
            trucks_range=spec.trucks_range,
            parts_range=self.parts_range,
            median_range=spec.median_range,
            drift_mode=spec.drift_mode,
            master_seed=derive_seed(self.master_seed, spec.scenario_id),
            step_days=self.step_days,
            slow_period_days=self.slow_period_days,
            sudden_alpha_range=self.sudden_alpha_range,
            hard_multiplier=self.hard_multiplier,
            hard_probability=self.hard_probability,
            shape_ranges=self.shape_ranges,
            seasonal_catalog=self.catalog(),
            label_pool=self.label_pool,
            seasonal_floor=self.seasonal["positivity_floor"],
        )

def derive_seed(master_seed: int, scenario_id: str) -> int:
    """Stable 64-bit sub-seed for one scenario."""
    digest = hashlib.sha256(f"{master_seed}:{scenario_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _section(data: dict, name: str) -> dict:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"{name}: expected a table")
    return value


def _get(section: dict, path: str, key: str, kind, default):
    if key not in section:
        return default
    value = section[key]
    where = f"{path}.{key}"
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"{where}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _pair(section: dict, path: str, key: str, default, numeric=float):
    raw = section.get(key, default)
    where = f"{path}.{key}"
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ConfigError(f"{where}: expected a [lower, upper] pair")
    try:
        lo, hi = numeric(raw[0]), numeric(raw[1])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: not numeric: {raw!r}") from exc
    if hi < lo:
        raise ConfigError(f"{where}: lower bound exceeds upper bound: {raw!r}")
    return (lo, hi)


def parse_config(data: dict) -> RunConfig:
    """Build a validated RunConfig from parsed TOML, filling in defaults."""
    defaults = tomllib.loads(DEFAULT_TOML)

    def merged(name: str) -> dict:
        return {**_section(defaults, name), **_section(data, name)}

    master_seed = data.get("master_seed", defaults["master_seed"])
    if not isinstance(master_seed, int) or isinstance(master_seed, bool):
        raise ConfigError("master_seed: expected an integer")

    gen = merged("generator")
    try:
        start_date = dt.date.fromisoformat(_get(gen, "generator", "start_date", str, "2022-01-01"))
    except ValueError as exc:
        raise ConfigError(f"generator.start_date: {exc}") from exc

    shape_raw = gen.get("shape_ranges", {})
    if not isinstance(shape_raw, dict):
        raise ConfigError("generator.shape_ranges: expected a table")
    shape_defaults = _section(defaults, "generator")["shape_ranges"]
    shape_ranges: dict[Family, tuple[float, float]] = {Family.EXPONENTIAL: (1.0, 1.0)}
    for name in ("weibull", "loglogistic", "gompertz"):
        merged_shape = {**shape_defaults, **shape_raw}
        shape_ranges[Family(name)] = _pair(merged_shape, "generator.shape_ranges", name, None)

    labels = tuple(_get(gen, "generator", "seasonal_labels", list, list(seasonality.LABELS)))
    for label in labels:
        if label not in seasonality.LABELS:
            raise ConfigError(f"generator.seasonal_labels: unknown label {label!r}")

    grid = merged("grid")
    drift_modes = tuple(_get(grid, "grid", "drift_modes", list, list(DRIFT_MODES)))
    for mode in drift_modes:
        if mode not in DRIFT_MODES:
            raise ConfigError(f"grid.drift_modes: unknown mode {mode!r}")
    trucks_raw = _get(grid, "grid", "trucks_ranges", list, None)
    median_raw = _get(grid, "grid", "median_ranges", list, None)
    trucks_ranges = tuple(
        _pair({"r": r}, "grid.trucks_ranges", "r", None, numeric=int) for r in trucks_raw
    )
    median_ranges = tuple(_pair({"r": r}, "grid.median_ranges", "r", None) for r in median_raw)

    drift = merged("drift")
    sea = merged("seasonality")
    seasonal = {
        key: _get(sea, "seasonality", key, float, None)
        for key in (
            "winter_center_day",
            "winter_width_days",
            "winter_amplitude",
            "summer_center_day",
            "summer_width_days",
            "summer_amplitude",
            "region_boost",
            "positivity_floor",
        )
    }

    fc = merged("forecast")
    models = tuple(_get(fc, "forecast", "models", list, list(NATIVE_MODELS)))
    for model in models:
        if model not in NATIVE_MODELS:
            raise ConfigError(f"forecast.models: unknown model {model!r}; choose from {NATIVE_MODELS}")
    forecast = ForecastSettings(
        train_days=_get(fc, "forecast", "train_days", int, 730),
        tune_holdout_days=_get(fc, "forecast", "tune_holdout_days", int, 180),
        models=models,
        smoothing_grid=tuple(_get(fc, "forecast", "smoothing_grid", list, None)),
        seasonal_period_days=_get(fc, "forecast", "seasonal_period_days", int, 365),
    )

    pol = merged("policy")
    initial_raw = pol.get("initial_stock", "auto")
    if initial_raw == "auto":
        initial_stock = None
    elif isinstance(initial_raw, int) and not isinstance(initial_raw, bool):
        initial_stock = initial_raw
    else:
        raise ConfigError('policy.initial_stock: expected "auto" or an integer')
    policy = PolicyParams(
        review_period_days=_get(pol, "policy", "review_period_days", int, 7),
        lead_time_days=_get(pol, "policy", "lead_time_days", int, 14),
        rush_lead_days=_get(pol, "policy", "rush_lead_days", int, 2),
        service_z=_get(pol, "policy", "service_z", float, 1.645),
        initial_stock=initial_stock,
    )

    cost = merged("costs")
    costs = CostParams(
        holding_per_unit_day=_get(cost, "costs", "holding_per_unit_day", float, 0.1),
        order_fixed=_get(cost, "costs", "order_fixed", float, 50.0),
        rush_order_fixed_premium=_get(cost, "costs", "rush_order_fixed_premium", float, 200.0),
        transport_per_unit=_get(cost, "costs", "transport_per_unit", float, 5.0),
        badwill_per_unit=_get(cost, "costs", "badwill_per_unit", float, 500.0),
    )

    cfg = RunConfig(
        master_seed=master_seed,
        start_date=start_date,
        horizon_days=_get(gen, "generator", "horizon_days", int, 1095),
        step_days=_get(gen, "generator", "step_days", int, 1),
        n_dealers=_get(gen, "generator", "n_dealers", int, 4),
        parts_range=_pair(gen, "generator", "parts_per_truck_range", None, numeric=int),
        hard_multiplier=_get(gen, "generator", "hard_usage_multiplier", float, 1.5),
        hard_probability=_get(gen, "generator", "hard_usage_probability", float, 0.5),
        shape_ranges=shape_ranges,
        label_pool=labels,
        drift_modes=drift_modes,
        trucks_ranges=trucks_ranges,
        median_ranges=median_ranges,
        slow_period_days=_get(drift, "drift", "slow_period_days", int, 7),
        sudden_alpha_range=_pair(drift, "drift", "sudden_alpha_range", None),
        seasonal=seasonal,
        forecast=forecast,
        policy=policy,
        costs=costs,
    )
    if cfg.forecast.train_days >= cfg.horizon_days:
        raise ConfigError(
            f"forecast.train_days ({cfg.forecast.train_days}) must be smaller than "
            f"generator.horizon_days ({cfg.horizon_days})"
        )
    # validates generator-level invariants (ranges, drift, catalog floor)
    cfg.generator_config_for(cfg.scenario_specs()[0]).validate()
    return cfg


def load_config(path: str | Path | None) -> RunConfig:
    """Load a TOML config file; None loads the built-in defaults."""
    if path is None:
        return parse_config({})
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = tomllib.loads(p.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{p}: invalid TOML: {exc}") from exc
    return parse_config(data)


def config_hash(cfg: RunConfig) -> str:
    """Stable fingerprint of the resolved configuration."""

    def encode(obj):
        if dataclasses.is_dataclass(obj):
            return {f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        if isinstance(obj, dict):
            return {str(k): encode(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
        if isinstance(obj, (list, tuple)):
            return [encode(v) for v in obj]
        if isinstance(obj, dt.date):
            return obj.isoformat()
        return obj

    blob = json.dumps(encode(cfg), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
