"""Daily demand forecasters for intermittent series, plus external ingestion.

The native methods are rate estimators and emit a flat daily value
across the requested horizon:

* croston - smooths nonzero demand sizes and inter-demand intervals
  separately, updating only at demand epochs; forecast is size/interval.
* sba - croston scaled by (1 - alpha/2) to correct its bias.
* tsb - smooths the demand probability every period (decaying it over
  zero periods) and sizes at demand epochs; forecast is prob * size.
* ses - simple exponential smoothing of the raw daily series.
* seasonal_naive - repeats the last full cycle of the history.

Croston-family initialisation is anchored at the first demand epoch:
sizes start at the first nonzero demand and intervals at the first
inter-demand gap (falling back to the distance from the series start
when only one demand exists), so leading zeros do not move forecasts
once two demand epochs exist.

Externally produced forecasts (ML models, ARIMA, ...) enter through
``ingest_external``, which validates a forecast CSV against the
expected (dealer, part type) keys and horizon dates.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .errors import IngestionError, InvalidInputError

NATIVE_MODELS = ("croston", "sba", "tsb", "ses", "seasonal_naive")

FORECAST_COLUMNS = ("model_name", "dealer_id", "part_type", "date", "value")

#: default tuning grid for the smoothing constants
DEFAULT_GRID = tuple(i / 100 for i in range(5, 51, 5))


@dataclass(frozen=True)
class SmoothingParams:
    alpha: float = 0.1
    beta: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise InvalidInputError(f"alpha must be in (0, 1], got {self.alpha!r}")
        if not 0.0 < self.beta <= 1.0:
            raise InvalidInputError(f"beta must be in (0, 1], got {self.beta!r}")


@dataclass
class ForecastSeries:
    dealer_id: str
    part_type: str
    start_date: dt.date
    daily_values: np.ndarray
    model_name: str


def _check_history(history) -> np.ndarray:
    y = np.asarray(history, dtype=np.float64)
    if y.ndim != 1 or y.size == 0:
        raise InvalidInputError("history must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(y)) or np.any(y < 0):
        raise InvalidInputError("history values must be finite and >= 0")
    return y


def _croston_state(y: np.ndarray, alpha: float) -> tuple[float, float] | None:
    """Final (size, interval) state, or None for an all-zero history."""
    idx = np.flatnonzero(y > 0)
    if idx.size == 0:
        return None
    z = float(y[idx[0]])
    if idx.size == 1:
        return z, float(idx[0] + 1)
    gaps = np.diff(idx)
    p = float(gaps[0])
    for j in range(1, idx.size):
        z = alpha * float(y[idx[j]]) + (1.0 - alpha) * z
        p = alpha * float(gaps[j - 1]) + (1.0 - alpha) * p
    return z, p


def croston_level(history, params: SmoothingParams) -> float:
    """Flat per-day forecast from Croston's size/interval recursion."""
    y = _check_history(history)
    state = _croston_state(y, params.alpha)
    if state is None:
        return 0.0
    z, p = state
    return z / p


def croston(history, params: SmoothingParams, horizon: int) -> np.ndarray:
    return np.full(horizon, croston_level(history, params))


def sba_level(history, params: SmoothingParams) -> float:
    return croston_level(history, params) * (1.0 - params.alpha / 2.0)


def sba(history, params: SmoothingParams, horizon: int) -> np.ndarray:
    return np.full(horizon, sba_level(history, params))


def tsb_level(history, params: SmoothingParams) -> float:
    """Flat per-day forecast: smoothed demand probability times size.

    The probability update runs every period from the first demand epoch
    onward; zero periods between epochs are applied as a geometric decay.
    """
    y = _check_history(history)
    alpha, beta = params.alpha, params.beta
    idx = np.flatnonzero(y > 0)
    if idx.size == 0:
        return 0.0
    first = int(idx[0])
    p = idx.size / (y.size - first)
    z = float(y[idx].mean())
    prev = None
    for i in idx:
        if prev is not None:
            p *= (1.0 - beta) ** (int(i) - prev - 1)
        p = beta + (1.0 - beta) * p
        z = alpha * float(y[i]) + (1.0 - alpha) * z
        prev = int(i)
    p *= (1.0 - beta) ** (y.size - 1 - prev)
    return p * z


def tsb(history, params: SmoothingParams, horizon: int) -> np.ndarray:
    return np.full(horizon, tsb_level(history, params))


def ses_level(history, params: SmoothingParams) -> float:
    """Final level of the standard recursion l <- alpha*y + (1-alpha)*l.

    The level starts at the first observation, so every period after the
    first contributes one update (zeros included).
    """
    y = _check_history(history)
    alpha = params.alpha
    n = y.size
    if n == 1:
        return float(y[0])
    powers = (1.0 - alpha) ** np.arange(n - 2, -1, -1, dtype=np.float64)
    return alpha * float(np.dot(powers, y[1:])) + (1.0 - alpha) ** (n - 1) * float(y[0])


def ses(history, params: SmoothingParams, horizon: int) -> np.ndarray:
    return np.full(horizon, ses_level(history, params))


def seasonal_naive(history, period: int, horizon: int) -> np.ndarray:
    """Repeat the last ``period`` days of history across the horizon."""
    y = _check_history(history)
    if period < 1:
        raise InvalidInputError(f"period must be >= 1, got {period!r}")
    if y.size < period:
        raise InvalidInputError(f"history of length {y.size} is shorter than period {period}")
    cycle = y[-period:]
    return cycle[np.arange(horizon) % period]


def forecast_flat(method: str, history, params: SmoothingParams, horizon: int, period: int = 365) -> np.ndarray:
    """Dispatch to a native method by name."""
    if method == "croston":
        return croston(history, params, horizon)
    if method == "sba":
        return sba(history, params, horizon)
    if method == "tsb":
        return tsb(history, params, horizon)
    if method == "ses":
        return ses(history, params, horizon)
    if method == "seasonal_naive":
        return seasonal_naive(history, period, horizon)
    raise InvalidInputError(f"unknown model {method!r}; native models are {NATIVE_MODELS}")


def insample_onestep(method: str, history, params: SmoothingParams, period: int = 365) -> np.ndarray:
    """One-step-ahead in-sample predictions, used for residual estimates.

    pred[t] is the forecast for day t given data through day t-1. Before
    the first demand the croston-family prediction is 0; between the
    first and second demand epochs the interval estimate is provisional
    (distance from the series start). The first seasonal_naive cycle
    echoes the history (zero residual).
    """
    y = _check_history(history)
    n = y.size
    preds = np.zeros(n)
    if method in ("croston", "sba"):
        alpha = params.alpha
        z = p = 0.0
        epochs = 0
        last = -1
        current = 0.0
        for t in range(n):
            preds[t] = current
            if y[t] > 0:
                if epochs == 0:
                    z, p = float(y[t]), float(t + 1)
                elif epochs == 1:
                    gap = float(t - last)
                    p = gap  # real interval replaces the provisional one
                    z = alpha * float(y[t]) + (1.0 - alpha) * z
                    p = alpha * gap + (1.0 - alpha) * p
                else:
                    gap = float(t - last)
                    z = alpha * float(y[t]) + (1.0 - alpha) * z
                    p = alpha * gap + (1.0 - alpha) * p
                epochs += 1
                last = t
                current = z / p
        if method == "sba":
            preds *= 1.0 - alpha / 2.0
        return preds
    if method == "tsb":
        alpha, beta = params.alpha, params.beta
        idx = np.flatnonzero(y > 0)
        if idx.size == 0:
            return preds
        first = int(idx[0])
        p = idx.size / (n - first)
        z = float(y[idx].mean())
        for t in range(first, n):
            preds[t] = p * z
            if y[t] > 0:
                p = beta + (1.0 - beta) * p
                z = alpha * float(y[t]) + (1.0 - alpha) * z
            else:
                p = (1.0 - beta) * p
        return preds
    if method == "ses":
        alpha = params.alpha
        level = float(y[0])
        preds[0] = level
        for t in range(1, n):
            preds[t] = level
            level = alpha * float(y[t]) + (1.0 - alpha) * level
        return preds
    if method == "seasonal_naive":
        if n < period:
            raise InvalidInputError(f"history of length {n} is shorter than period {period}")
        preds[:period] = y[:period]
        preds[period:] = y[: n - period]
        return preds
    raise InvalidInputError(f"unknown model {method!r}; native models are {NATIVE_MODELS}")


def tune_smoothing(
    method: str,
    history,
    alpha_grid=DEFAULT_GRID,
    beta_grid=DEFAULT_GRID,
    holdout_days: int = 180,
) -> SmoothingParams:
    """Grid-search the smoothing constants against a training holdout.

    The model is fit on the history minus its last ``holdout_days`` and
    scored by MAE of its flat forecast over the holdout. Ties keep the
    earliest grid entry; histories too short to split keep the defaults.
    """
    y = _check_history(history)
    w = min(holdout_days, y.size - 1)
    if w < 1:
        return SmoothingParams()
    fit, target = y[:-w], y[-w:]
    if method == "tsb":
        candidates = [SmoothingParams(a, b) for a in alpha_grid for b in beta_grid]
    else:
        candidates = [SmoothingParams(a) for a in alpha_grid]
    level_fn = {"croston": croston_level, "sba": sba_level, "tsb": tsb_level, "ses": ses_level}
    if method not in level_fn:
        raise InvalidInputError(f"no tunable smoothing for model {method!r}")
    best, best_mae = None, math.inf
    for params in candidates:
        level = level_fn[method](fit, params)
        mae = float(np.mean(np.abs(target - level)))
        if mae < best_mae:
            best, best_mae = params, mae
    return best


@dataclass(frozen=True)
class ForecastIndex:
    """Expected contents of an external forecast file for one run."""

    keys: frozenset[tuple[str, str]]  # (dealer_id, part_type)
    dates: tuple[dt.date, ...]  # exact horizon, in order


def ingest_external(path, expected: ForecastIndex) -> list[ForecastSeries]:
    """Parse and validate an external forecast CSV.

    The file must carry the documented columns, cover every expected
    (dealer_id, part_type) key for each model it names, and provide one
    finite value >= 0 per horizon date. Violations raise IngestionError
    naming the offending row or keys.
    """
    collected: dict[tuple[str, str, str], dict[dt.date, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != FORECAST_COLUMNS:
            raise IngestionError(
                f"{path}: expected header {','.join(FORECAST_COLUMNS)}, got {header!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(FORECAST_COLUMNS):
                raise IngestionError(f"{path}:{lineno}: expected {len(FORECAST_COLUMNS)} columns")
            model, dealer, part_type, date_s, value_s = row
            try:
                date = dt.date.fromisoformat(date_s)
            except ValueError as exc:
                raise IngestionError(f"{path}:{lineno}: bad date {date_s!r}") from exc
            try:
                value = float(value_s)
            except ValueError as exc:
                raise IngestionError(f"{path}:{lineno}: bad value {value_s!r}") from exc
            if math.isnan(value) or not math.isfinite(value):
                raise IngestionError(f"{path}:{lineno}: value column is not finite")
            if value < 0:
                raise IngestionError(f"{path}:{lineno}: negative value {value!r}")
            collected.setdefault((model, dealer, part_type), {})[date] = value

    if not collected:
        raise IngestionError(f"{path}: no forecast rows found")

    expected_dates = list(expected.dates)
    models = sorted({model for model, _, _ in collected})
    out: list[ForecastSeries] = []
    for model in models:
        have = {(d, p) for m, d, p in collected if m == model}
        missing = sorted(expected.keys - have)
        if missing:
            raise IngestionError(f"{path}: model {model!r} is missing keys {missing}")
        extra = sorted(have - expected.keys)
        if extra:
            raise IngestionError(f"{path}: model {model!r} has unexpected keys {extra}")
        for dealer, part_type in sorted(have):
            by_date = collected[(model, dealer, part_type)]
            missing_dates = [d for d in expected_dates if d not in by_date]
            if missing_dates or len(by_date) != len(expected_dates):
                extra_dates = sorted(set(by_date) - set(expected_dates))
                raise IngestionError(
                    f"{path}: ({model}, {dealer}, {part_type}) horizon mismatch; "
                    f"missing {missing_dates[:5]} extra {extra_dates[:5]}"
                )
            values = np.array([by_date[d] for d in expected_dates])
            out.append(
                ForecastSeries(
                    dealer_id=dealer,
                    part_type=part_type,
                    start_date=expected_dates[0] if expected_dates else dt.date.min,
                    daily_values=values,
                    model_name=model,
                )
            )
    return out
