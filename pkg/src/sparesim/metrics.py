"""Forecast-accuracy metrics and demand-pattern characterisation.

Accuracy: MAE, RMSE, R^2 and a cumulative-trajectory error (``iae``)
suited to highly intermittent series. Pattern: average demand interval
(ADI), squared coefficient of variation of nonzero sizes (CV^2), and
the four-quadrant classification they induce.

The iae definition used here compares running totals,

    iae = sum_d |CumF(d) - CumA(d)| / sum_d max(CumA(d), 1),

so it is zero iff the cumulative trajectories coincide and stays
defined for all-zero actuals. It is a documented stand-in kept behind
this single function boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

#: conventional classification cutoffs
ADI_CUTOFF = 1.32
CV2_CUTOFF = 0.49

CLASS_SMOOTH = "smooth"
CLASS_INTERMITTENT = "intermittent"
CLASS_ERRATIC = "erratic"
CLASS_LUMPY = "lumpy"


@dataclass
class AccuracyReport:
    mae: float
    rmse: float
    r2: float | None  # None when actuals are constant (SST = 0)
    iae: float


@dataclass
class PatternReport:
    adi: float | None  # None when the series has no demand
    cv2: float
    pattern: str | None


def _check_pair(actual, forecast) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=np.float64)
    f = np.asarray(forecast, dtype=np.float64)
    if a.ndim != 1 or f.ndim != 1 or a.size == 0:
        raise InvalidInputError("actual and forecast must be non-empty 1-d sequences")
    if a.size != f.size:
        raise InvalidInputError(f"length mismatch: actual {a.size} vs forecast {f.size}")
    return a, f


def mae(actual, forecast) -> float:
    a, f = _check_pair(actual, forecast)
    return float(np.mean(np.abs(a - f)))


def rmse(actual, forecast) -> float:
    a, f = _check_pair(actual, forecast)
    return float(np.sqrt(np.mean((a - f) ** 2)))


def r2(actual, forecast) -> float | None:
    """1 - SSE/SST with SST about the actual mean; None when SST is zero."""
    a, f = _check_pair(actual, forecast)
    sst = float(np.sum((a - a.mean()) ** 2))
    if sst == 0.0:
        return None
    sse = float(np.sum((a - f) ** 2))
    return 1.0 - sse / sst


def iae(actual, forecast) -> float:
    """Normalised absolute gap between cumulative forecast and actuals."""
    a, f = _check_pair(actual, forecast)
    cum_a = np.cumsum(a)
    cum_f = np.cumsum(f)
    numer = float(np.sum(np.abs(cum_f - cum_a)))
    denom = float(np.sum(np.maximum(cum_a, 1.0)))
    return numer / denom


def accuracy_report(actual, forecast) -> AccuracyReport:
    return AccuracyReport(
        mae=mae(actual, forecast),
        rmse=rmse(actual, forecast),
        r2=r2(actual, forecast),
        iae=iae(actual, forecast),
    )


def adi(series) -> float | None:
    """Mean interval between nonzero-demand days.

    The first interval is counted from the series start inclusively, so
    demand on the first day contributes an interval of 1 and an
    every-day series has ADI exactly 1. None when no demand exists.
    """
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1 or y.size == 0:
        raise InvalidInputError("series must be a non-empty 1-d sequence")
    idx = np.flatnonzero(y > 0)
    if idx.size == 0:
        return None
    intervals = np.concatenate([[idx[0] + 1], np.diff(idx)])
    return float(intervals.mean())


def cv2(series) -> float:
    """Squared coefficient of variation of the nonzero demand sizes.

    Population variance; series with fewer than two nonzero entries
    return 0 by convention.
    """
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1 or y.size == 0:
        raise InvalidInputError("series must be a non-empty 1-d sequence")
    sizes = y[y > 0]
    if sizes.size < 2:
        return 0.0
    mean = float(sizes.mean())
    return float(sizes.var()) / (mean * mean)


def classify_pattern(adi_value: float, cv2_value: float) -> str:
    """Quadrant classification at the (1.32, 0.49) cutoffs."""
    if adi_value < 1.0 or cv2_value < 0.0:
        raise InvalidInputError(f"need adi >= 1 and cv2 >= 0, got ({adi_value}, {cv2_value})")
    if adi_value >= ADI_CUTOFF:
        return CLASS_LUMPY if cv2_value >= CV2_CUTOFF else CLASS_INTERMITTENT
    return CLASS_ERRATIC if cv2_value >= CV2_CUTOFF else CLASS_SMOOTH


def pattern_report(series) -> PatternReport:
    adi_value = adi(series)
    cv2_value = cv2(series)
    pattern = None if adi_value is None else classify_pattern(adi_value, cv2_value)
    return PatternReport(adi=adi_value, cv2=cv2_value, pattern=pattern)
