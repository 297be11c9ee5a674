"""Parametric hazard models for part lifetimes.

Four families are supported: exponential (constant hazard), Weibull,
log-logistic, and Gompertz. Each family is parameterised by a scale
``lam`` and, except for the exponential, a shape ``k``. Scales are
rates (1/day) except for the Weibull, whose scale is in days.

The per-step failure probability of a part aged ``t_p`` is

    P(fail in [t_p, t_p + dt] | survived to t_p) = 1 - exp(-m * dH)

where ``dH`` is the closed-form cumulative-hazard increment over the
step and ``m`` bundles seasonal and usage multipliers (piecewise
constant over the step).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError

LN2 = math.log(2.0)


class Family(str, Enum):
    EXPONENTIAL = "exponential"
    WEIBULL = "weibull"
    LOGLOGISTIC = "loglogistic"
    GOMPERTZ = "gompertz"


#: stable integer codes used by the vectorised kernel
FAMILY_CODES = {
    Family.EXPONENTIAL: 0,
    Family.WEIBULL: 1,
    Family.LOGLOGISTIC: 2,
    Family.GOMPERTZ: 3,
}

#: default shape-parameter ranges; chosen to give increasing or unimodal
#: hazards typical of wear-out parts
DEFAULT_SHAPE_RANGES = {
    Family.EXPONENTIAL: (1.0, 1.0),
    Family.WEIBULL: (0.8, 3.0),
    Family.LOGLOGISTIC: (1.2, 3.0),
    Family.GOMPERTZ: (0.001, 0.1),
}


def _require_finite_positive(name: str, value: float) -> None:
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidInputError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class HazardModel:
    """A parametric lifetime model: family plus (scale, shape)."""

    family: Family
    scale: float
    shape: float = 1.0

    def __post_init__(self) -> None:
        _require_finite_positive("scale", self.scale)
        _require_finite_positive("shape", self.shape)
        if self.family == Family.EXPONENTIAL and self.shape != 1.0:
            # shape is meaningless for the memoryless family
            object.__setattr__(self, "shape", 1.0)


@dataclass(frozen=True)
class MedianSpec:
    """Range of median failure times (days) and of the shape parameter."""

    t_m_range: tuple[float, float]
    shape_range: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self) -> None:
        lo, hi = self.t_m_range
        _require_finite_positive("t_m_range lower bound", lo)
        if hi < lo:
            raise InvalidInputError(f"t_m_range must satisfy lower <= upper, got {self.t_m_range}")
        s_lo, s_hi = self.shape_range
        _require_finite_positive("shape_range lower bound", s_lo)
        if s_hi < s_lo:
            raise InvalidInputError(f"shape_range must satisfy lower <= upper, got {self.shape_range}")


@dataclass(frozen=True)
class UsageModifier:
    """Hazard multiplier attached to a truck's operating conditions."""

    usage: str  # "normal" | "hard"
    hazard_multiplier: float

    def __post_init__(self) -> None:
        if self.usage == "normal" and self.hazard_multiplier != 1.0:
            raise InvalidInputError("normal usage must have multiplier 1.0")
        if self.hazard_multiplier < 1.0:
            raise InvalidInputError("hazard_multiplier must be >= 1.0")


def hazard_rate(model: HazardModel, t: float) -> float:
    """Instantaneous failure rate h(t) at age ``t`` (1/day).

    Values at t = 0 for the log-logistic and Gompertz families are the
    right-limits of their hazards.
    """
    if not math.isfinite(t) or t < 0.0:
        raise InvalidInputError(f"t must be finite and >= 0, got {t!r}")
    lam, k = model.scale, model.shape
    if model.family == Family.EXPONENTIAL:
        return lam
    if model.family == Family.WEIBULL:
        if t == 0.0:
            if k < 1.0:
                return math.inf
            return (k / lam) if k == 1.0 else 0.0
        return (k / lam) * (t / lam) ** (k - 1.0)
    if model.family == Family.LOGLOGISTIC:
        # h(t) = k*lam*(lam*t)^(k-1) / (1 + (lam*t)^k); right-limit at 0
        if t == 0.0:
            if k < 1.0:
                return math.inf
            return lam if k == 1.0 else 0.0
        x = lam * t
        return k * lam * x ** (k - 1.0) / (1.0 + x**k)
    if model.family == Family.GOMPERTZ:
        return k * lam * math.exp(lam * t)
    raise InvalidInputError(f"unknown family {model.family!r}")


def cumulative_hazard_increment(model: HazardModel, t0: float, t1: float) -> float:
    """Integral of h(u) du over [t0, t1], via the closed-form antiderivative."""
    if not (math.isfinite(t0) and math.isfinite(t1)) or t0 < 0.0:
        raise InvalidInputError(f"bounds must be finite with 0 <= t0, got ({t0!r}, {t1!r})")
    if t1 < t0:
        raise InvalidInputError(f"need t0 <= t1, got ({t0!r}, {t1!r})")
    lam, k = model.scale, model.shape
    if model.family == Family.EXPONENTIAL:
        return lam * (t1 - t0)
    if model.family == Family.WEIBULL:
        return (t1 / lam) ** k - (t0 / lam) ** k
    if model.family == Family.LOGLOGISTIC:
        return math.log1p((lam * t1) ** k) - math.log1p((lam * t0) ** k)
    if model.family == Family.GOMPERTZ:
        return k * (math.exp(lam * t1) - math.exp(lam * t0))
    raise InvalidInputError(f"unknown family {model.family!r}")


def conditional_failure_prob(
    model: HazardModel, t_p: float, dt: float, effective_multiplier: float = 1.0
) -> float:
    """Probability of failure within [t_p, t_p + dt] given survival to t_p.

    ``effective_multiplier`` scales the hazard over the step; it bundles
    the seasonal coefficient and the usage modifier.
    """
    if not math.isfinite(dt) or dt <= 0.0:
        raise InvalidInputError(f"dt must be finite and > 0, got {dt!r}")
    if not math.isfinite(effective_multiplier) or effective_multiplier < 0.0:
        raise InvalidInputError(f"multiplier must be finite and >= 0, got {effective_multiplier!r}")
    increment = cumulative_hazard_increment(model, t_p, t_p + dt)
    return -math.expm1(-effective_multiplier * increment)


def scale_from_median(family: Family, t_m: float, shape: float = 1.0) -> float:
    """Invert the family's median formula: scale such that P(T <= t_m) = 1/2.

    Log-logistic note: the cumulative hazard ln(1 + (lam*t)^k) has its
    median at exactly 1/lam for every shape, so lam = 1/t_m.
    """
    _require_finite_positive("t_m", t_m)
    _require_finite_positive("shape", shape)
    if family == Family.EXPONENTIAL:
        return LN2 / t_m
    if family == Family.WEIBULL:
        return t_m / LN2 ** (1.0 / shape)
    if family == Family.LOGLOGISTIC:
        return 1.0 / t_m
    if family == Family.GOMPERTZ:
        return math.log1p(LN2 / shape) / t_m
    raise InvalidInputError(f"unknown family {family!r}")


def draw_model(family: Family, median_spec: MedianSpec, rng: np.random.Generator) -> HazardModel:
    """Sample a model: k ~ U(shape_range) for shaped families, t_m ~ U(t_m_range)."""
    if family == Family.EXPONENTIAL:
        shape = 1.0
    else:
        s_lo, s_hi = median_spec.shape_range
        shape = float(rng.uniform(s_lo, s_hi))
    lo, hi = median_spec.t_m_range
    t_m = float(rng.uniform(lo, hi))
    return HazardModel(family=family, scale=scale_from_median(family, t_m, shape), shape=shape)


def cumulative_hazard_batch(
    codes: np.ndarray,
    scales: np.ndarray,
    shapes: np.ndarray,
    t0: np.ndarray,
    t1: np.ndarray,
) -> np.ndarray:
    """Vectorised cumulative-hazard increments for mixed-family part arrays.

    ``codes`` uses FAMILY_CODES. Semantics match
    :func:`cumulative_hazard_increment` element-wise.
    """
    out = np.empty_like(scales, dtype=np.float64)
    m = codes == 0
    if m.any():
        out[m] = scales[m] * (t1[m] - t0[m])
    m = codes == 1
    if m.any():
        out[m] = (t1[m] / scales[m]) ** shapes[m] - (t0[m] / scales[m]) ** shapes[m]
    m = codes == 2
    if m.any():
        out[m] = np.log1p((scales[m] * t1[m]) ** shapes[m]) - np.log1p(
            (scales[m] * t0[m]) ** shapes[m]
        )
    m = codes == 3
    if m.any():
        out[m] = shapes[m] * (np.exp(scales[m] * t1[m]) - np.exp(scales[m] * t0[m]))
    return out
