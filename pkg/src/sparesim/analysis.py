"""Cross-scenario aggregation linking accuracy metrics to inventory KPIs.

Builds the scenario grid, fits per-scenario and pooled regressions of
cost against each accuracy metric, flags sign flips between the mean
within-scenario slope and the pooled slope (Simpson-style reversals),
and produces per-model summary tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

ACCURACY_METRICS = ("mae", "rmse", "r2", "iae")


@dataclass(frozen=True)
class ScenarioSpec:
    scenario_id: str
    drift_mode: str
    trucks_range: tuple[int, int]
    median_range: tuple[float, float]


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    n_points: int
    pearson_r: float


class DegenerateFitError(InvalidInputError):
    """Raised when a regression has no defined slope (constant x)."""


def scenario_id(drift_mode: str, trucks_range, median_range) -> str:
    t_lo, t_hi = trucks_range
    m_lo, m_hi = median_range
    return f"{drift_mode}_t{t_lo}-{t_hi}_m{m_lo:g}-{m_hi:g}"


def build_scenario_grid(drift_modes, trucks_ranges, median_ranges) -> list[ScenarioSpec]:
    """Cartesian product of the three scenario axes, drift outermost."""
    if not drift_modes or not trucks_ranges or not median_ranges:
        raise InvalidInputError("every grid axis needs at least one entry")
    grid = []
    for drift in drift_modes:
        for trucks in trucks_ranges:
            for median in median_ranges:
                grid.append(
                    ScenarioSpec(
                        scenario_id=scenario_id(drift, trucks, median),
                        drift_mode=drift,
                        trucks_range=tuple(trucks),
                        median_range=tuple(median),
                    )
                )
    ids = [s.scenario_id for s in grid]
    if len(set(ids)) != len(ids):
        raise InvalidInputError("scenario ids are not unique; check the grid axes")
    return grid


def linear_fit(points) -> RegressionResult:
    """Ordinary least squares y = slope*x + intercept, plus Pearson r."""
    pts = list(points)
    if len(pts) < 2:
        raise InvalidInputError(f"need >= 2 points, got {len(pts)}")
    x = np.array([p[0] for p in pts], dtype=np.float64)
    y = np.array([p[1] for p in pts], dtype=np.float64)
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise DegenerateFitError("slope undefined: all x values are equal")
    sxy = float(np.sum((x - x.mean()) * (y - y.mean())))
    slope = sxy / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    syy = float(np.sum((y - y.mean()) ** 2))
    pearson = 0.0 if syy == 0.0 else sxy / math.sqrt(sxx * syy)
    return RegressionResult(slope=slope, intercept=intercept, n_points=len(pts), pearson_r=pearson)


@dataclass
class SimpsonSummary:
    mean_within_slope: float
    pooled_slope: float
    mean_within_r: float
    pooled_r: float
    paradox: bool
    n_scenarios: int
    n_skipped: int


def simpson_summary(per_scenario_points: dict[str, list[tuple[float, float]]]) -> SimpsonSummary:
    """Mean of per-scenario regression slopes versus the pooled slope.

    Scenarios whose fit is degenerate (constant x or < 2 points) are
    skipped and counted. The paradox flag is set when the two slopes
    disagree in sign.
    """
    if len(per_scenario_points) < 2:
        raise InvalidInputError("need >= 2 scenarios")
    slopes = []
    rs = []
    skipped = 0
    pooled_pts: list[tuple[float, float]] = []
    for _, pts in sorted(per_scenario_points.items()):
        pooled_pts.extend(pts)
        try:
            fit = linear_fit(pts)
        except InvalidInputError:
            skipped += 1
            continue
        slopes.append(fit.slope)
        rs.append(fit.pearson_r)
    if not slopes:
        raise DegenerateFitError("every scenario fit was degenerate")
    pooled = linear_fit(pooled_pts)
    mean_within = float(np.mean(slopes))
    paradox = (mean_within < 0.0 < pooled.slope) or (pooled.slope < 0.0 < mean_within)
    return SimpsonSummary(
        mean_within_slope=mean_within,
        pooled_slope=pooled.slope,
        mean_within_r=float(np.mean(rs)),
        pooled_r=pooled.pearson_r,
        paradox=paradox,
        n_scenarios=len(slopes),
        n_skipped=skipped,
    )


@dataclass
class ModelSummary:
    model_name: str
    metric_mean: dict[str, float | None]
    metric_std: dict[str, float | None]
    r2_missing: int
    total_cost: float
    n_series: int


def summarize(metric_rows: list[dict], kpi_rows: list[dict]) -> list[ModelSummary]:
    """Join accuracy and KPI rows per model; mean +/- std and summed cost.

    Rows join on (scenario_id, model_name, dealer_id, part_type); orphan
    keys on either side are an error. Undefined r2 cells (None) are
    excluded pairwise, with the exclusion count reported.
    """
    key = lambda r: (r["scenario_id"], r["model_name"], r["dealer_id"], r["part_type"])
    metric_by_key = {key(r): r for r in metric_rows}
    kpi_by_key = {key(r): r for r in kpi_rows}
    orphans_m = sorted(set(metric_by_key) - set(kpi_by_key))
    orphans_k = sorted(set(kpi_by_key) - set(metric_by_key))
    if orphans_m or orphans_k:
        raise InvalidInputError(
            f"join mismatch: {len(orphans_m)} metric-only keys {orphans_m[:3]}, "
            f"{len(orphans_k)} kpi-only keys {orphans_k[:3]}"
        )

    models = sorted({r["model_name"] for r in metric_rows})
    out = []
    for model in models:
        rows = [r for r in metric_rows if r["model_name"] == model]
        means: dict[str, float | None] = {}
        stds: dict[str, float | None] = {}
        r2_missing = 0
        for metric in ACCURACY_METRICS:
            values = [r[metric] for r in rows if r[metric] is not None]
            if metric == "r2":
                r2_missing = len(rows) - len(values)
            if values:
                arr = np.array(values, dtype=np.float64)
                means[metric] = float(arr.mean())
                stds[metric] = float(arr.std())
            else:
                means[metric] = None
                stds[metric] = None
        cost = sum(kpi_by_key[key(r)]["total_cost"] for r in rows)
        out.append(
            ModelSummary(
                model_name=model,
                metric_mean=means,
                metric_std=stds,
                r2_missing=r2_missing,
                total_cost=cost,
                n_series=len(rows),
            )
        )
    return out


def summary_table(summaries: list[ModelSummary]) -> str:
    """Aligned text table; the best entry per column is starred."""
    headers = ["model", *(m.upper() for m in ACCURACY_METRICS), "total_cost", "n"]
    best: dict[str, str | None] = {}
    for metric in ACCURACY_METRICS:
        defined = [s for s in summaries if s.metric_mean[metric] is not None]
        if not defined:
            best[metric] = None
        elif metric == "r2":  # higher is better
            best[metric] = max(defined, key=lambda s: s.metric_mean["r2"]).model_name
        else:
            best[metric] = min(defined, key=lambda s: s.metric_mean[metric]).model_name
    best["total_cost"] = min(summaries, key=lambda s: s.total_cost).model_name if summaries else None

    rows = [headers]
    for s in summaries:
        row = [s.model_name]
        for metric in ACCURACY_METRICS:
            mean, std = s.metric_mean[metric], s.metric_std[metric]
            if mean is None:
                cell = "n/a"
            else:
                cell = f"{mean:.4f} +/- {std:.4f}"
                if best[metric] == s.model_name:
                    cell = "*" + cell
            row.append(cell)
        cost_cell = f"{s.total_cost:.2f}"
        if best["total_cost"] == s.model_name:
            cost_cell = "*" + cost_cell
        row.append(cost_cell)
        row.append(str(s.n_series))
        rows.append(row)

    widths = [max(len(r[i]) for r in rows) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
