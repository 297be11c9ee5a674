"""Batch pipeline: generate -> forecast -> simulate -> analyze.

Each stage reads and writes files in one output tree, so the stages can
be run individually or chained by ``run-all`` with identical results:

    out/
      manifest.json
      scenarios/<scenario_id>/demand_series.csv
      scenarios/<scenario_id>/demand_events.jsonl
      scenarios/<scenario_id>/forecast.csv
      scenarios/<scenario_id>/residual_sigma.csv
      metrics.csv  kpi.csv
      summary.csv  summary.txt  regressions.csv  simpson.json
      plotdata/*.csv  figures/*.png

Scenarios fan out across processes with ``jobs`` workers; every
scenario derives its own seed from (master seed, scenario id), and
merged outputs are sorted, so parallelism cannot change any result.
"""

from __future__ import annotations

import datetime as dt
import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, demand, metrics, storage
from .config import RunConfig, config_hash
from .errors import ConfigError, InvalidInputError
from .forecasting import (
    NATIVE_MODELS,
    ForecastIndex,
    ForecastSeries,
    SmoothingParams,
    forecast_flat,
    ingest_external,
    insample_onestep,
    tune_smoothing,
)
from .inventory import compute_policy, residual_sigma_from, run_des

TOOL_VERSION = "0.1.0"


def scenario_dir(out_dir: Path, sid: str) -> Path:
    return Path(out_dir) / "scenarios" / sid


def _discover_scenarios(out_dir: Path, required: str) -> list[str]:
    root = Path(out_dir) / "scenarios"
    if not root.is_dir():
        raise InvalidInputError(f"no scenarios directory under {out_dir}; run `generate` first")
    sids = sorted(p.name for p in root.iterdir() if (p / required).is_file())
    if not sids:
        raise InvalidInputError(f"no scenario with {required} under {root}")
    return sids


def _fan_out(fn, tasks, jobs: int | None):
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _update_manifest(out_dir: Path, cfg: RunConfig, stage: str, outputs: list[str]) -> None:
    path = Path(out_dir) / "manifest.json"
    manifest = storage.read_manifest(path)
    manifest["config_hash"] = config_hash(cfg)
    manifest["master_seed"] = cfg.master_seed
    manifest["tool_version"] = TOOL_VERSION
    manifest.setdefault("stages", {})[stage] = {
        "completed_at": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        "outputs": sorted(outputs),
    }
    storage.write_manifest(path, manifest)


# ---------------------------------------------------------------- generate


def _generate_scenario(task) -> str:
    cfg, spec, out_str = task
    gen_cfg = cfg.generator_config_for(spec)
    events, series = demand.run(gen_cfg)
    sdir = scenario_dir(Path(out_str), spec.scenario_id)
    storage.write_demand_series(sdir / "demand_series.csv", series)
    storage.write_events_jsonl(sdir / "demand_events.jsonl", events)
    return spec.scenario_id


def cmd_generate(cfg: RunConfig, out_dir: Path, jobs: int | None = 1) -> list[str]:
    """Run every scenario of the grid and persist demand outputs."""
    specs = cfg.scenario_specs()
    tasks = [(cfg, spec, str(out_dir)) for spec in specs]
    sids = _fan_out(_generate_scenario, tasks, jobs)
    _update_manifest(
        out_dir, cfg, "generate", [f"scenarios/{sid}/demand_series.csv" for sid in sids]
    )
    return sids


# ---------------------------------------------------------------- forecast


def _split_lengths(cfg: RunConfig, horizon: int) -> tuple[int, int]:
    train = cfg.forecast.train_days
    if horizon <= train:
        raise ConfigError(
            f"series horizon {horizon} does not exceed forecast.train_days {train}"
        )
    return train, horizon - train


def _external_file(external: str | None, sid: str) -> Path | None:
    if external is None:
        return None
    p = Path(external)
    if p.is_dir():
        candidate = p / f"{sid}.csv"
        return candidate if candidate.is_file() else None
    return p


def _forecast_scenario(task):
    cfg, sid, out_str, models, external = task
    sdir = scenario_dir(Path(out_str), sid)
    series = storage.read_demand_series(sdir / "demand_series.csv")
    if not series:
        raise InvalidInputError(f"{sid}: demand_series.csv holds no series")
    train_days, test_days = _split_lengths(cfg, len(series[0].daily_counts))
    test_start = series[0].start_date + dt.timedelta(days=train_days)
    grid = cfg.forecast.smoothing_grid

    forecasts: list[ForecastSeries] = []
    sigma_rows: list[tuple[str, str, str, float]] = []
    for model in models:
        for s in series:
            train = s.daily_counts[:train_days].astype(np.float64)
            if model == "seasonal_naive":
                period = min(cfg.forecast.seasonal_period_days, train_days)
                params = SmoothingParams()
                values = forecast_flat(model, train, params, test_days, period=period)
                insample = insample_onestep(model, train, params, period=period)
            else:
                params = tune_smoothing(
                    model, train, grid, grid, holdout_days=cfg.forecast.tune_holdout_days
                )
                values = forecast_flat(model, train, params, test_days)
                insample = insample_onestep(model, train, params)
            forecasts.append(
                ForecastSeries(
                    dealer_id=s.dealer_id,
                    part_type=s.part_type,
                    start_date=test_start,
                    daily_values=values,
                    model_name=model,
                )
            )
            sigma_rows.append((model, s.dealer_id, s.part_type, residual_sigma_from(train, insample)))

    ext_file = _external_file(external, sid)
    if ext_file is not None:
        expected = ForecastIndex(
            keys=frozenset((s.dealer_id, s.part_type) for s in series),
            dates=tuple(test_start + dt.timedelta(days=i) for i in range(test_days)),
        )
        for f in ingest_external(ext_file, expected):
            if f.model_name in models:
                raise InvalidInputError(
                    f"{ext_file}: external model name {f.model_name!r} clashes with a native model"
                )
            forecasts.append(f)
            # no in-sample trace is available for external models; a flat
            # stand-in keeps the sigma channel defined
            key = (f.dealer_id, f.part_type)
            s = next(x for x in series if (x.dealer_id, x.part_type) == key)
            train = s.daily_counts[:train_days].astype(np.float64)
            stand_in = np.full(train_days, float(f.daily_values.mean()))
            sigma_rows.append(
                (f.model_name, f.dealer_id, f.part_type, residual_sigma_from(train, stand_in))
            )

    forecasts.sort(key=lambda f: (f.model_name, f.dealer_id, f.part_type))
    sigma_rows.sort()
    storage.write_forecast_csv(sdir / "forecast.csv", forecasts)
    storage.write_sigma_csv(sdir / "residual_sigma.csv", sigma_rows)

    by_key = {(s.dealer_id, s.part_type): s for s in series}
    metric_rows = []
    for f in forecasts:
        s = by_key[(f.dealer_id, f.part_type)]
        actual = s.daily_counts[train_days:].astype(np.float64)
        acc = metrics.accuracy_report(actual, f.daily_values)
        pattern = metrics.pattern_report(s.daily_counts)
        metric_rows.append(
            (
                sid,
                f.model_name,
                f.dealer_id,
                f.part_type,
                acc.mae,
                acc.rmse,
                acc.r2,
                acc.iae,
                pattern.adi,
                pattern.cv2,
                pattern.pattern,
            )
        )
    return metric_rows


def cmd_forecast(
    cfg: RunConfig,
    out_dir: Path,
    models: list[str] | None = None,
    external: str | None = None,
    jobs: int | None = 1,
) -> None:
    """Fit the requested native models per series and write forecasts.

    Also validates/merges external forecast files and emits the
    accuracy + pattern metrics table for every model, native or not.
    """
    chosen = sorted(set(models)) if models else sorted(cfg.forecast.models)
    unknown = [m for m in chosen if m not in NATIVE_MODELS]
    if unknown:
        raise InvalidInputError(f"unknown model name(s) {unknown}; native models are {NATIVE_MODELS}")
    sids = _discover_scenarios(out_dir, "demand_series.csv")
    tasks = [(cfg, sid, str(out_dir), chosen, external) for sid in sids]
    results = _fan_out(_forecast_scenario, tasks, jobs)
    rows = sorted(row for chunk in results for row in chunk)
    storage.write_csv(Path(out_dir) / "metrics.csv", storage.METRICS_COLUMNS, rows)
    _update_manifest(
        out_dir,
        cfg,
        "forecast",
        ["metrics.csv", *(f"scenarios/{sid}/forecast.csv" for sid in sids)],
    )


# ---------------------------------------------------------------- simulate


def _simulate_scenario(task):
    cfg, sid, out_str = task
    sdir = scenario_dir(Path(out_str), sid)
    series = storage.read_demand_series(sdir / "demand_series.csv")
    forecasts = storage.read_forecast_csv(sdir / "forecast.csv")
    sigma_path = sdir / "residual_sigma.csv"
    sigmas = storage.read_sigma_csv(sigma_path) if sigma_path.is_file() else {}
    if not series:
        raise InvalidInputError(f"{sid}: demand_series.csv holds no series")
    train_days, test_days = _split_lengths(cfg, len(series[0].daily_counts))
    by_key = {(s.dealer_id, s.part_type): s for s in series}

    rows = []
    for f in sorted(forecasts, key=lambda f: (f.model_name, f.dealer_id, f.part_type)):
        key = (f.dealer_id, f.part_type)
        if key not in by_key:
            raise InvalidInputError(f"{sid}: forecast for unknown series {key}")
        s = by_key[key]
        actual = s.daily_counts[train_days:]
        sigma = sigmas.get((f.model_name, f.dealer_id, f.part_type))
        if sigma is None:
            train = s.daily_counts[:train_days].astype(np.float64)
            sigma = residual_sigma_from(train, np.full(train_days, float(f.daily_values.mean())))
        levels = compute_policy(f.daily_values, sigma, cfg.policy)
        kpi = run_des(actual, f.daily_values, levels, cfg.policy, cfg.costs)
        rows.append(
            (
                sid,
                f.model_name,
                f.dealer_id,
                f.part_type,
                kpi.total_cost,
                kpi.holding_cost,
                kpi.order_cost,
                kpi.rush_cost,
                kpi.transport_cost,
                kpi.badwill_cost,
                kpi.service_level,
                kpi.order_count,
                kpi.rush_order_count,
            )
        )
    return rows


def cmd_simulate(cfg: RunConfig, out_dir: Path, jobs: int | None = 1) -> None:
    """Run the inventory cost simulation per (scenario, model, series)."""
    sids = _discover_scenarios(out_dir, "forecast.csv")
    tasks = [(cfg, sid, str(out_dir)) for sid in sids]
    results = _fan_out(_simulate_scenario, tasks, jobs)
    rows = sorted(row for chunk in results for row in chunk)
    storage.write_csv(Path(out_dir) / "kpi.csv", storage.KPI_COLUMNS, rows)
    _update_manifest(out_dir, cfg, "simulate", ["kpi.csv"])


# ----------------------------------------------------------------- analyze


def _parse_metric_rows(out_dir: Path) -> list[dict]:
    rows = []
    for raw in storage.read_csv_dicts(Path(out_dir) / "metrics.csv"):
        rows.append(
            {
                "scenario_id": raw["scenario_id"],
                "model_name": raw["model_name"],
                "dealer_id": raw["dealer_id"],
                "part_type": raw["part_type"],
                "mae": float(raw["mae"]),
                "rmse": float(raw["rmse"]),
                "r2": float(raw["r2"]) if raw["r2"] != "" else None,
                "iae": float(raw["iae"]),
                "adi": float(raw["adi"]) if raw["adi"] != "" else None,
                "cv2": float(raw["cv2"]),
                "class": raw["class"] or None,
            }
        )
    return rows


def _parse_kpi_rows(out_dir: Path) -> list[dict]:
    rows = []
    for raw in storage.read_csv_dicts(Path(out_dir) / "kpi.csv"):
        parsed = dict(raw)
        for col in (
            "total_cost",
            "holding_cost",
            "order_cost",
            "rush_cost",
            "transport_cost",
            "badwill_cost",
            "service_level",
        ):
            parsed[col] = float(raw[col])
        rows.append(parsed)
    return rows


def _scenario_points(
    metric_rows: list[dict], kpi_rows: list[dict], metric: str, per_series: bool
) -> dict[str, list[tuple[str, float, float]]]:
    """(label, metric, cost) point clouds per scenario.

    Default: one point per model = (mean metric, mean total cost) within
    the scenario. ``per_series`` switches to one point per series, in
    which case the label also carries the series key.
    """
    cost_by_key = {
        (r["scenario_id"], r["model_name"], r["dealer_id"], r["part_type"]): r["total_cost"]
        for r in kpi_rows
    }
    points: dict[str, list[tuple[str, float, float]]] = {}
    if per_series:
        for r in metric_rows:
            if r[metric] is None:
                continue
            key = (r["scenario_id"], r["model_name"], r["dealer_id"], r["part_type"])
            label = f"{r['model_name']}/{r['dealer_id']}/{r['part_type']}"
            points.setdefault(r["scenario_id"], []).append((label, r[metric], cost_by_key[key]))
        return points

    grouped: dict[tuple[str, str], list[tuple[float | None, float]]] = {}
    for r in metric_rows:
        key = (r["scenario_id"], r["model_name"], r["dealer_id"], r["part_type"])
        grouped.setdefault((r["scenario_id"], r["model_name"]), []).append(
            (r[metric], cost_by_key[key])
        )
    for (sid, model), pairs in sorted(grouped.items()):
        values = [m for m, _ in pairs if m is not None]
        if not values:
            continue
        mean_metric = float(np.mean(values))
        mean_cost = float(np.mean([c for _, c in pairs]))
        points.setdefault(sid, []).append((model, mean_metric, mean_cost))
    return points


def cmd_analyze(cfg: RunConfig, out_dir: Path, per_series_points: bool = False) -> None:
    """Summary tables, per-scenario regressions, reversal diagnostics,
    plot-ready CSVs, and rendered figures."""
    out = Path(out_dir)
    metric_rows = _parse_metric_rows(out)
    kpi_rows = _parse_kpi_rows(out)

    summaries = analysis.summarize(metric_rows, kpi_rows)
    storage.write_csv(
        out / "summary.csv",
        (
            "model_name",
            "mae_mean",
            "mae_std",
            "rmse_mean",
            "rmse_std",
            "r2_mean",
            "r2_std",
            "r2_missing",
            "iae_mean",
            "iae_std",
            "total_cost",
            "n_series",
        ),
        [
            (
                s.model_name,
                s.metric_mean["mae"],
                s.metric_std["mae"],
                s.metric_mean["rmse"],
                s.metric_std["rmse"],
                s.metric_mean["r2"],
                s.metric_std["r2"],
                s.r2_missing,
                s.metric_mean["iae"],
                s.metric_std["iae"],
                s.total_cost,
                s.n_series,
            )
            for s in summaries
        ],
    )
    (out / "summary.txt").write_text(analysis.summary_table(summaries), encoding="utf-8")

    regression_rows = []
    simpson: dict[str, dict] = {}
    for metric in analysis.ACCURACY_METRICS:
        labelled = _scenario_points(metric_rows, kpi_rows, metric, per_series_points)
        points = {sid: [(x, y) for _, x, y in pts] for sid, pts in labelled.items()}
        for sid in sorted(points):
            try:
                fit = analysis.linear_fit(points[sid])
            except InvalidInputError:
                continue
            regression_rows.append(
                (metric, sid, fit.slope, fit.intercept, fit.pearson_r, fit.n_points)
            )
        if len(points) >= 2:
            try:
                s = analysis.simpson_summary(points)
            except InvalidInputError as exc:
                simpson[metric] = {"note": str(exc)}
                continue
            simpson[metric] = {
                "mean_within_slope": s.mean_within_slope,
                "pooled_slope": s.pooled_slope,
                "mean_within_r": s.mean_within_r,
                "pooled_r": s.pooled_r,
                "paradox": s.paradox,
                "n_scenarios": s.n_scenarios,
                "n_skipped": s.n_skipped,
            }
        else:
            simpson[metric] = {"note": "needs at least 2 scenarios"}
    storage.write_csv(
        out / "regressions.csv",
        ("metric", "scenario_id", "slope", "intercept", "pearson_r", "n_points"),
        regression_rows,
    )
    (out / "simpson.json").write_text(
        json.dumps(simpson, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    # plot-ready data: one ADI/CV2 row per series, and per-metric cost clouds
    seen = set()
    adi_rows = []
    for r in metric_rows:
        key = (r["scenario_id"], r["dealer_id"], r["part_type"])
        if key in seen:
            continue
        seen.add(key)
        adi_rows.append((*key, r["adi"], r["cv2"], r["class"]))
    storage.write_csv(
        out / "plotdata" / "adi_cv2.csv",
        ("scenario_id", "dealer_id", "part_type", "adi", "cv2", "class"),
        sorted(adi_rows),
    )
    cost_files = []
    for metric in analysis.ACCURACY_METRICS:
        labelled = _scenario_points(metric_rows, kpi_rows, metric, per_series=False)
        rows = [
            (sid, model, x, y)
            for sid in sorted(labelled)
            for model, x, y in labelled[sid]
        ]
        path = out / "plotdata" / f"cost_vs_{metric}.csv"
        storage.write_csv(
            path, ("scenario_id", "model_name", "metric_value", "mean_total_cost"), rows
        )
        cost_files.append(path.name)

    from . import plots  # deferred: matplotlib import is slow

    plots.render_analysis(out)
    _update_manifest(
        out,
        cfg,
        "analyze",
        [
            "summary.csv",
            "summary.txt",
            "regressions.csv",
            "simpson.json",
            "plotdata/adi_cv2.csv",
            *(f"plotdata/{name}" for name in cost_files),
        ],
    )


def cmd_run_all(
    cfg: RunConfig,
    out_dir: Path,
    models: list[str] | None = None,
    external: str | None = None,
    jobs: int | None = 1,
    per_series_points: bool = False,
) -> None:
    """The four stages in sequence over one output tree."""
    cmd_generate(cfg, out_dir, jobs=jobs)
    cmd_forecast(cfg, out_dir, models=models, external=external, jobs=jobs)
    cmd_simulate(cfg, out_dir, jobs=jobs)
    cmd_analyze(cfg, out_dir, per_series_points=per_series_points)
