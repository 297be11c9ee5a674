"""Readers and writers for the pipeline's delimited files.

All CSVs are written with "\n" line endings and full-precision float
repr so that identical inputs produce byte-identical files, and so
float values survive a write/read round trip exactly.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from pathlib import Path

import numpy as np

from .demand import DemandEvent, DemandSeries
from .errors import IngestionError
from .forecasting import FORECAST_COLUMNS, ForecastSeries

DEMAND_COLUMNS = ("date", "dealer_id", "part_type", "count")
SIGMA_COLUMNS = ("model_name", "dealer_id", "part_type", "sigma")
METRICS_COLUMNS = (
    "scenario_id",
    "model_name",
    "dealer_id",
    "part_type",
    "mae",
    "rmse",
    "r2",
    "iae",
    "adi",
    "cv2",
    "class",
)
KPI_COLUMNS = (
    "scenario_id",
    "model_name",
    "dealer_id",
    "part_type",
    "total_cost",
    "holding_cost",
    "order_cost",
    "rush_cost",
    "transport_cost",
    "badwill_cost",
    "service_level",
    "order_count",
    "rush_order_count",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, dt.date):
        return value.isoformat()
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def read_csv_dicts(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_demand_series(path: Path, series: list[DemandSeries]) -> None:
    """Dense per-day rows, grouped by (dealer, part type)."""

    def rows():
        for s in series:
            for day, count in enumerate(s.daily_counts):
                date = s.start_date + dt.timedelta(days=day)
                yield (date, s.dealer_id, s.part_type, int(count))

    write_csv(path, DEMAND_COLUMNS, rows())


def read_demand_series(path: Path) -> list[DemandSeries]:
    """Rebuild series from a dense demand CSV, preserving file order."""
    groups: dict[tuple[str, str], list[tuple[str, int]]] = {}
    for row in read_csv_dicts(path):
        key = (row["dealer_id"], row["part_type"])
        groups.setdefault(key, []).append((row["date"], int(row["count"])))
    out = []
    for (dealer_id, part_type), entries in groups.items():
        dates = [dt.date.fromisoformat(d) for d, _ in entries]
        counts = np.array([c for _, c in entries], dtype=np.int64)
        start = dates[0]
        expected = [start + dt.timedelta(days=i) for i in range(len(dates))]
        if dates != expected:
            raise IngestionError(f"{path}: ({dealer_id}, {part_type}) has gaps or unordered dates")
        out.append(
            DemandSeries(
                dealer_id=dealer_id, part_type=part_type, start_date=start, daily_counts=counts
            )
        )
    return out


def write_events_jsonl(path: Path, events: list[DemandEvent]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for e in events:
            fh.write(
                json.dumps(
                    {
                        "time": e.time.isoformat(),
                        "dealer_id": e.dealer_id,
                        "truck_id": e.truck_id,
                        "part_id": e.part_id,
                        "part_type": e.part_type,
                    }
                )
                + "\n"
            )


def write_forecast_csv(path: Path, forecasts: list[ForecastSeries]) -> None:
    def rows():
        for f in forecasts:
            for day, value in enumerate(f.daily_values):
                date = f.start_date + dt.timedelta(days=day)
                yield (f.model_name, f.dealer_id, f.part_type, date, float(value))

    write_csv(path, FORECAST_COLUMNS, rows())


def read_forecast_csv(path: Path) -> list[ForecastSeries]:
    groups: dict[tuple[str, str, str], list[tuple[str, float]]] = {}
    for row in read_csv_dicts(path):
        key = (row["model_name"], row["dealer_id"], row["part_type"])
        groups.setdefault(key, []).append((row["date"], float(row["value"])))
    out = []
    for (model, dealer_id, part_type), entries in groups.items():
        out.append(
            ForecastSeries(
                dealer_id=dealer_id,
                part_type=part_type,
                start_date=dt.date.fromisoformat(entries[0][0]),
                daily_values=np.array([v for _, v in entries]),
                model_name=model,
            )
        )
    return out


def write_sigma_csv(path: Path, rows: list[tuple[str, str, str, float]]) -> None:
    write_csv(path, SIGMA_COLUMNS, rows)


def read_sigma_csv(path: Path) -> dict[tuple[str, str, str], float]:
    return {
        (row["model_name"], row["dealer_id"], row["part_type"]): float(row["sigma"])
        for row in read_csv_dicts(path)
    }


def write_manifest(path: Path, manifest: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_manifest(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
