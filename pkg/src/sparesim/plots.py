"""Figure rendering for the analyze stage.

Figures are drawn from the plot-ready CSVs in ``plotdata/`` (never from
in-memory state), so anything plotted is also available as data:

* adi_cv2.png - ADI vs CV^2 scatter of every generated series with the
  classification quadrant cutoffs.
* cost_vs_<metric>.png - per-scenario clouds of (model mean metric,
  model mean cost) with per-scenario regression lines and the pooled
  fit, one file per accuracy metric.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import storage
from .analysis import ACCURACY_METRICS, linear_fit
from .errors import InvalidInputError
from .metrics import ADI_CUTOFF, CV2_CUTOFF


def render_adi_cv2(csv_path: Path, fig_path: Path) -> None:
    rows = storage.read_csv_dicts(csv_path)
    adi = np.array([float(r["adi"]) for r in rows if r["adi"] != ""])
    cv2 = np.array([float(r["cv2"]) for r in rows if r["adi"] != ""])
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter(adi, cv2, s=12, alpha=0.5, edgecolors="none")
    ax.axvline(ADI_CUTOFF, color="grey", lw=1, ls="--")
    ax.axhline(CV2_CUTOFF, color="grey", lw=1, ls="--")
    ax.set_xscale("log")
    if cv2.size and cv2.max() > 0:
        ax.set_yscale("symlog", linthresh=0.01)
    ax.set_xlabel("ADI")
    ax.set_ylabel("CV$^2$")
    ax.set_title("Demand pattern of all generated series")
    fig.tight_layout()
    fig_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)


def render_cost_vs_metric(csv_path: Path, fig_path: Path, metric: str) -> None:
    rows = storage.read_csv_dicts(csv_path)
    by_sid: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        by_sid.setdefault(r["scenario_id"], []).append(
            (float(r["metric_value"]), float(r["mean_total_cost"]))
        )
    fig, ax = plt.subplots(figsize=(7, 5))
    cmap = plt.get_cmap("tab20")
    all_pts: list[tuple[float, float]] = []
    for i, sid in enumerate(sorted(by_sid)):
        pts = by_sid[sid]
        all_pts.extend(pts)
        x = np.array([p[0] for p in pts])
        y = np.array([p[1] for p in pts])
        color = cmap(i % 20)
        ax.scatter(x, y, s=18, color=color, alpha=0.8, edgecolors="none")
        try:
            fit = linear_fit(pts)
        except InvalidInputError:
            continue
        xs = np.array([x.min(), x.max()])
        ax.plot(xs, fit.intercept + fit.slope * xs, color=color, lw=1, alpha=0.7)
    if len(all_pts) >= 2:
        try:
            pooled = linear_fit(all_pts)
        except InvalidInputError:
            pooled = None
        if pooled is not None:
            xs = np.array([min(p[0] for p in all_pts), max(p[0] for p in all_pts)])
            ax.plot(
                xs,
                pooled.intercept + pooled.slope * xs,
                color="black",
                lw=2,
                ls="--",
                label=f"pooled slope {pooled.slope:.3g}",
            )
            ax.legend(loc="best", fontsize=8)
    ax.set_xlabel(metric.upper())
    ax.set_ylabel("mean total cost")
    ax.set_title(f"Total cost vs {metric.upper()} (lines: per-scenario fits)")
    fig.tight_layout()
    fig_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)


def render_analysis(out_dir: Path) -> list[Path]:
    """Render every analysis figure whose plotdata file exists."""
    out = Path(out_dir)
    figures = out / "figures"
    rendered = []
    adi_csv = out / "plotdata" / "adi_cv2.csv"
    if adi_csv.is_file():
        target = figures / "adi_cv2.png"
        render_adi_cv2(adi_csv, target)
        rendered.append(target)
    for metric in ACCURACY_METRICS:
        src = out / "plotdata" / f"cost_vs_{metric}.csv"
        if src.is_file():
            target = figures / f"cost_vs_{metric}.png"
            render_cost_vs_metric(src, target, metric)
            rendered.append(target)
    return rendered
