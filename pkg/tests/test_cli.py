"""End-to-end pipeline and CLI surface tests on a small scenario grid."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from sparesim.cli import main
from sparesim.config import DEFAULT_TOML, config_hash, load_config, parse_config

SMOKE_TOML = """\
master_seed = 3

[generator]
horizon_days = 220
n_dealers = 2
parts_per_truck_range = [2, 2]

[grid]
drift_modes = ["none", "sudden"]
trucks_ranges = [[4, 6]]
median_ranges = [[20, 40]]

[forecast]
train_days = 150
tune_holdout_days = 30
seasonal_period_days = 60
"""


@pytest.fixture
def smoke_config(tmp_path) -> Path:
    path = tmp_path / "smoke.toml"
    path.write_text(SMOKE_TOML)
    return path


def all_csv_bytes(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*.csv"))}


def test_print_defaults_round_trips():
    parsed = tomllib.loads(DEFAULT_TOML)
    assert parse_config(parsed) == parse_config({})
    assert main(["--print-defaults"]) == 0


def test_config_validation_messages(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[generator]\nn_dealers = 'four'\n")
    from sparesim.errors import ConfigError

    with pytest.raises(ConfigError, match="generator.n_dealers"):
        load_config(bad)
    bad.write_text("[forecast]\ntrain_days = 5000\n")
    with pytest.raises(ConfigError, match="train_days"):
        load_config(bad)


def test_config_hash_tracks_content(smoke_config):
    a = load_config(smoke_config)
    b = load_config(smoke_config)
    assert config_hash(a) == config_hash(b)
    b.master_seed = 4
    assert config_hash(a) != config_hash(b)


def test_run_all_produces_expected_tree(smoke_config, tmp_path):
    out = tmp_path / "out"
    rc = main(["run-all", "--config", str(smoke_config), "--out", str(out), "--jobs", "1"])
    assert rc == 0
    for sid in ("none_t4-6_m20-40", "sudden_t4-6_m20-40"):
        sdir = out / "scenarios" / sid
        assert (sdir / "demand_series.csv").is_file()
        assert (sdir / "demand_events.jsonl").is_file()
        assert (sdir / "forecast.csv").is_file()
        assert (sdir / "residual_sigma.csv").is_file()
    for name in ("metrics.csv", "kpi.csv", "summary.csv", "summary.txt", "regressions.csv"):
        assert (out / name).is_file()
    simpson = json.loads((out / "simpson.json").read_text())
    assert set(simpson) == {"mae", "rmse", "r2", "iae"}
    assert (out / "plotdata" / "adi_cv2.csv").is_file()
    for metric in ("mae", "rmse", "r2", "iae"):
        assert (out / "plotdata" / f"cost_vs_{metric}.csv").is_file()
        assert (out / "figures" / f"cost_vs_{metric}.png").is_file()
    assert (out / "figures" / "adi_cv2.png").is_file()

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["master_seed"] == 3
    assert set(manifest["stages"]) == {"generate", "forecast", "simulate", "analyze"}

    with open(out / "metrics.csv") as fh:
        rows = list(csv.DictReader(fh))
    models = {r["model_name"] for r in rows}
    assert models == {"croston", "sba", "tsb", "ses", "seasonal_naive"}
    # 2 scenarios x 5 models x 2 dealers x 2 part types
    assert len(rows) == 40

    with open(out / "kpi.csv") as fh:
        kpi_rows = list(csv.DictReader(fh))
    assert len(kpi_rows) == 40
    for row in kpi_rows:
        assert 0.0 <= float(row["service_level"]) <= 1.0


def test_demand_series_is_dense_per_day(smoke_config, tmp_path):
    out = tmp_path / "out"
    assert main(["generate", "--config", str(smoke_config), "--out", str(out), "--jobs", "1"]) == 0
    with open(out / "scenarios" / "none_t4-6_m20-40" / "demand_series.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 220 * 2 * 2  # horizon x dealers x part types
    assert rows[0]["date"] == "2022-01-01"


def test_stage_separability_matches_run_all(smoke_config, tmp_path):
    combined = tmp_path / "combined"
    staged = tmp_path / "staged"
    assert main(["run-all", "--config", str(smoke_config), "--out", str(combined), "--jobs", "1"]) == 0
    for command in ("generate", "forecast", "simulate", "analyze"):
        args = [command, "--config", str(smoke_config), "--out", str(staged)]
        if command != "analyze":
            args += ["--jobs", "1"]
        assert main(args) == 0
    assert all_csv_bytes(combined) == all_csv_bytes(staged)


def test_jobs_do_not_change_outputs(smoke_config, tmp_path):
    serial = tmp_path / "serial"
    parallel = tmp_path / "parallel"
    assert main(["run-all", "--config", str(smoke_config), "--out", str(serial), "--jobs", "1"]) == 0
    assert main(["run-all", "--config", str(smoke_config), "--out", str(parallel), "--jobs", "2"]) == 0
    assert all_csv_bytes(serial) == all_csv_bytes(parallel)


def test_seed_flag_changes_outputs(smoke_config, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["generate", "--config", str(smoke_config), "--out", str(a), "--jobs", "1"]) == 0
    assert main(["generate", "--config", str(smoke_config), "--out", str(b), "--seed", "99", "--jobs", "1"]) == 0
    assert all_csv_bytes(a) != all_csv_bytes(b)
    manifest = json.loads((b / "manifest.json").read_text())
    assert manifest["master_seed"] == 99


def test_external_forecasts_flow_through_pipeline(smoke_config, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["generate", "--config", str(smoke_config), "--out", str(out), "--jobs", "1"]) == 0
    assert main(["forecast", "--config", str(smoke_config), "--out", str(out), "--jobs", "1"]) == 0

    # craft external files from the croston block, relabelled as a new model
    ext_dir = tmp_path / "external"
    ext_dir.mkdir()
    for sdir in (out / "scenarios").iterdir():
        lines = (sdir / "forecast.csv").read_text().splitlines()
        header, rows = lines[0], lines[1:]
        ext_rows = [r.replace("croston,", "extmodel,", 1) for r in rows if r.startswith("croston,")]
        (ext_dir / f"{sdir.name}.csv").write_text("\n".join([header, *ext_rows]) + "\n")

    assert (
        main(
            [
                "forecast",
                "--config",
                str(smoke_config),
                "--out",
                str(out),
                "--external",
                str(ext_dir),
                "--jobs",
                "1",
            ]
        )
        == 0
    )
    assert main(["simulate", "--config", str(smoke_config), "--out", str(out), "--jobs", "1"]) == 0
    assert main(["analyze", "--config", str(smoke_config), "--out", str(out)]) == 0

    with open(out / "metrics.csv") as fh:
        rows = list(csv.DictReader(fh))
    ext_rows = [r for r in rows if r["model_name"] == "extmodel"]
    croston_rows = [r for r in rows if r["model_name"] == "croston"]
    assert len(ext_rows) == len(croston_rows) > 0
    # identical forecasts must score identically
    for e, c in zip(ext_rows, croston_rows):
        assert e["mae"] == c["mae"] and e["iae"] == c["iae"]

    with open(out / "kpi.csv") as fh:
        kpi_rows = list(csv.DictReader(fh))
    assert {r["model_name"] for r in kpi_rows} >= {"extmodel", "croston"}


def test_unknown_model_is_a_diagnosed_failure(smoke_config, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["generate", "--config", str(smoke_config), "--out", str(out), "--jobs", "1"]) == 0
    rc = main(
        ["forecast", "--config", str(smoke_config), "--out", str(out), "--models", "prophet", "--jobs", "1"]
    )
    assert rc == 2
    assert "unknown model" in capsys.readouterr().err


def test_missing_demand_dir_is_a_diagnosed_failure(smoke_config, tmp_path, capsys):
    rc = main(["forecast", "--config", str(smoke_config), "--out", str(tmp_path / "nowhere")])
    assert rc == 2
    assert "generate" in capsys.readouterr().err
