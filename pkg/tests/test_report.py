"""Saída tabular: CSV principal, sidecars, agregados e gráficos."""

from __future__ import annotations

import math

import numpy as np
import pandas as pd
import pytest

from tools.report import (
    COLUMNS,
    COST_COLUMNS,
    SUMMARY_COLUMNS,
    emit_costs,
    emit_csv,
    emit_plots,
    emit_summary,
    emit_timing,
    format_summary,
    read_rows,
    rows_frame,
    sidecar,
    summarize,
)


def _row(grid_index, snr, solver, trial, error, termination="tolerance", iterations=10):
    return {
        "scenario": "snr_sweep",
        "grid_index": grid_index,
        "snr_db": snr,
        "outlier_fraction": 0.1,
        "ratio": 8.0,
        "p": 1.3 if solver != "gs" else 2.0,
        "solver": solver,
        "trial": trial,
        "aligned_error": error,
        "error_db": 10 * math.log10(error) if error > 0 else (math.nan if math.isnan(error) else -math.inf),
        "iterations": iterations,
        "termination": termination,
        "crb_laplacian": 1e-3 / (grid_index + 1),
        "crb_gaussian": 2e-3 / (grid_index + 1),
    }


@pytest.fixture
def rows():
    return [
        _row(0, 10.0, "alt_irls", 0, 1e-6),
        _row(0, 10.0, "alt_irls", 1, 1e-2),
        _row(0, 10.0, "gs", 0, 0.1),
        _row(0, 10.0, "gs", 1, math.nan, termination="error", iterations=0),
        _row(1, 20.0, "alt_irls", 0, 0.0),
        _row(1, 20.0, "alt_irls", 1, 3e-5),
        _row(1, 20.0, "gs", 0, 0.2),
        _row(1, 20.0, "gs", 1, 0.3),
    ]


def test_empty_csv_is_header_only(tmp_path):
    path = emit_csv([], tmp_path / "empty.csv")
    assert path.read_text(encoding="utf-8") == ",".join(COLUMNS) + "\n"


def test_csv_round_trip_is_exact(tmp_path, rows):
    path = emit_csv(rows, tmp_path / "out" / "run.csv")
    back = read_rows(path)
    assert list(back.columns) == COLUMNS
    pd.testing.assert_frame_equal(back, rows_frame(rows), check_dtype=False)


def test_csv_uses_lf_and_fixed_column_order(tmp_path, rows):
    shuffled = [dict(reversed(list(r.items()))) for r in rows]
    path = emit_csv(shuffled, tmp_path / "run.csv")
    data = path.read_bytes()
    assert b"\r\n" not in data
    assert data.decode("utf-8").splitlines()[0] == ",".join(COLUMNS)


def test_sidecar_names(tmp_path):
    assert sidecar("results/x.csv", "summary").as_posix() == "results/x.summary.csv"
    assert sidecar("results/x.csv", "mse_db", ".png").as_posix() == "results/x.mse_db.png"


def test_summarize(rows):
    summary = summarize(rows)
    assert list(summary.columns) == SUMMARY_COLUMNS
    assert list(zip(summary["grid_index"], summary["solver"])) == [
        (0, "alt_irls"), (0, "gs"), (1, "alt_irls"), (1, "gs"),
    ]
    first = summary.iloc[0]
    assert first["mse_db"] == pytest.approx(10 * math.log10((1e-6 + 1e-2) / 2))
    assert first["success_rate"] == 0.5
    assert first["failures"] == 0

    failed = summary.iloc[1]
    assert failed["failures"] == 1
    assert failed["success_rate"] == 0.0
    assert failed["mse_db"] == pytest.approx(-10.0)

    exact = summary.iloc[2]
    assert exact["success_rate"] == 1.0
    assert exact["crb_gaussian_db"] - exact["crb_laplacian_db"] == pytest.approx(10 * math.log10(2))


def test_summarize_bound_rows():
    bound = _row(0, 10.0, "crb", 0, math.nan, termination="bound", iterations=0)
    bound["p"] = math.nan
    summary = summarize([bound])
    assert math.isnan(summary.iloc[0]["success_rate"])
    assert summary.iloc[0]["crb_laplacian_db"] == pytest.approx(-30.0)


def test_summary_and_timing_sidecars(tmp_path, rows):
    target = tmp_path / "run.csv"
    emit_summary(summarize(rows), target)
    emit_timing([{"scenario": "snr_sweep", "grid_index": 0, "solver": "gs", "trial": 0, "wall_time": 0.5}], target)
    assert (tmp_path / "run.summary.csv").exists()
    timing = pd.read_csv(tmp_path / "run.timing.csv")
    assert timing["wall_time"].tolist() == [0.5]


def test_costs_sidecar(tmp_path):
    curve = [
        {"scenario": "snr_sweep", "grid_index": 0, "solver": "alt_irls", "trial": 1, "iteration": i, "cost": c}
        for i, c in enumerate([4.0, 2.5, 2.25])
    ]
    target = emit_costs(curve, tmp_path / "run.csv")
    assert target == tmp_path / "run.costs.csv"
    assert target.read_text(encoding="utf-8").splitlines()[0] == ",".join(COST_COLUMNS)
    frame = pd.read_csv(target, float_precision="round_trip")
    assert frame["iteration"].tolist() == [0, 1, 2]
    assert frame["cost"].tolist() == [4.0, 2.5, 2.25]

    emit_costs([], tmp_path / "empty.csv")
    assert (tmp_path / "empty.costs.csv").read_text(encoding="utf-8") == ",".join(COST_COLUMNS) + "\n"


def test_emit_plots(tmp_path, rows):
    written = emit_plots(summarize(rows), "snr_db", tmp_path / "run.csv")
    assert sorted(p.name for p in written) == ["run.mse_db.png", "run.success_rate.png"]
    assert all(p.stat().st_size > 0 for p in written)


def test_format_summary(rows):
    lines = format_summary(summarize(rows), "snr_db")
    assert len(lines) == 4
    assert "alt_irls" in lines[0] and "falhas=1" in lines[1]


def test_rows_frame_keeps_infinities(tmp_path, rows):
    path = emit_csv(rows, tmp_path / "run.csv")
    back = read_rows(path)
    assert np.isneginf(back.loc[4, "error_db"])
    assert np.isnan(back.loc[3, "aligned_error"])
