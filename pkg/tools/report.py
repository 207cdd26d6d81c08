"""
report.py
─────────────────────────────────────────────────────────────────────────────
Saída dos experimentos: tabelas pandas, CSV e gráficos.

Arquivos escritos para --out results/x.csv:
  • results/x.csv          — uma linha por (ponto do grid, solver, trial)
  • results/x.summary.csv  — agregados por (ponto do grid, solver)
  • results/x.timing.csv   — tempo de parede por (ponto, solver, trial)
  • results/x.costs.csv    — custo ℓp por iteração, com RECORD_COSTS=true
  • results/x.<métrica>.png com --emit-plots

O CSV principal não tem tempo de parede: duas execuções com a mesma seed
produzem os mesmos bytes. Números em notação científica com 17 casas
(round-trip exato), UTF-8, fim de linha LF.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np
import pandas as pd

from retrieval.crb import crb_db
from retrieval.metrics import SUCCESS_THRESHOLD, error_db, mse_db, success_rate

logger = logging.getLogger("phase_bench.report")

# Ordem fixa das colunas do CSV principal
COLUMNS = [
    "scenario",
    "grid_index",
    "snr_db",
    "outlier_fraction",
    "ratio",
    "p",
    "solver",
    "trial",
    "aligned_error",
    "error_db",
    "iterations",
    "termination",
    "crb_laplacian",
    "crb_gaussian",
]

TIMING_COLUMNS = ["scenario", "grid_index", "solver", "trial", "wall_time"]

COST_COLUMNS = ["scenario", "grid_index", "solver", "trial", "iteration", "cost"]

SUMMARY_COLUMNS = [
    "scenario",
    "grid_index",
    "snr_db",
    "outlier_fraction",
    "ratio",
    "p",
    "solver",
    "trials",
    "failures",
    "mse_db",
    "median_error_db",
    "success_rate",
    "mean_iterations",
    "crb_laplacian_db",
    "crb_gaussian_db",
]

FLOAT_FORMAT = "%.17e"

Rows = Union[pd.DataFrame, Iterable[dict]]


# ─────────────────────────────────────────────────────────────────────────────
# Tabelas
# ─────────────────────────────────────────────────────────────────────────────

def _frame(rows: Rows, columns: list[str]) -> pd.DataFrame:
    if isinstance(rows, pd.DataFrame):
        return rows.reindex(columns=columns)
    return pd.DataFrame(list(rows), columns=columns)


def rows_frame(rows: Rows) -> pd.DataFrame:
    return _frame(rows, COLUMNS)


def timing_frame(rows: Rows) -> pd.DataFrame:
    return _frame(rows, TIMING_COLUMNS)


def costs_frame(rows: Rows) -> pd.DataFrame:
    return _frame(rows, COST_COLUMNS)


def _mean_db(values: pd.Series) -> float:
    finite = values[np.isfinite(values)]
    return crb_db(float(finite.mean())) if len(finite) else math.nan


def summarize(rows: Rows, threshold: float = SUCCESS_THRESHOLD) -> pd.DataFrame:
    """
    Agregados por (grid_index, solver), na ordem em que aparecem:
    mse_db (média dos erros, depois dB), mediana dos erros em dB, taxa de
    sucesso (falhas contam como insucesso), iterações médias e CRBs em dB.
    """
    frame = rows_frame(rows)
    records = []
    for (_, solver), group in frame.groupby(["grid_index", "solver"], sort=False):
        first = group.iloc[0]
        errors = group["aligned_error"].to_numpy(dtype=np.float64)
        finite = errors[np.isfinite(errors)]
        bound_only = solver == "crb"

        records.append({
            "scenario":         first["scenario"],
            "grid_index":       int(first["grid_index"]),
            "snr_db":           first["snr_db"],
            "outlier_fraction": first["outlier_fraction"],
            "ratio":            first["ratio"],
            "p":                first["p"],
            "solver":           solver,
            "trials":           len(group),
            "failures":         int((group["termination"] == "error").sum()),
            "mse_db":           mse_db(finite) if finite.size else math.nan,
            "median_error_db":  float(np.median([error_db(e) for e in finite])) if finite.size else math.nan,
            "success_rate":     math.nan if bound_only else success_rate(np.nan_to_num(errors, nan=np.inf), threshold),
            "mean_iterations":  float(group["iterations"].mean()),
            "crb_laplacian_db": _mean_db(group["crb_laplacian"]),
            "crb_gaussian_db":  _mean_db(group["crb_gaussian"]),
        })
    return pd.DataFrame(records, columns=SUMMARY_COLUMNS)


# ─────────────────────────────────────────────────────────────────────────────
# Arquivos
# ─────────────────────────────────────────────────────────────────────────────

def _write(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path,
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
        encoding="utf-8",
    )
    return path


def sidecar(path: Union[str, Path], kind: str, suffix: str = ".csv") -> Path:
    """results/x.csv → results/x.<kind><suffix>."""
    path = Path(path)
    return path.with_name(f"{path.stem}.{kind}{suffix}")


def emit_csv(rows: Rows, path: Union[str, Path]) -> Path:
    """
    Escreve o CSV principal (cabeçalho + uma linha por ResultRow).

    Raises:
        OSError: caminho não gravável.
    """
    target = _write(rows_frame(rows), Path(path))
    logger.info("CSV escrito: %s", target)
    return target


def emit_summary(summary: pd.DataFrame, path: Union[str, Path]) -> Path:
    return _write(summary.reindex(columns=SUMMARY_COLUMNS), sidecar(path, "summary"))


def emit_timing(timings: Rows, path: Union[str, Path]) -> Path:
    return _write(timing_frame(timings), sidecar(path, "timing"))


def emit_costs(costs: Rows, path: Union[str, Path]) -> Path:
    """Curvas de custo: uma linha por (ponto, solver, trial, iteração); iteração 0 é o ponto inicial."""
    return _write(costs_frame(costs), sidecar(path, "costs"))


def read_rows(path: Union[str, Path]) -> pd.DataFrame:
    """Lê um CSV principal de volta (strings para scenario/solver/termination)."""
    return pd.read_csv(
        path,
        dtype={"scenario": str, "solver": str, "termination": str},
        float_precision="round_trip",
    )


# ─────────────────────────────────────────────────────────────────────────────
# Gráficos
# ─────────────────────────────────────────────────────────────────────────────

PLOTTED = {
    "mse_db":       "MSE (dB)",
    "success_rate": "taxa de sucesso",
}


def emit_plots(summary: pd.DataFrame, axis: str, path: Union[str, Path]) -> list[Path]:
    """
    Um PNG por métrica: uma curva por solver ao longo do eixo varrido;
    CRBs em tracejado quando existirem.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written: list[Path] = []
    if summary.empty:
        return written

    for metric, label in PLOTTED.items():
        fig, ax = plt.subplots(figsize=(6, 4))
        for solver, group in summary.groupby("solver", sort=False):
            if group[metric].notna().any():
                ax.plot(group[axis], group[metric], marker="o", label=solver)
        if metric == "mse_db":
            for column, name in (("crb_laplacian_db", "CRB (Laplace)"), ("crb_gaussian_db", "CRB (Gauss)")):
                bounds = summary.drop_duplicates("grid_index")
                if bounds[column].notna().any():
                    ax.plot(bounds[axis], bounds[column], linestyle="--", label=name)
        ax.set_xlabel(axis)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
        if ax.lines:
            ax.legend()
        target = sidecar(path, metric, ".png")
        target.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(target, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(target)

    logger.info("Gráficos escritos: %s", ", ".join(str(p) for p in written))
    return written


def format_summary(summary: pd.DataFrame, axis: str, limit: Optional[int] = None) -> list[str]:
    """Linhas de texto do resumo para o relatório no terminal."""
    lines = []
    frame = summary if limit is None else summary.head(limit)
    for _, rec in frame.iterrows():
        parts = [f"{axis}={rec[axis]:<7g}", f"{rec['solver']:<13s}"]
        if rec["solver"] == "crb":
            parts.append(f"CRB_L={rec['crb_laplacian_db']:7.2f} dB  CRB_G={rec['crb_gaussian_db']:7.2f} dB")
        else:
            parts.append(f"MSE={rec['mse_db']:7.2f} dB  sucesso={rec['success_rate']:.2f}")
            parts.append(f"iter={rec['mean_iterations']:.0f}")
            if rec["failures"]:
                parts.append(f"falhas={rec['failures']}")
        lines.append("  ".join(parts))
    return lines


__all__ = [
    "COLUMNS",
    "TIMING_COLUMNS",
    "COST_COLUMNS",
    "SUMMARY_COLUMNS",
    "rows_frame",
    "timing_frame",
    "costs_frame",
    "summarize",
    "sidecar",
    "emit_csv",
    "emit_summary",
    "emit_timing",
    "emit_costs",
    "read_rows",
    "emit_plots",
    "format_summary",
]
