"""
scorer.py
─────────────────────────────────────────────────────────────────────────────
Nó score: transforma estimativas em ResultRows (erro alinhado, erro em
dB) e separa o tempo de parede nas linhas de timing. Com record_costs
emite também o custo ℓp de cada iteração.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import math

from nodes.router import record_event
from retrieval.metrics import aligned_error, aligned_error_twin, error_db
from state import ResultRow, TrialState


def _row(state: TrialState, solver: str, p: float, error: float, iterations: int, termination: str) -> ResultRow:
    point = state["grid_point"]
    return ResultRow(
        scenario=state["experiment"].scenario,
        grid_index=state["grid_index"],
        snr_db=point["snr_db"],
        outlier_fraction=point["outlier_fraction"],
        ratio=point["ratio"],
        p=p,
        solver=solver,
        trial=state["trial"],
        aligned_error=error,
        error_db=error_db(error) if math.isfinite(error) else math.nan,
        iterations=iterations,
        termination=termination,
        crb_laplacian=state.get("crb_laplacian", math.nan),
        crb_gaussian=state.get("crb_gaussian", math.nan),
    )


def score(state: TrialState, x_hat) -> float:
    if x_hat is None:
        return math.nan
    experiment = state["experiment"]
    if experiment.signal == "image":
        size = experiment.image_size
        return aligned_error_twin(x_hat, state["x_true"], (size, size))
    return aligned_error(x_hat, state["x_true"])


def score_node(state: TrialState) -> dict:
    experiment = state["experiment"]

    if experiment.scenario == "crb_table":
        row = _row(state, "crb", math.nan, math.nan, 0, "bound")
        return {"rows": [row], **record_event(state, "score", "linha de CRB")}

    rows, timings, costs = [], [], []
    for est in state.get("estimates", []):
        rows.append(_row(
            state,
            est["solver"],
            est["p"],
            score(state, est["x_hat"]),
            est["iterations"],
            est["termination"],
        ))
        timings.append({
            "scenario":   experiment.scenario,
            "grid_index": state["grid_index"],
            "solver":     est["solver"],
            "trial":      state["trial"],
            "wall_time":  est["wall_time"],
        })
        if experiment.record_costs:
            costs.extend(
                {
                    "scenario":   experiment.scenario,
                    "grid_index": state["grid_index"],
                    "solver":     est["solver"],
                    "trial":      state["trial"],
                    "iteration":  iteration,
                    "cost":       value,
                }
                for iteration, value in enumerate(est.get("costs", []))
            )

    return {
        "rows":    rows,
        "timings": timings,
        "costs":   costs,
        **record_event(state, "score", f"{len(rows)} linhas"),
    }


__all__ = ["score_node", "score"]
