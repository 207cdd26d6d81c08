"""
estimator.py
─────────────────────────────────────────────────────────────────────────────
Nó estimate: roda cada solver da configuração a partir do seu ponto
inicial e mede o tempo de parede (relógio monotônico).

Uma falha de solver não derruba o experimento: o erro vira um aviso no
log e uma estimativa com termination="error".
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
import math
import time
from typing import Optional

import numpy as np

from nodes.router import record_event
from retrieval.baseline import SupportMask, gs, hio_grid, restrict
from retrieval.solver import solve
from state import GridPoint, TrialState

logger = logging.getLogger("phase_bench.estimator")

LP_SOLVERS = ("alt_irls", "alt_gd", "alt_gd_accel", "alt_gd_block")


def solver_p(name: str, point: GridPoint) -> float:
    """Expoente efetivo do solver: 2 para GS, NaN para HIO, p do grid nos demais."""
    if name == "gs":
        return 2.0
    if name == "hio":
        return math.nan
    return point["p"]


def run_solver(
    name: str,
    state: TrialState,
    start,
    seed: int,
) -> tuple[np.ndarray, int, str, list[float]]:
    """
    (estimativa, iterações, motivo de término, custos) de um solver.

    Os custos são o ℓp do ponto inicial seguido do de cada iteração;
    gs e hio não têm custo ℓp e devolvem lista vazia.
    """
    experiment = state["experiment"]
    op, y = state["operator"], state["y"]
    if start is None:
        raise ValueError(f"{name}: sem ponto inicial (a inicialização falhou).")

    pipeline = experiment.scenario == "fourier2d_pipeline"

    if name == "hio":
        support = SupportMask.top_left(op)
        grid = hio_grid(
            y, op, support,
            beta=experiment.hio_beta,
            iters=experiment.refine_iters,
            init_grid=start,
            real=True,
        )
        return restrict(op, support, grid), experiment.hio_iters + experiment.refine_iters, "fixed", []

    if name == "gs":
        iters = experiment.refine_iters if pipeline else experiment.max_iters
        return gs(y, op, start, iters), iters, "fixed", []

    config = experiment.solver_config(name, solver_p(name, state["grid_point"]), seed=seed)
    x_hat, trace = solve(y, op, start, config)
    return x_hat, trace.iterations, trace.reason, [trace.initial_cost, *trace.costs]


def estimate_node(state: TrialState) -> dict:
    experiment = state["experiment"]
    initial = state.get("initial", {})
    seed = int(state["streams"]["solver"].integers(0, 2**31 - 1))

    estimates: list[dict] = []
    failures = 0
    for name in experiment.solvers:
        began = time.perf_counter()
        x_hat: Optional[np.ndarray] = None
        costs: list[float] = []
        try:
            x_hat, iterations, termination, costs = run_solver(name, state, initial.get(name), seed)
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            failures += 1
            iterations, termination = 0, "error"
            logger.warning(
                "Solver %s falhou no trial (%d, %d): %s",
                name, state["grid_index"], state["trial"], exc,
            )
        estimates.append({
            "solver":      name,
            "x_hat":       x_hat,
            "p":           solver_p(name, state["grid_point"]),
            "iterations":  iterations,
            "termination": termination,
            "wall_time":   time.perf_counter() - began,
            "costs":       costs,
        })

    status = "warning" if failures else "success"
    detail = f"{len(estimates)} solvers, {failures} falhas"
    return {"estimates": estimates, **record_event(state, "estimate", detail, status)}


__all__ = ["estimate_node", "run_solver", "solver_p", "LP_SOLVERS"]
