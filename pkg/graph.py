"""
graph.py
─────────────────────────────────────────────────────────────────────────────
Montagem do grafo LangGraph de um trial Monte-Carlo e o harness que
varre o grid de um experimento.

Uso rápido:
    from experiment_config import make_config
    from graph import run_experiment

    result = run_experiment(make_config("configs/snr_laplacian.env", cli={"trials": 10}))
    print(result.summary)

Uso avançado (um único trial, estado completo):
    from graph import build_graph, create_initial_state

    graph = build_graph()
    final = graph.invoke(create_initial_state(config, 0, config.grid()[0], trial=0))
    final["rows"], final["events"]

Determinismo: cada trial deriva os seus geradores de (seed mestre,
índice do grid, índice do trial); os trials de um ponto do grid rodam
em paralelo via Runnable.batch e as linhas são ordenadas por
(grid_index, ordem do solver, trial) antes de sair.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import pandas as pd
from langgraph.graph import END, StateGraph

from experiment_config import ExperimentConfig
from nodes.bound import bound_node
from nodes.estimator import estimate_node
from nodes.initializer import initialize_node
from nodes.router import route_after_setup
from nodes.scorer import score_node
from nodes.setup import setup_node
from state import GridPoint, TrialState
from tools.report import costs_frame, rows_frame, summarize, timing_frame

logger = logging.getLogger("phase_bench.graph")


# ─────────────────────────────────────────────────────────────────────────────
# Construção do grafo
# ─────────────────────────────────────────────────────────────────────────────

def build_graph():
    """
    Monta e compila o StateGraph de um trial (sem checkpointer: cada
    trial é independente e roda uma única vez).

    Topologia:
        START → setup ─┬─→ initialize → estimate ─┐
                       │                          ↓
                       └────────────────────→ bound → score → END
    """
    builder = StateGraph(TrialState)

    builder.add_node("setup",      setup_node)
    builder.add_node("initialize", initialize_node)
    builder.add_node("estimate",   estimate_node)
    builder.add_node("bound",      bound_node)
    builder.add_node("score",      score_node)

    builder.set_entry_point("setup")

    builder.add_conditional_edges(
        "setup",
        route_after_setup,
        {
            "initialize": "initialize",
            "bound":      "bound",
        },
    )
    builder.add_edge("initialize", "estimate")
    builder.add_edge("estimate",   "bound")
    builder.add_edge("bound",      "score")
    builder.add_edge("score",      END)

    return builder.compile()


# ─────────────────────────────────────────────────────────────────────────────
# Estado inicial
# ─────────────────────────────────────────────────────────────────────────────

def create_initial_state(
    experiment: ExperimentConfig,
    grid_index: int,
    point: GridPoint,
    trial: int,
) -> TrialState:
    return TrialState(
        experiment=experiment,
        grid_index=grid_index,
        grid_point=point,
        trial=trial,
        seed=(experiment.seed, grid_index, trial),
        estimates=[],
        rows=[],
        timings=[],
        costs=[],
        events=[],
    )


# ─────────────────────────────────────────────────────────────────────────────
# API de alto nível
# ─────────────────────────────────────────────────────────────────────────────

@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: pd.DataFrame
    """Uma linha por (ponto do grid, solver, trial), colunas tools.report.COLUMNS."""
    summary: pd.DataFrame
    timing: pd.DataFrame
    costs: pd.DataFrame
    """Custo ℓp por iteração; vazio sem record_costs."""
    events: list[dict]


def solver_order(experiment: ExperimentConfig) -> dict[str, int]:
    return {name: i for i, name in enumerate(("crb",) + tuple(experiment.solvers))}


def sort_rows(rows: pd.DataFrame, experiment: ExperimentConfig, extra: tuple[str, ...] = ()) -> pd.DataFrame:
    order = solver_order(experiment)
    key = rows["solver"].map(order)
    return (
        rows.assign(_order=key)
        .sort_values(["grid_index", "_order", "trial", *extra], kind="mergesort")
        .drop(columns="_order")
        .reset_index(drop=True)
    )


def run_experiment(
    experiment: ExperimentConfig,
    on_grid_point: Optional[Callable[[int, GridPoint, pd.DataFrame], None]] = None,
) -> ExperimentResult:
    """
    Executa todos os trials de todos os pontos do grid.

    Args:
        experiment:    Configuração validada (make_config).
        on_grid_point: Callback opcional chamado ao fim de cada ponto com
                       (índice, ponto, linhas do ponto); usado pela CLI
                       para mostrar progresso.

    Returns:
        ExperimentResult com linhas ordenadas, agregados e tempos.
    """
    graph = build_graph()
    grid = experiment.grid()
    logger.info(
        "Experimento %s: %d pontos × %d trials, %d workers",
        experiment.scenario, len(grid), experiment.trials, experiment.workers,
    )

    all_rows: list[dict] = []
    all_timings: list[dict] = []
    all_costs: list[dict] = []
    all_events: list[dict] = []

    for grid_index, point in enumerate(grid):
        states = [
            create_initial_state(experiment, grid_index, point, trial)
            for trial in range(experiment.trials)
        ]
        finals = graph.batch(states, config={"max_concurrency": experiment.workers})

        point_rows = [row for final in finals for row in final.get("rows", [])]
        all_rows.extend(point_rows)
        all_timings.extend(t for final in finals for t in final.get("timings", []))
        all_costs.extend(c for final in finals for c in final.get("costs", []))
        all_events.extend(e for final in finals for e in final.get("events", []))

        logger.info("Ponto %d/%d concluído: %s", grid_index + 1, len(grid), dict(point))
        if on_grid_point is not None:
            on_grid_point(grid_index, point, sort_rows(rows_frame(point_rows), experiment))

    rows = sort_rows(rows_frame(all_rows), experiment)
    timing = sort_rows(timing_frame(all_timings), experiment)
    costs = sort_rows(costs_frame(all_costs), experiment, extra=("iteration",))
    return ExperimentResult(
        config=experiment,
        rows=rows,
        summary=summarize(rows, experiment.success_threshold),
        timing=timing,
        costs=costs,
        events=all_events,
    )


# ─────────────────────────────────────────────────────────────────────────────
# Visualização do grafo (debug)
# ─────────────────────────────────────────────────────────────────────────────

def print_graph_structure() -> None:
    """Imprime a estrutura do grafo em ASCII (útil para debug)."""
    graph = build_graph()
    try:
        print(graph.get_graph().draw_ascii())
    except Exception:
        print("Grafo compilado com os nós:")
        print("  setup → [initialize → estimate] → bound → score → END")


if __name__ == "__main__":
    print_graph_structure()
