"""
initializer.py
─────────────────────────────────────────────────────────────────────────────
Nó initialize: ponto de partida de cada solver.

  • 1D: inicialização espectral compartilhada; para p < 1 com
    INIT=staged, aquecimento em estágios (p = 1.3 → 1.0 [→ 0.7]) com a
    variante do próprio solver.
  • fourier2d: HIO com hio_iters iterações a partir de fase aleatória;
    o grid completo é guardado para o HIO retomar, e a restrição ao
    suporte inicializa os demais solvers.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging

from nodes.estimator import LP_SOLVERS, solver_p
from nodes.router import record_event
from retrieval.baseline import SupportMask, hio_grid, restrict
from retrieval.solver import spectral_init, staged_p_init
from state import TrialState

logger = logging.getLogger("phase_bench.initializer")


def _fourier_starts(state: TrialState) -> dict:
    experiment = state["experiment"]
    op, y = state["operator"], state["y"]
    support = SupportMask.top_left(op)
    grid = hio_grid(
        y, op, support,
        beta=experiment.hio_beta,
        iters=experiment.hio_iters,
        rng=state["streams"]["init"],
        real=True,
    )
    x0 = restrict(op, support, grid)
    return {name: grid if name == "hio" else x0 for name in experiment.solvers}


def _spectral_starts(state: TrialState) -> dict:
    experiment = state["experiment"]
    op, y = state["operator"], state["y"]
    x0 = spectral_init(y, op, state["streams"]["init"])

    starts = {}
    for name in experiment.solvers:
        p = solver_p(name, state["grid_point"])
        if name in LP_SOLVERS and experiment.init == "staged" and p < 1:
            try:
                starts[name] = staged_p_init(
                    y, op, p, state["streams"]["init"],
                    config=experiment.solver_config(name, p),
                    x0=x0,
                )
            except (ValueError, ArithmeticError) as exc:
                logger.warning("Aquecimento em estágios de %s falhou: %s", name, exc)
                starts[name] = None
        else:
            starts[name] = x0
    return starts


def initialize_node(state: TrialState) -> dict:
    experiment = state["experiment"]
    try:
        if experiment.operator == "fourier2d":
            initial = _fourier_starts(state)
            detail = f"HIO {experiment.hio_iters} iterações"
        else:
            initial = _spectral_starts(state)
            detail = "espectral" + (" + estágios" if experiment.init == "staged" else "")
        status = "success"
    except (ValueError, ArithmeticError) as exc:
        logger.warning(
            "Inicialização falhou no trial (%d, %d): %s",
            state["grid_index"], state["trial"], exc,
        )
        initial = {name: None for name in experiment.solvers}
        detail, status = str(exc), "error"

    return {"initial": initial, **record_event(state, "initialize", detail, status)}


__all__ = ["initialize_node"]
