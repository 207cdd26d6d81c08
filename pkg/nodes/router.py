"""
router.py
─────────────────────────────────────────────────────────────────────────────
Roteamento condicional do grafo de um trial e registro de eventos.

Topologia:
    setup ─┬─→ initialize → estimate → bound → score → END
           └─→ bound → score → END          (cenário crb_table)
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
from datetime import datetime
from typing import Literal

from state import TrialState

logger = logging.getLogger("phase_bench.router")

NextNode = Literal["initialize", "bound"]

VALID_NODES = {"initialize", "bound"}


def route_after_setup(state: TrialState) -> NextNode:
    """
    Lê state["next_node"] e retorna o nome do próximo nó.
    Chamada como conditional_edge a partir do nó setup.
    """
    next_node = state.get("next_node", "initialize")
    if next_node not in VALID_NODES:
        logger.warning("Destino desconhecido '%s'; seguindo para initialize.", next_node)
        return "initialize"
    return next_node


def record_event(
    state: TrialState,
    node: str,
    detail: str,
    status: str = "success",
) -> dict:
    """
    Utilitário que cada nó usa para registrar o que fez.

    Args:
        state:  Estado atual do trial.
        node:   Nome do nó ("setup", "estimate", ...).
        detail: Texto curto do resultado.
        status: "success" | "warning" | "error"

    Returns:
        Dict com a atualização de `events` para retornar no nó.
    """
    entry = {
        "node":       node,
        "status":     status,
        "detail":     detail,
        "grid_index": state.get("grid_index"),
        "trial":      state.get("trial"),
        "timestamp":  datetime.now().strftime("%H:%M:%S"),
    }
    return {"events": [entry]}


__all__ = ["route_after_setup", "record_event", "NextNode"]
