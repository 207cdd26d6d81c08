"""
bound.py
─────────────────────────────────────────────────────────────────────────────
Nó bound: limites de Cramér–Rao do trial para ruído laplaciano e
gaussiano (este é sempre o dobro do primeiro).

Só é calculado quando o ruído do experimento é laplaciano ou gaussiano;
caso contrário as colunas ficam NaN. Sinais reais (imagens) usam a FIM
da parametrização real.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
import math

import numpy as np

from nodes.router import record_event
from retrieval.crb import crb_gaussian, crb_laplacian, fim_laplacian_complex, fim_laplacian_real
from state import TrialState

logger = logging.getLogger("phase_bench.bound")


def bound_node(state: TrialState) -> dict:
    sigma2 = state.get("noise_variance")
    if sigma2 is None:
        return {"crb_laplacian": math.nan, "crb_gaussian": math.nan}

    experiment = state["experiment"]
    op, x = state["operator"], state["x_true"]
    try:
        if experiment.signal == "image":
            fim = fim_laplacian_real(op, np.real(x), sigma2)
        else:
            fim = fim_laplacian_complex(op, x, sigma2)
        laplacian = crb_laplacian(fim)
        gaussian = crb_gaussian(laplacian)
    except ValueError as exc:
        logger.warning(
            "CRB indefinido no trial (%d, %d): %s",
            state["grid_index"], state["trial"], exc,
        )
        return {
            "crb_laplacian": math.nan,
            "crb_gaussian":  math.nan,
            **record_event(state, "bound", str(exc), "error"),
        }

    return {
        "crb_laplacian": laplacian.bound_total,
        "crb_gaussian":  gaussian.bound_total,
        **record_event(state, "bound", f"posto {laplacian.rank}, CRB_L={laplacian.bound_total:.3e}"),
    }


__all__ = ["bound_node"]
