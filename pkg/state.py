"""
state.py
─────────────────────────────────────────────────────────────────────────────
Estado compartilhado entre os nós do grafo de um trial Monte-Carlo.
Cada nó lê e escreve neste TypedDict: é a memória de trabalho do trial.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import operator
from typing import Annotated, Any, Optional
from typing_extensions import TypedDict

import numpy as np


class GridPoint(TypedDict):
    """Coordenadas de um ponto da varredura (todas preenchidas com o valor efetivo)."""

    snr_db: float
    outlier_fraction: float
    ratio: float
    """Razão M/N."""
    p: float


class ResultRow(TypedDict):
    """Uma linha do CSV principal: um (ponto do grid, solver, trial)."""

    scenario: str
    grid_index: int
    snr_db: float
    outlier_fraction: float
    ratio: float
    p: float
    solver: str
    trial: int
    aligned_error: float
    error_db: float
    iterations: int
    termination: str
    """tolerance | max_iters | fixed | error | bound"""
    crb_laplacian: float
    crb_gaussian: float


class TrialState(TypedDict, total=False):
    # ── Input do trial ─────────────────────────────────────────────────────
    experiment: Any
    """ExperimentConfig imutável compartilhado por todos os trials."""

    grid_index: int
    grid_point: GridPoint
    trial: int

    seed: tuple[int, int, int]
    """(seed mestre, índice do ponto do grid, índice do trial)."""

    # ── Problema sorteado (setup) ─────────────────────────────────────────
    operator: Any
    """MeasurementOperator do trial."""

    x_true: np.ndarray
    clean: np.ndarray
    """A x sem ruído (complexo)."""

    y: np.ndarray
    """Magnitudes medidas |A x| + n."""

    noise_variance: Optional[float]
    """σ² esperado para a SNR alvo; usado nas colunas de CRB."""

    streams: dict[str, np.random.Generator]
    """Geradores independentes por etapa: 'operator', 'signal', 'noise', 'init', 'solver'."""

    # ── Controle de fluxo ─────────────────────────────────────────────────
    next_node: str
    """'initialize' | 'bound'."""

    # ── Inicialização e estimação ─────────────────────────────────────────
    initial: dict[str, np.ndarray]
    """Ponto inicial por solver (HIO guarda o grid sobreamostrado)."""

    estimates: Annotated[list[dict], operator.add]
    """[{solver, x_hat, p, iterations, termination, wall_time, costs}]."""

    # ── Limites ───────────────────────────────────────────────────────────
    crb_laplacian: float
    crb_gaussian: float

    # ── Saída ─────────────────────────────────────────────────────────────
    rows: Annotated[list[ResultRow], operator.add]
    timings: Annotated[list[dict], operator.add]
    costs: Annotated[list[dict], operator.add]
    """Custo ℓp por iteração (só com record_costs): [{solver, trial, iteration, cost}]."""

    events: Annotated[list[dict], operator.add]
    """Log de cada nó: [{node, status, detail, timestamp}]."""
