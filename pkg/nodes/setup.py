"""
setup.py
─────────────────────────────────────────────────────────────────────────────
Nó setup: sorteia o problema de um trial.

  1. Deriva geradores independentes de SeedSequence((mestre, grid, trial))
  2. Constrói o sinal x e o operador A
  3. Sorteia o ruído, escala para a SNR do ponto do grid e forma
     y = |A x| + n
  4. Decide o próximo nó (crb_table vai direto para bound)
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from nodes.router import record_event
from retrieval import noise as noise_models
from retrieval.crb import noise_variance_for_snr
from retrieval.linop import (
    MeasurementOperator,
    make_fourier2d,
    make_gaussian,
    make_masked_dft,
)
from retrieval.metrics import realized_snr_db
from state import GridPoint, TrialState

logger = logging.getLogger("phase_bench.setup")

STREAMS = ("operator", "signal", "noise", "init", "solver")

# x_t = exp(j·0.16π·t), t = 1..N
EXPONENTIAL_RATE = 0.16 * math.pi


def trial_streams(seed: tuple[int, ...]) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(list(seed)).spawn(len(STREAMS))
    return {name: np.random.default_rng(child) for name, child in zip(STREAMS, children)}


def make_signal(experiment, rng: np.random.Generator) -> np.ndarray:
    if experiment.signal == "exponential":
        t = np.arange(1, experiment.signal_length + 1)
        return np.exp(1j * EXPONENTIAL_RATE * t)
    if experiment.signal == "gaussian":
        N = experiment.signal_length
        return (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / math.sqrt(2)
    # imagem real rows×cols, vetorizada por linhas
    size = experiment.image_size
    return rng.standard_normal((size, size)).reshape(-1).astype(np.complex128)


def make_operator(experiment, point: GridPoint, rng: np.random.Generator) -> MeasurementOperator:
    N = experiment.signal_size
    if experiment.operator == "masked_dft":
        return make_masked_dft(N, int(round(point["ratio"])), rng)
    if experiment.operator == "gaussian":
        return make_gaussian(int(round(point["ratio"] * N)), N, rng)
    return make_fourier2d(experiment.image_size, experiment.image_size, experiment.oversampling)


def make_noise_model(experiment, point: GridPoint) -> Optional[noise_models.NoiseModel]:
    kind = experiment.noise
    fraction = point["outlier_fraction"]
    if kind == "laplacian":
        return noise_models.Laplacian(1.0)
    if kind == "gaussian":
        return noise_models.Gaussian(1.0)
    if kind == "alpha_stable":
        return noise_models.AlphaStable(experiment.alpha, experiment.stable_beta, experiment.gamma)
    if kind == "gmm":
        return noise_models.Gmm(
            c=(1.0 - fraction, fraction),
            var=(experiment.gmm_var1, experiment.gmm_var2),
        )
    if kind == "outliers":
        return noise_models.Outliers(fraction, experiment.outlier_variance)
    return None


def draw_noise(experiment, point: GridPoint, clean: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Ruído do trial. Com noise_scaling="snr" o vetor inteiro é escalado para
    a SNR do ponto (a SNR prevalece sobre as variâncias do arquivo); com
    "fixed" as variâncias de GMM/outliers ficam como configuradas.
    """
    model = make_noise_model(experiment, point)
    if model is None:
        return np.zeros(clean.size)
    raw = noise_models.sample(model, clean.size, rng)
    if experiment.noise_scaling == "fixed":
        return raw
    return noise_models.scale_to_snr(raw, clean, point["snr_db"])


def setup_node(state: TrialState) -> dict:
    experiment = state["experiment"]
    point = state["grid_point"]
    streams = trial_streams(state["seed"])

    x_true = make_signal(experiment, streams["signal"])
    op = make_operator(experiment, point, streams["operator"])
    clean = op.forward(x_true)
    n = draw_noise(experiment, point, clean, streams["noise"])
    y = np.abs(clean) + n

    noise_variance = None
    if experiment.noise in ("laplacian", "gaussian"):
        noise_variance = noise_variance_for_snr(op, x_true, point["snr_db"])

    next_node = "bound" if experiment.scenario == "crb_table" else "initialize"

    if np.any(n):
        detail = f"M={op.M} N={op.N} SNR realizada={realized_snr_db(clean, n):.2f} dB"
    else:
        detail = f"M={op.M} N={op.N} sem ruído"
    logger.debug("trial (%d, %d): %s", state["grid_index"], state["trial"], detail)

    return {
        "streams":        streams,
        "operator":       op,
        "x_true":         x_true,
        "clean":          clean,
        "y":              y,
        "noise_variance": noise_variance,
        "next_node":      next_node,
        **record_event(state, "setup", detail),
    }


__all__ = [
    "setup_node",
    "trial_streams",
    "make_signal",
    "make_operator",
    "make_noise_model",
    "draw_noise",
]
