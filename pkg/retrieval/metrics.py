"""
metrics.py
─────────────────────────────────────────────────────────────────────────────
Métricas de avaliação: erro sem ambiguidade de fase global, MSE em dB,
taxa de sucesso e SNR realizada.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from retrieval.errors import DimensionError

SUCCESS_THRESHOLD = 1e-4


def _pair(x_hat, x_true) -> tuple[np.ndarray, np.ndarray]:
    x_hat = np.asarray(x_hat, dtype=np.complex128).reshape(-1)
    x_true = np.asarray(x_true, dtype=np.complex128).reshape(-1)
    if x_hat.size != x_true.size:
        raise DimensionError(
            f"Estimativa com comprimento {x_hat.size}, sinal verdadeiro com {x_true.size}."
        )
    return x_hat, x_true


def aligned_error(x_hat, x_true) -> float:
    """min_φ ‖x̂ − e^{jφ}x‖², com φ* = ∠(xᴴ x̂)."""
    x_hat, x_true = _pair(x_hat, x_true)
    if not np.any(x_true):
        raise ValueError("Sinal verdadeiro nulo: fase de alinhamento indefinida.")
    inner = np.vdot(x_true, x_hat)
    rotation = inner / abs(inner) if inner != 0 else 1.0
    return float(np.sum(np.abs(x_hat - rotation * x_true) ** 2))


def aligned_error_twin(x_hat, x_true, shape: tuple[int, int]) -> float:
    """
    Erro alinhado para imagens sob magnitudes de Fourier 2D: mínimo entre
    x e o seu gêmeo conjugado e espelhado, que gera as mesmas magnitudes
    com suporte no canto superior esquerdo (a menos de um deslocamento
    circular que o recorte remove).
    """
    x_hat, x_true = _pair(x_hat, x_true)
    twin = np.conj(x_true.reshape(shape)[::-1, ::-1]).reshape(-1)
    return min(aligned_error(x_hat, x_true), aligned_error(x_hat, twin))


def mse_db(errors: Iterable[float]) -> float:
    """10·log10(média dos erros)."""
    arr = np.asarray(list(errors), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("mse_db: lista de erros vazia.")
    mean = float(np.mean(arr))
    return 10 * math.log10(mean) if mean > 0 else -math.inf


def error_db(error: float) -> float:
    """Erro de um trial em dB (valores para histogramas)."""
    return 10 * math.log10(error) if error > 0 else -math.inf


def success_rate(errors: Iterable[float], threshold: float = SUCCESS_THRESHOLD) -> float:
    """Fração de trials com erro ≤ threshold (inclusivo)."""
    arr = np.asarray(list(errors), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("success_rate: lista de erros vazia.")
    return float(np.mean(arr <= threshold))


def realized_snr_db(clean, noise) -> float:
    """10·log10(‖Ax‖²/‖n‖²)."""
    clean_energy = float(np.sum(np.abs(np.asarray(clean)) ** 2))
    noise_energy = float(np.sum(np.abs(np.asarray(noise)) ** 2))
    if clean_energy == 0 or noise_energy == 0:
        raise ValueError("SNR indefinida: sinal limpo ou ruído nulo.")
    return 10 * math.log10(clean_energy / noise_energy)


def relative_misfit(y, magnitudes) -> float:
    """‖y − |Ax̂|‖ / ‖y‖."""
    y = np.asarray(y, dtype=np.float64)
    norm = float(np.linalg.norm(y))
    if norm == 0:
        raise ValueError("Misfit relativo indefinido para y nulo.")
    return float(np.linalg.norm(y - np.asarray(magnitudes, dtype=np.float64))) / norm


__all__ = [
    "SUCCESS_THRESHOLD",
    "aligned_error",
    "aligned_error_twin",
    "mse_db",
    "error_db",
    "success_rate",
    "realized_snr_db",
    "relative_misfit",
]
