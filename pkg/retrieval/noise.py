"""
noise.py
─────────────────────────────────────────────────────────────────────────────
Geradores de ruído de cauda pesada para o modelo y = |A x| + n.

Modelos (NoiseModel):
  • Laplacian(sigma)                 — variância sigma²
  • AlphaStable(alpha, beta, gamma, mu) — Chambers–Mallows–Stuck
  • Gmm(c, var)                      — mistura de duas gaussianas centradas
  • Gaussian(sigma)                  — referência gaussiana
  • Outliers(fraction, variance)     — impulsos esparsos, resto zero

O ruído é real (somado às magnitudes). Cada trial Monte-Carlo passa o
seu próprio gerador; os samplers não têm estado.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

logger = logging.getLogger("phase_bench.noise")


# ─────────────────────────────────────────────────────────────────────────────
# Modelos
# ─────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Laplacian:
    """Densidade (1/(√2σ))·exp(−√2|n|/σ), variância σ²."""

    sigma: float = 1.0
    kind = "laplacian"

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"Laplaciano: sigma deve ser > 0, recebido {self.sigma}.")

    def sample(self, M: int, rng: np.random.Generator) -> NDArray[np.float64]:
        # escala b da parametrização clássica: variância 2b² = σ²
        return rng.laplace(0.0, self.sigma / math.sqrt(2.0), size=M)


@dataclass(frozen=True)
class AlphaStable:
    """
    Lei α-estável com função característica
    exp(jtμ − γ^α|t|^α (1 − jβ sgn(t) tan(απ/2))).
    """

    alpha: float = 0.8
    beta: float = 0.0
    gamma: float = 2.0
    mu: float = 0.0
    kind = "alphaStable"

    def __post_init__(self) -> None:
        if not 0 < self.alpha <= 2:
            raise ValueError(f"α-estável: alpha ∈ (0, 2], recebido {self.alpha}.")
        if not -1 <= self.beta <= 1:
            raise ValueError(f"α-estável: beta ∈ [−1, 1], recebido {self.beta}.")
        if not self.gamma > 0:
            raise ValueError(f"α-estável: gamma deve ser > 0, recebido {self.gamma}.")

    def sample(self, M: int, rng: np.random.Generator) -> NDArray[np.float64]:
        a, b = self.alpha, self.beta
        V = rng.uniform(-np.pi / 2, np.pi / 2, size=M)
        W = rng.exponential(1.0, size=M)

        if a == 1.0:
            half_pi_bv = np.pi / 2 + b * V
            X = (2 / np.pi) * (
                half_pi_bv * np.tan(V)
                - b * np.log((np.pi / 2) * W * np.cos(V) / half_pi_bv)
            )
            return self.gamma * X + (2 / np.pi) * b * self.gamma * np.log(self.gamma) + self.mu

        zeta = b * np.tan(np.pi * a / 2)
        B = np.arctan(zeta) / a
        S = (1 + zeta ** 2) ** (1 / (2 * a))
        X = (
            S * np.sin(a * (V + B)) / np.cos(V) ** (1 / a)
            * (np.cos(V - a * (V + B)) / W) ** ((1 - a) / a)
        )
        return self.gamma * X + self.mu


@dataclass(frozen=True)
class Gmm:
    """Mistura de duas gaussianas centradas: componente 2 = outliers."""

    c: tuple[float, float] = (0.9, 0.1)
    var: tuple[float, float] = (0.1, 100.0)
    kind = "gmm"

    def __post_init__(self) -> None:
        if len(self.c) != 2 or len(self.var) != 2:
            raise ValueError("GMM: exatamente duas componentes.")
        if any(not 0 <= ci <= 1 for ci in self.c) or not math.isclose(sum(self.c), 1.0, abs_tol=1e-12):
            raise ValueError(f"GMM: probabilidades em [0, 1] somando 1, recebido {self.c}.")
        if any(v < 0 for v in self.var):
            raise ValueError(f"GMM: variâncias devem ser ≥ 0, recebido {self.var}.")

    def sample(self, M: int, rng: np.random.Generator) -> NDArray[np.float64]:
        comp = rng.choice(2, size=M, p=list(self.c))
        std = np.sqrt(np.asarray(self.var, dtype=np.float64))[comp]
        return std * rng.standard_normal(M)


@dataclass(frozen=True)
class Gaussian:
    sigma: float = 1.0
    kind = "gaussian"

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"Gaussiano: sigma deve ser > 0, recebido {self.sigma}.")

    def sample(self, M: int, rng: np.random.Generator) -> NDArray[np.float64]:
        return self.sigma * rng.standard_normal(M)


@dataclass(frozen=True)
class Outliers:
    """Fração `fraction` das posições com N(0, variance); demais zero."""

    fraction: float = 0.1
    variance: float = 100.0
    kind = "outliers"

    def __post_init__(self) -> None:
        if not 0 <= self.fraction <= 1:
            raise ValueError(f"Outliers: fração em [0, 1], recebido {self.fraction}.")
        if self.variance < 0:
            raise ValueError(f"Outliers: variância deve ser ≥ 0, recebido {self.variance}.")

    def sample(self, M: int, rng: np.random.Generator) -> NDArray[np.float64]:
        return sparse_outliers(self.fraction, self.variance, M, rng)


NoiseModel = Union[Laplacian, AlphaStable, Gmm, Gaussian, Outliers]


# ─────────────────────────────────────────────────────────────────────────────
# Operações
# ─────────────────────────────────────────────────────────────────────────────

def sample(model: NoiseModel, M: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """M amostras i.i.d. do modelo."""
    if M < 0:
        raise ValueError(f"Número de amostras inválido: {M}.")
    return np.asarray(model.sample(M, rng), dtype=np.float64)


def outlier_count(fraction: float, M: int) -> int:
    """⌊fraction·M⌉ com empate arredondado para longe de zero."""
    return int(math.floor(fraction * M + 0.5))


def sparse_outliers(
    fraction: float,
    variance: float,
    M: int,
    rng: np.random.Generator,
) -> NDArray[np.float64]:
    if not 0 <= fraction <= 1:
        raise ValueError(f"Fração de outliers fora de [0, 1]: {fraction}.")
    n = np.zeros(M, dtype=np.float64)
    count = outlier_count(fraction, M)
    if count:
        pos = rng.choice(M, size=count, replace=False)
        n[pos] = math.sqrt(variance) * rng.standard_normal(count)
    return n


def scale_to_snr(noise, clean, snr_db: float) -> NDArray[np.float64]:
    """
    Reescala `noise` para que 10·log10(‖clean‖²/‖n‖²) = snr_db nesta
    realização. A direção do ruído é preservada.

    Raises:
        ValueError: se `clean` for o vetor nulo.
    """
    noise = np.asarray(noise, dtype=np.float64)
    clean_norm = float(np.linalg.norm(clean))
    if clean_norm == 0.0:
        raise ValueError("SNR indefinida: sinal limpo A x é nulo.")
    noise_norm = float(np.linalg.norm(noise))
    if noise_norm == 0.0:
        logger.warning("Ruído identicamente nulo: SNR infinita, nada a escalar.")
        return noise.copy()
    target = clean_norm / 10 ** (snr_db / 20)
    return noise * (target / noise_norm)


__all__ = [
    "Laplacian",
    "AlphaStable",
    "Gmm",
    "Gaussian",
    "Outliers",
    "NoiseModel",
    "sample",
    "outlier_count",
    "sparse_outliers",
    "scale_to_snr",
]
