"""
baseline.py
─────────────────────────────────────────────────────────────────────────────
Baselines clássicos dos experimentos com Fourier 2D:

  • gs   — Gerchberg–Saxton (error reduction): x ← A†(y⊙u), u ← e^{j∠(Ax)}.
           Algebricamente idêntico a alt_irls com p = 2; bit a bit só em
           operadores densos (o atalho de Gram diagonal arredonda diferente).
  • hio  — hybrid input-output de Fienup com restrição de suporte no grid
           sobreamostrado.

hio_grid devolve o grid P×Q completo para que uma execução possa ser
retomada (HIO com 10000 iterações = 5000 de inicialização + 5000).
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.fft
from numpy.typing import NDArray

from retrieval.linop import ComplexSignal, Fourier2dOperator, MeasurementOperator, as_signal
from retrieval.solver import u_step, x_step_irls

logger = logging.getLogger("phase_bench.baseline")

DEFAULT_BETA = 0.9


@dataclass(frozen=True, eq=False)
class SupportMask:
    """Grid booleano (forma do grid sobreamostrado) marcando a região do sinal."""

    grid: NDArray[np.bool_]

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=bool)
        if grid.ndim != 2:
            raise ValueError(f"Suporte deve ser 2-D, recebido ndim={grid.ndim}.")
        if not grid.any():
            raise ValueError("Suporte vazio: é preciso ao menos uma entrada verdadeira.")
        object.__setattr__(self, "grid", grid)

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    @property
    def origin(self) -> tuple[int, int]:
        """Canto superior esquerdo da caixa envolvente do suporte."""
        rows, cols = np.nonzero(self.grid)
        return int(rows.min()), int(cols.min())

    @property
    def extent(self) -> tuple[int, int]:
        """Altura e largura da caixa envolvente do suporte."""
        rows, cols = np.nonzero(self.grid)
        return int(rows.max() - rows.min() + 1), int(cols.max() - cols.min() + 1)

    @classmethod
    def top_left(cls, op2d: Fourier2dOperator) -> "SupportMask":
        """Suporte rows×cols no canto superior esquerdo, onde o zero-padding põe o sinal."""
        grid = np.zeros(op2d.padded_shape, dtype=bool)
        grid[: op2d.rows, : op2d.cols] = True
        return cls(grid)


def _phase(Z):
    mag = np.abs(Z)
    out = np.ones_like(Z)
    nz = mag > 0
    out[nz] = Z[nz] / mag[nz]
    return out


def project_magnitudes(spectrum, magnitudes) -> NDArray[np.complex128]:
    """Troca o módulo de `spectrum` por `magnitudes`, mantendo a fase (∠0 := 0)."""
    spectrum = np.asarray(spectrum, dtype=np.complex128)
    return np.asarray(magnitudes, dtype=np.float64) * _phase(spectrum)


# ─────────────────────────────────────────────────────────────────────────────
# Gerchberg–Saxton
# ─────────────────────────────────────────────────────────────────────────────

def gs(y, op: MeasurementOperator, x0, iters: int) -> ComplexSignal:
    """
    `iters` iterações de error reduction a partir de x0. O misfit
    ‖y − |Ax|‖ é não crescente.

    Para operadores com Aᴴ A diagonal (maskedDft, fourier2d) o passo de
    mínimos quadrados é Aᴴ(y⊙u)/diag(AᴴA); nos demais usa o QR de
    x_step_irls com pesos unitários. Só nesse segundo caso o resultado é
    igual bit a bit ao de alt_irls com p = 2; no atalho a diferença fica
    na ordem de 1e-14.

    Raises:
        RankDeficientError: se A não tiver posto coluna completo.
    """
    if iters < 0:
        raise ValueError(f"iters deve ser ≥ 0, recebido {iters}.")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    x = as_signal(x0, op.N, name="x0")
    gram = op.gram_diagonal()
    ones = np.ones(op.M)

    u = u_step(y, op, x)
    for _ in range(iters):
        if gram is None:
            x = x_step_irls(y, op, u, ones)
        else:
            x = op.adjoint(y * u) / gram
        u = u_step(y, op, x)
    return x


# ─────────────────────────────────────────────────────────────────────────────
# Hybrid input-output
# ─────────────────────────────────────────────────────────────────────────────

def _check_hio(op2d, support: SupportMask, beta: float) -> None:
    if not isinstance(op2d, Fourier2dOperator):
        raise ValueError(f"HIO exige operador fourier2d, recebido '{op2d.backend}'.")
    if support.shape != op2d.padded_shape:
        raise ValueError(
            f"Suporte {support.shape} incompatível com o grid {op2d.padded_shape}."
        )
    height, width = support.extent
    if height > op2d.rows or width > op2d.cols:
        raise ValueError(
            f"Suporte com extensão {support.extent} maior que a imagem {(op2d.rows, op2d.cols)}."
        )
    r0, c0 = support.origin
    P, Q = op2d.padded_shape
    if r0 + op2d.rows > P or c0 + op2d.cols > Q:
        raise ValueError(
            f"Janela {(op2d.rows, op2d.cols)} a partir de {support.origin} sai do grid {(P, Q)}."
        )
    if not 0 < beta < 1:
        raise ValueError(f"β deve estar em (0, 1), recebido {beta}.")


def hio_grid(
    y,
    op2d: Fourier2dOperator,
    support: SupportMask,
    beta: float = DEFAULT_BETA,
    iters: int = 5000,
    rng: Optional[np.random.Generator] = None,
    x0=None,
    init_grid=None,
    real: bool = False,
    nonnegative: bool = False,
) -> NDArray[np.complex128]:
    """
    HIO no grid sobreamostrado P×Q.

    Ponto de partida, em ordem: init_grid (retomada), x0 (zero-padded) ou
    espectro com o módulo medido e fase aleatória sorteada de `rng`.

    A cada iteração g' = IFFT(y·e^{j∠FFT(g)}); onde a restrição vale
    (suporte, e g' ≥ 0 se nonnegative) g ← g', no resto g ← g − βg'.
    Com real=True a parte imaginária de g' é descartada.
    """
    _check_hio(op2d, support, beta)
    P, Q = op2d.padded_shape
    magnitudes = np.asarray(y, dtype=np.float64).reshape(P, Q)

    if init_grid is not None:
        g = np.array(init_grid, dtype=np.complex128).reshape(P, Q)
    elif x0 is not None:
        g = op2d.pad(x0)
    else:
        if rng is None:
            raise ValueError("HIO sem ponto inicial exige um gerador `rng`.")
        phases = np.exp(2j * np.pi * rng.uniform(size=(P, Q)))
        g = scipy.fft.ifft2(magnitudes * phases)
    if real:
        g = np.real(g).astype(np.complex128)

    for _ in range(iters):
        g_proj = scipy.fft.ifft2(project_magnitudes(scipy.fft.fft2(g), magnitudes))
        if real:
            g_proj = np.real(g_proj).astype(np.complex128)
        accept = support.grid
        if nonnegative:
            accept = accept & (np.real(g_proj) >= 0)
        g = np.where(accept, g_proj, g - beta * g_proj)

    if not np.all(np.isfinite(g)):
        raise FloatingPointError("HIO divergiu: grid com valores não finitos.")
    logger.debug("hio: %d iterações, β=%.2f", iters, beta)
    return g


def restrict(op2d: Fourier2dOperator, support: SupportMask, grid) -> ComplexSignal:
    """
    Zera o grid fora do suporte e recorta a janela rows×cols que começa no
    canto da caixa envolvente do suporte (o canto superior esquerdo do
    grid quando o suporte é o de SupportMask.top_left).
    """
    _check_hio(op2d, support, DEFAULT_BETA)
    grid = np.asarray(grid, dtype=np.complex128).reshape(op2d.padded_shape)
    r0, c0 = support.origin
    window = np.where(support.grid, grid, 0)[r0 : r0 + op2d.rows, c0 : c0 + op2d.cols]
    return window.reshape(-1).copy()


def hio(
    y,
    op2d: Fourier2dOperator,
    support: SupportMask,
    beta: float = DEFAULT_BETA,
    iters: int = 5000,
    rng: Optional[np.random.Generator] = None,
    **kwargs,
) -> ComplexSignal:
    """HIO com a estimativa final restrita ao suporte (vetor de comprimento N)."""
    grid = hio_grid(y, op2d, support, beta=beta, iters=iters, rng=rng, **kwargs)
    return restrict(op2d, support, grid)


__all__ = [
    "SupportMask",
    "DEFAULT_BETA",
    "project_magnitudes",
    "gs",
    "hio_grid",
    "hio",
    "restrict",
]
