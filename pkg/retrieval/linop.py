"""
linop.py
─────────────────────────────────────────────────────────────────────────────
Operadores de medição y = |A x| do benchmark de phase retrieval.

Backends disponíveis:
  • dense      — matriz M×N complexa explícita
  • maskedDft  — coded diffraction patterns: K blocos D·Λ_k empilhados,
                 D = DFT de N pontos NÃO normalizada (D Dᴴ = N·I)
  • fourier2d  — zero-padding do grid rows×cols no canto superior
                 esquerdo de (f·rows)×(f·cols) seguido da DFT 2D

Convenções:
  • Sinal da DFT: e^{-j2πkn/N} (o mesmo do scipy.fft). Os resultados do
    benchmark são invariantes a essa escolha desde que seja usada em
    forward e adjoint de forma consistente.
  • Operadores são imutáveis: as máscaras são sorteadas uma única vez na
    construção, a partir do gerador com seed da configuração.
  • forward/adjoint são funções puras; um operador pode ser compartilhado
    entre trials concorrentes.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.fft
import scipy.linalg
from numpy.typing import NDArray

from retrieval.errors import DimensionError

logger = logging.getLogger("phase_bench.linop")

ComplexSignal = NDArray[np.complex128]
"""Vetor complexo de comprimento N (o sinal x ou uma estimativa)."""


# ─────────────────────────────────────────────────────────────────────────────
# Helpers de validação
# ─────────────────────────────────────────────────────────────────────────────

def as_signal(x, length: Optional[int] = None, *, name: str = "x") -> ComplexSignal:
    """
    Converte para vetor complexo 1-D e valida comprimento e finitude.

    Levanta DimensionError se o comprimento não bater e ValueError se
    houver NaN/Inf ou se o vetor for vazio.
    """
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size == 0:
        raise ValueError(f"'{name}' vazio: é preciso N ≥ 1.")
    if length is not None and arr.size != length:
        raise DimensionError(
            f"'{name}' tem comprimento {arr.size}, esperado {length}."
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"'{name}' contém valores não finitos.")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.flags.writeable = False
    return out


# ─────────────────────────────────────────────────────────────────────────────
# Lei das máscaras (b1·b2)
# ─────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MaskLaw:
    """
    Distribuição das entradas diagonais de Λ_k: produto de dois fatores
    independentes b1 (fase) e b2 (magnitude).
    """

    b1_values: tuple[complex, ...] = (1, -1, 1j, -1j)
    b1_probs: tuple[float, ...] = (0.25, 0.25, 0.25, 0.25)
    b2_values: tuple[float, ...] = (np.sqrt(2) / 2, np.sqrt(3))
    b2_probs: tuple[float, ...] = (0.8, 0.2)

    def __post_init__(self) -> None:
        for values, probs, label in (
            (self.b1_values, self.b1_probs, "b1"),
            (self.b2_values, self.b2_probs, "b2"),
        ):
            if len(values) != len(probs) or not values:
                raise ValueError(f"Lei {label}: valores e probabilidades desalinhados.")
            if any(p < 0 for p in probs) or not np.isclose(sum(probs), 1.0, atol=1e-12):
                raise ValueError(f"Lei {label}: probabilidades devem somar 1.")

    def sample(self, rng: np.random.Generator, shape) -> NDArray[np.complex128]:
        b1 = rng.choice(np.asarray(self.b1_values, dtype=np.complex128), size=shape, p=self.b1_probs)
        b2 = rng.choice(np.asarray(self.b2_values, dtype=np.float64), size=shape, p=self.b2_probs)
        return b1 * b2


DEFAULT_MASK_LAW = MaskLaw()


# ─────────────────────────────────────────────────────────────────────────────
# Operadores
# ─────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class MeasurementOperator(ABC):
    """
    Mapa linear x ↦ A x (a_mᴴ x, m = 1..M) com adjunto exato.

    Subclasses implementam _forward/_adjoint; a validação de dimensões e a
    restrição a um subconjunto de linhas (blocos Γ_l) ficam aqui.
    """

    @property
    @abstractmethod
    def backend(self) -> str: ...

    @property
    @abstractmethod
    def shape(self) -> tuple[int, int]: ...

    @property
    def M(self) -> int:
        return self.shape[0]

    @property
    def N(self) -> int:
        return self.shape[1]

    @abstractmethod
    def _forward(self, x: ComplexSignal) -> NDArray[np.complex128]: ...

    @abstractmethod
    def _adjoint(self, v: NDArray[np.complex128]) -> ComplexSignal: ...

    def forward(self, x) -> NDArray[np.complex128]:
        return self._forward(as_signal(x, self.N))

    def adjoint(self, v) -> ComplexSignal:
        return self._adjoint(as_signal(v, self.M, name="v"))

    def forward_rows(self, x, rows: NDArray[np.intp]) -> NDArray[np.complex128]:
        """A_Γ x para o bloco de linhas Γ."""
        return self.forward(x)[rows]

    def adjoint_rows(self, v, rows: NDArray[np.intp]) -> ComplexSignal:
        """A_Γᴴ v: v é espalhado nas linhas Γ e o resto fica zero."""
        v = as_signal(v, len(rows), name="v")
        full = np.zeros(self.M, dtype=np.complex128)
        full[rows] = v
        return self._adjoint(full)

    @cached_property
    def dense(self) -> NDArray[np.complex128]:
        """Matriz A materializada (N aplicações de forward)."""
        eye = np.eye(self.N, dtype=np.complex128)
        mat = np.column_stack([self._forward(eye[:, n]) for n in range(self.N)])
        return _frozen(mat)

    def matrix(self) -> NDArray[np.complex128]:
        return self.dense

    def gram_diagonal(self) -> Optional[NDArray[np.float64]]:
        """Diagonal de Aᴴ A quando ela é diagonal; None caso contrário."""
        return None


@dataclass(frozen=True, eq=False)
class DenseOperator(MeasurementOperator):
    values: NDArray[np.complex128] = field(repr=False)

    @property
    def backend(self) -> str:
        return "dense"

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def _forward(self, x):
        return self.values @ x

    def _adjoint(self, v):
        return self.values.conj().T @ v

    def forward_rows(self, x, rows):
        return self.values[rows] @ as_signal(x, self.N)

    def adjoint_rows(self, v, rows):
        return self.values[rows].conj().T @ as_signal(v, len(rows), name="v")

    def matrix(self):
        return self.values


@dataclass(frozen=True, eq=False)
class MaskedDftOperator(MeasurementOperator):
    masks: NDArray[np.complex128] = field(repr=False)
    """Array K×N: linha k é a diagonal de Λ_k."""

    @property
    def backend(self) -> str:
        return "maskedDft"

    @property
    def K(self) -> int:
        return self.masks.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        K, N = self.masks.shape
        return K * N, N

    def _forward(self, x):
        return scipy.fft.fft(self.masks * x[None, :], axis=1).reshape(-1)

    def _adjoint(self, v):
        blocks = v.reshape(self.masks.shape)
        # Dᴴ v = N·ifft(v) na normalização não unitária
        back = self.N * scipy.fft.ifft(blocks, axis=1)
        return np.sum(self.masks.conj() * back, axis=0)

    @cached_property
    def dense(self):
        D = scipy.linalg.dft(self.N)
        return _frozen(np.vstack([D * mask[None, :] for mask in self.masks]))

    def gram_diagonal(self):
        # Aᴴ A = Σ_k Λ_kᴴ Dᴴ D Λ_k = N·Σ_k |Λ_k|²
        return self.N * np.sum(np.abs(self.masks) ** 2, axis=0)


@dataclass(frozen=True, eq=False)
class Fourier2dOperator(MeasurementOperator):
    rows: int
    cols: int
    factor: int = 2

    @property
    def backend(self) -> str:
        return "fourier2d"

    @property
    def padded_shape(self) -> tuple[int, int]:
        return self.factor * self.rows, self.factor * self.cols

    @property
    def shape(self) -> tuple[int, int]:
        P, Q = self.padded_shape
        return P * Q, self.rows * self.cols

    def _forward(self, x):
        grid = x.reshape(self.rows, self.cols)
        # s= faz o zero-padding no fim de cada eixo (canto superior esquerdo)
        return scipy.fft.fft2(grid, s=self.padded_shape).reshape(-1)

    def _adjoint(self, v):
        P, Q = self.padded_shape
        back = P * Q * scipy.fft.ifft2(v.reshape(P, Q))
        return back[: self.rows, : self.cols].reshape(-1)

    def gram_diagonal(self):
        P, Q = self.padded_shape
        return np.full(self.N, float(P * Q))

    def pad(self, x) -> NDArray[np.complex128]:
        """Sinal de comprimento N → grid P×Q com zero-padding."""
        grid = np.zeros(self.padded_shape, dtype=np.complex128)
        grid[: self.rows, : self.cols] = as_signal(x, self.N).reshape(self.rows, self.cols)
        return grid

    def crop(self, grid) -> ComplexSignal:
        """Grid P×Q → sinal de comprimento N (região do sinal)."""
        grid = np.asarray(grid, dtype=np.complex128).reshape(self.padded_shape)
        return grid[: self.rows, : self.cols].reshape(-1).copy()


# ─────────────────────────────────────────────────────────────────────────────
# Construtores
# ─────────────────────────────────────────────────────────────────────────────

def make_dense(matrix) -> DenseOperator:
    """Operador denso: forward(x) = matrix·x."""
    mat = np.asarray(matrix, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
        raise ValueError(f"Matriz deve ser 2-D com M, N ≥ 1; recebido shape {mat.shape}.")
    if not np.all(np.isfinite(mat)):
        raise ValueError("Matriz de medição contém valores não finitos.")
    return DenseOperator(values=_frozen(mat))


def make_gaussian(M: int, N: int, rng: np.random.Generator) -> DenseOperator:
    """Matriz densa com entradas i.i.d. CN(0, 1)."""
    if M < 1 or N < 1:
        raise ValueError(f"M e N devem ser ≥ 1 (M={M}, N={N}).")
    mat = (rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N))) / np.sqrt(2)
    return make_dense(mat)


def make_masked_dft(
    N: int,
    K: int,
    rng: np.random.Generator,
    law: MaskLaw = DEFAULT_MASK_LAW,
) -> MaskedDftOperator:
    """
    Ensemble CDP: A = [(DΛ_1)ᵀ ⋯ (DΛ_K)ᵀ]ᵀ com M = K·N.

    Args:
        N:   Comprimento do sinal.
        K:   Número de máscaras.
        rng: Gerador com seed; as máscaras são sorteadas aqui e guardadas.
        law: Lei das entradas diagonais (padrão: b1·b2).
    """
    if N < 1 or K < 1:
        raise ValueError(f"N e K devem ser ≥ 1 (N={N}, K={K}).")
    masks = law.sample(rng, (K, N))
    logger.debug("maskedDft: N=%d K=%d M=%d", N, K, K * N)
    return MaskedDftOperator(masks=_frozen(masks))


def make_fourier2d(rows: int, cols: int, factor: int = 2) -> Fourier2dOperator:
    """DFT 2D sobreamostrada por `factor` (padrão 2×) via FFT, sem Kronecker."""
    if rows < 1 or cols < 1:
        raise ValueError(f"Grid inválido: {rows}×{cols}.")
    if int(factor) != factor or factor < 1:
        raise ValueError(f"Fator de sobreamostragem deve ser inteiro ≥ 1, recebido {factor}.")
    return Fourier2dOperator(rows=int(rows), cols=int(cols), factor=int(factor))


# ─────────────────────────────────────────────────────────────────────────────
# API funcional
# ─────────────────────────────────────────────────────────────────────────────

def forward(op: MeasurementOperator, x) -> NDArray[np.complex128]:
    return op.forward(x)


def adjoint(op: MeasurementOperator, v) -> ComplexSignal:
    return op.adjoint(v)


def magnitudes(op: MeasurementOperator, x) -> NDArray[np.float64]:
    """|A x| elemento a elemento."""
    return np.abs(op.forward(x))


__all__ = [
    "ComplexSignal",
    "MaskLaw",
    "DEFAULT_MASK_LAW",
    "MeasurementOperator",
    "DenseOperator",
    "MaskedDftOperator",
    "Fourier2dOperator",
    "as_signal",
    "make_dense",
    "make_gaussian",
    "make_masked_dft",
    "make_fourier2d",
    "forward",
    "adjoint",
    "magnitudes",
]
