"""
crb.py
─────────────────────────────────────────────────────────────────────────────
Informação de Fisher e limite de Cramér–Rao para y = |A x| + n.

Montagem estruturada (nunca por laços entrada a entrada):

    B = Aᴴ diag(A x)                     (N×M)
    G = [Re B; Im B]                     (2N×M, β = (Re x, Im x))
    F = (c/σ²) · G diag(|A x|⁻²) Gᵀ

com c = 2 para ruído laplaciano e c = 1 para gaussiano.

Parametrizações:
  • cartesian_complex — 2N×2N, posto 2N−1 (fase global não identificável)
  • cartesian_real    — N×N, G = Re B, posto completo
  • amplitude_phase   — (|x|, ∠x): B' = diag(x*) B,
                        G = [diag(|x|)⁻¹ Re B'; Im B'], posto 2N−1

A pseudo-inversa descarta valores singulares abaixo de 1e-10·σ_max; um
posto diferente do esperado é erro, não truncamento silencioso.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from retrieval.errors import NonDifferentiableError, RankDiagnosticError
from retrieval.linop import MeasurementOperator, as_signal

logger = logging.getLogger("phase_bench.crb")

Parameterization = Literal["cartesian_complex", "cartesian_real", "amplitude_phase"]
NoiseTag = Literal["laplacian", "gaussian"]

# |a_mᴴ x| abaixo disso torna |·| não diferenciável em x
NONDIFF_TOL = 1e-12
RANK_RTOL = 1e-10

_INFORMATION = {"laplacian": 2.0, "gaussian": 1.0}


@dataclass(frozen=True, eq=False)
class FimMatrix:
    entries: NDArray[np.float64]
    parameterization: Parameterization
    noise_variance: float
    noise: NoiseTag = "laplacian"

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def expected_rank(self) -> int:
        if self.parameterization == "cartesian_real":
            return self.size
        return self.size - 1


@dataclass(frozen=True)
class CrbReport:
    bound_total: float
    per_parameter: NDArray[np.float64]
    rank: int
    parameterization: Parameterization
    noise: NoiseTag

    def split(self) -> tuple[float, float]:
        """(primeira metade, segunda metade) de per_parameter: (Re, Im) ou (|x|, ∠x)."""
        if self.parameterization == "cartesian_real":
            raise ValueError("Parametrização real não tem duas metades.")
        half = len(self.per_parameter) // 2
        return float(np.sum(self.per_parameter[:half])), float(np.sum(self.per_parameter[half:]))


@dataclass(frozen=True)
class RankReport:
    rank: int
    null_basis: NDArray[np.float64]
    """Colunas ortonormais que geram o núcleo numérico."""
    singular_values: NDArray[np.float64]


# ─────────────────────────────────────────────────────────────────────────────
# Montagem
# ─────────────────────────────────────────────────────────────────────────────

def _measurements(op: MeasurementOperator, x) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """(x validado, z = A x) com a checagem de diferenciabilidade."""
    x = as_signal(x, op.N)
    z = op.forward(x)
    mag = np.abs(z)
    bad = np.flatnonzero(mag <= NONDIFF_TOL)
    if bad.size:
        index = int(bad[0])
        raise NonDifferentiableError(
            f"FIM indefinida: |a_mᴴ x| = {mag[index]:.3e} em m={index} "
            f"({bad.size} medições nulas).",
            index=index,
        )
    return x, z


def _assemble(G: NDArray[np.float64], z, sigma2: float, noise: NoiseTag) -> NDArray[np.float64]:
    if not sigma2 > 0:
        raise ValueError(f"Variância do ruído deve ser > 0, recebido {sigma2}.")
    scaled = G / np.abs(z)[None, :]
    F = (_INFORMATION[noise] / sigma2) * (scaled @ scaled.T)
    return (F + F.T) / 2


def _cartesian_G(op: MeasurementOperator, x, real: bool) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    x, z = _measurements(op, x)
    B = op.matrix().conj().T * z[None, :]
    if real:
        return np.real(B), z
    return np.vstack([np.real(B), np.imag(B)]), z


def fim_laplacian_complex(op: MeasurementOperator, x, noise_variance: float) -> FimMatrix:
    """FIM 2N×2N em β = (Re x, Im x) sob ruído laplaciano de variância σ²."""
    G, z = _cartesian_G(op, x, real=False)
    return FimMatrix(_assemble(G, z, noise_variance, "laplacian"), "cartesian_complex", noise_variance)


def fim_laplacian_real(op: MeasurementOperator, x, noise_variance: float) -> FimMatrix:
    """FIM N×N para x real (A pode ser complexa)."""
    x = np.asarray(x)
    if np.iscomplexobj(x) and np.any(np.imag(x) != 0):
        raise ValueError("fim_laplacian_real exige x real.")
    G, z = _cartesian_G(op, np.real(x), real=True)
    return FimMatrix(_assemble(G, z, noise_variance, "laplacian"), "cartesian_real", noise_variance)


def fim_gaussian(op: MeasurementOperator, x, noise_variance: float, real: bool = False) -> FimMatrix:
    """Mesma montagem com σ⁻² no lugar de 2σ⁻² (ruído gaussiano)."""
    G, z = _cartesian_G(op, x, real=real)
    param: Parameterization = "cartesian_real" if real else "cartesian_complex"
    return FimMatrix(_assemble(G, z, noise_variance, "gaussian"), param, noise_variance, noise="gaussian")


def fim_amplitude_phase(op: MeasurementOperator, x, noise_variance: float) -> FimMatrix:
    """FIM 2N×2N em (|x|, ∠x); exige x_i ≠ 0 para todo i."""
    x, z = _measurements(op, x)
    amp = np.abs(x)
    zeros = np.flatnonzero(amp == 0)
    if zeros.size:
        raise ValueError(f"Parametrização amplitude/fase exige x_i ≠ 0; nulo em i={int(zeros[0])}.")
    B = x.conj()[:, None] * (op.matrix().conj().T * z[None, :])
    G = np.vstack([np.real(B) / amp[:, None], np.imag(B)])
    return FimMatrix(_assemble(G, z, noise_variance, "laplacian"), "amplitude_phase", noise_variance)


# ─────────────────────────────────────────────────────────────────────────────
# Posto e limites
# ─────────────────────────────────────────────────────────────────────────────

def rank_diagnostics(fim: Union[FimMatrix, NDArray[np.float64]], rtol: float = RANK_RTOL) -> RankReport:
    """Posto numérico por SVD (σ < rtol·σ_max conta como zero) e base do núcleo."""
    F = fim.entries if isinstance(fim, FimMatrix) else np.asarray(fim, dtype=np.float64)
    _, s, Vh = scipy.linalg.svd(F)
    threshold = rtol * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > threshold))
    return RankReport(rank=rank, null_basis=Vh[rank:].T.copy(), singular_values=s)


def crb(fim: FimMatrix) -> CrbReport:
    """trace(F†) (ou trace(F⁻¹) no caso real) com o posto verificado."""
    diag = rank_diagnostics(fim)
    expected = fim.expected_rank
    if diag.rank != expected:
        raise RankDiagnosticError(
            f"FIM {fim.parameterization} com posto {diag.rank}, esperado {expected} "
            f"(σ_min/σ_max = {diag.singular_values[-1] / diag.singular_values[0]:.3e}).",
            rank=diag.rank,
            expected=expected,
        )

    if fim.parameterization == "cartesian_real":
        inverse = scipy.linalg.inv(fim.entries)
    else:
        U, s, Vh = scipy.linalg.svd(fim.entries)
        inv_s = np.zeros_like(s)
        inv_s[:expected] = 1.0 / s[:expected]
        inverse = (Vh.T * inv_s[None, :]) @ U.T

    per_parameter = np.clip(np.diag(inverse).copy(), 0.0, None)
    return CrbReport(
        bound_total=float(np.sum(per_parameter)),
        per_parameter=per_parameter,
        rank=diag.rank,
        parameterization=fim.parameterization,
        noise=fim.noise,
    )


def crb_laplacian(fim: FimMatrix) -> CrbReport:
    if fim.noise != "laplacian":
        raise ValueError(f"crb_laplacian recebeu FIM de ruído '{fim.noise}'.")
    return crb(fim)


def crb_gaussian(laplacian: Union[FimMatrix, CrbReport]) -> CrbReport:
    """Limite gaussiano = 2 × limite laplaciano, em todas as parametrizações."""
    report = crb_laplacian(laplacian) if isinstance(laplacian, FimMatrix) else laplacian
    if report.noise != "laplacian":
        raise ValueError("crb_gaussian espera um relatório laplaciano.")
    per_parameter = 2.0 * report.per_parameter
    return CrbReport(
        bound_total=float(np.sum(per_parameter)),
        per_parameter=per_parameter,
        rank=report.rank,
        parameterization=report.parameterization,
        noise="gaussian",
    )


def amplitude_phase_split(report: CrbReport) -> tuple[float, float]:
    """(limite da amplitude, limite da fase) de um relatório amplitude_phase."""
    if report.parameterization != "amplitude_phase":
        raise ValueError(f"Relatório '{report.parameterization}' não é amplitude/fase.")
    return report.split()


def noise_variance_for_snr(op: MeasurementOperator, x, snr_db: float) -> float:
    """σ² tal que 10·log10(‖Ax‖² / (M σ²)) = snr_db."""
    energy = float(np.sum(np.abs(op.forward(x)) ** 2))
    if energy == 0.0:
        raise ValueError("SNR indefinida: A x é nulo.")
    return energy / (op.M * 10 ** (snr_db / 10))


def crb_db(bound: float) -> float:
    return 10 * math.log10(bound) if bound > 0 else -math.inf


__all__ = [
    "FimMatrix",
    "CrbReport",
    "RankReport",
    "fim_laplacian_complex",
    "fim_laplacian_real",
    "fim_gaussian",
    "fim_amplitude_phase",
    "rank_diagnostics",
    "crb",
    "crb_laplacian",
    "crb_gaussian",
    "amplitude_phase_split",
    "noise_variance_for_snr",
    "crb_db",
]
