"""
solver.py
─────────────────────────────────────────────────────────────────────────────
Estimadores ℓp (0 < p ≤ 2) por otimização alternada inexata em dois
blocos (x, u) para

    min_{|u|=1, x}  Σ_m (|y_m u_m − a_mᴴ x|² + ε)^{p/2}

Variantes (SolverConfig.variant):
  • irls      — AltIRLS: passo x por mínimos quadrados ponderados
  • gd        — AltGD: passo x por gradiente com 1/μ
  • gd_accel  — AltGD com extrapolação de Nesterov e restart
  • gd_block  — AltGD incremental por blocos (cyclic) ou estocástico (random)

Uma iteração externa = (passo x com os pesos do iterado anterior,
passo u, atualização dos pesos). O passo u não depende de p:
u_m = e^{j∠(a_mᴴ x)}, com ∠(0) := 0.

Inicializações: spectral_init (autovetor principal de Σ y_m² a_m a_mᴴ)
e staged_p_init (estágios p = 1.3 → 1.0 [→ 0.7] para p alvo < 1).
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Optional

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from retrieval.errors import DimensionError, RankDeficientError
from retrieval.linop import ComplexSignal, MeasurementOperator, as_signal

logger = logging.getLogger("phase_bench.solver")

Variant = Literal["irls", "gd", "gd_accel", "gd_block"]
StepRule = Literal["trace_heuristic", "leading_eigenvalue"]
Schedule = Literal["cyclic", "random"]
Termination = Literal["tolerance", "max_iters"]

VARIANTS = ("irls", "gd", "gd_accel", "gd_block")
STEP_RULES = ("trace_heuristic", "leading_eigenvalue")
SCHEDULES = ("cyclic", "random")

# Número de condição acima do qual o sistema ponderado é tratado como singular
MAX_CONDITION = 1e12

POWER_TOL = 1e-6
POWER_MAX_ITERS = 200
SPECTRAL_ITERS = 100
SPECTRAL_TOL = 1e-8
STAGE_ITERS = 100


# ─────────────────────────────────────────────────────────────────────────────
# Tipos
# ─────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SolverConfig:
    p: float = 1.3
    eps: float = 1e-6
    max_iters: int = 1000
    rel_tol: float = 1e-7
    variant: Variant = "irls"
    step_rule: StepRule = "trace_heuristic"
    block_size: Optional[int] = None
    schedule: Schedule = "cyclic"
    restart: bool = True
    """Restart da extrapolação quando o custo sobe (gd_accel)."""
    seed: int = 0
    """Seed do sorteio de blocos no schedule random."""

    def __post_init__(self) -> None:
        if not 0 < self.p <= 2:
            raise ValueError(f"p deve estar em (0, 2], recebido {self.p}.")
        if self.eps < 0 or (self.p < 2 and not self.eps > 0):
            raise ValueError(f"ε deve ser > 0 quando p < 2 (p={self.p}, ε={self.eps}).")
        if self.max_iters < 1:
            raise ValueError(f"max_iters deve ser ≥ 1, recebido {self.max_iters}.")
        if self.rel_tol < 0:
            raise ValueError(f"rel_tol deve ser ≥ 0, recebido {self.rel_tol}.")
        if self.variant not in VARIANTS:
            raise ValueError(f"Variante desconhecida: '{self.variant}'. Use {VARIANTS}.")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"Regra de passo desconhecida: '{self.step_rule}'. Use {STEP_RULES}.")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"Schedule desconhecido: '{self.schedule}'. Use {SCHEDULES}.")
        if self.variant == "gd_block" and (self.block_size is None or self.block_size <= 1):
            # com um único y_m por passo a reponderação perde o efeito robusto
            raise ValueError(f"gd_block exige block_size > 1, recebido {self.block_size}.")


@dataclass
class SolverState:
    """Iterado do laço externo: x, fases u, pesos w de (x, u) e custo ℓp."""

    x: ComplexSignal
    u: NDArray[np.complex128]
    w: NDArray[np.float64]
    iter: int = 0
    cost: float = math.inf


@dataclass
class SolverTrace:
    costs: list[float] = field(default_factory=list)
    """Custo ℓp ao fim de cada iteração externa."""
    iterations: int = 0
    reason: Termination = "max_iters"
    initial_cost: float = math.nan
    """Custo no ponto inicial (x⁰, u⁰)."""
    final: Optional[SolverState] = None
    """Último iterado; w permite conferir o resíduo KKT no término."""


# ─────────────────────────────────────────────────────────────────────────────
# Helpers internos
# ─────────────────────────────────────────────────────────────────────────────

def _measurements(y, op: MeasurementOperator) -> NDArray[np.float64]:
    arr = np.asarray(y, dtype=np.float64).reshape(-1)
    if arr.size != op.M:
        raise DimensionError(f"y tem comprimento {arr.size}, esperado M={op.M}.")
    return arr


def _phase(z: NDArray[np.complex128]) -> NDArray[np.complex128]:
    mag = np.abs(z)
    u = np.ones_like(z)
    nz = mag > 0
    u[nz] = z[nz] / mag[nz]
    return u


def _residual_sq(y, z, u) -> NDArray[np.float64]:
    return np.abs(y * u - z) ** 2


def _weights(res_sq, p: float, eps: float) -> NDArray[np.float64]:
    # p = 2 dá exatamente 1.0 (expoente 0), o que mantém a redução a GS bit a bit
    return (p / 2) * (res_sq + eps) ** ((p - 2) / 2)


def _lp_cost(res_sq, p: float, eps: float) -> float:
    return float(np.sum((res_sq + eps) ** (p / 2)))


def _misfit(y, z) -> float:
    return float(np.sum((y - np.abs(z)) ** 2))


# ─────────────────────────────────────────────────────────────────────────────
# Operações elementares
# ─────────────────────────────────────────────────────────────────────────────

def cost(y, op: MeasurementOperator, x, u, p: float, eps: float) -> float:
    """Σ_m (|y_m u_m − a_mᴴ x|² + ε)^{p/2}."""
    y = _measurements(y, op)
    u = as_signal(u, op.M, name="u")
    return _lp_cost(_residual_sq(y, op.forward(x), u), p, eps)


def majorizer_weight(residual_sq, p: float, eps: float):
    """
    w_opt = (p/2)(x² + ε)^{(p−2)/2}: minimizador único de w·x² + φ_p(w).

    Aceita escalar ou array de resíduos ao quadrado.
    """
    if not 0 < p < 2:
        raise ValueError(f"Peso do majorante exige 0 < p < 2, recebido {p}.")
    if not eps > 0:
        raise ValueError(f"Peso do majorante exige ε > 0, recebido {eps}.")
    res = np.asarray(residual_sq, dtype=np.float64)
    if np.any(res < 0):
        raise ValueError("Resíduo ao quadrado negativo.")
    w = _weights(res, p, eps)
    return float(w) if w.ndim == 0 else w


def phi_p(w, p: float, eps: float):
    """φ_p(w) = ((2−p)/2)((2/p)w)^{p/(p−2)} + εw."""
    w = np.asarray(w, dtype=np.float64)
    out = ((2 - p) / 2) * ((2 / p) * w) ** (p / (p - 2)) + eps * w
    return float(out) if out.ndim == 0 else out


def surrogate(y, op: MeasurementOperator, x, u, w, p: float, eps: float) -> float:
    """Majorante Σ_m w_m|y_m u_m − a_mᴴ x|² + φ_p(w_m) do custo ℓp."""
    y = _measurements(y, op)
    w = np.asarray(w, dtype=np.float64)
    res = _residual_sq(y, op.forward(x), as_signal(u, op.M, name="u"))
    return float(np.sum(w * res + phi_p(w, p, eps)))


def x_step_irls(y, op: MeasurementOperator, u, w) -> ComplexSignal:
    """
    Minimizador exato de ‖W(y⊙u) − W A x‖², W = diag(√w), via QR do
    sistema ponderado.

    Raises:
        RankDeficientError: se W A não tiver posto coluna completo; o
            número de condição de R vai no atributo `condition`.
    """
    y = _measurements(y, op)
    u = as_signal(u, op.M, name="u")
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (op.M,) or np.any(w <= 0):
        raise ValueError("Pesos devem ser positivos e ter comprimento M.")

    if op.M < op.N:
        raise RankDeficientError(
            f"Sistema subdeterminado: M={op.M} < N={op.N}.", condition=math.inf
        )

    sw = np.sqrt(w)
    Q, R = scipy.linalg.qr(sw[:, None] * op.matrix(), mode="economic")
    condition = float(np.linalg.cond(R))
    if not math.isfinite(condition) or condition > MAX_CONDITION:
        raise RankDeficientError(
            f"Sistema ponderado sem posto coluna completo (cond(R) = {condition:.3e}).",
            condition=condition,
        )
    return scipy.linalg.solve_triangular(R, Q.conj().T @ (sw * (y * u)))


def u_step(y, op: MeasurementOperator, x) -> NDArray[np.complex128]:
    """u_m = e^{j∠(a_mᴴ x)}; a_mᴴ x = 0 ⇒ u_m = 1."""
    _measurements(y, op)
    return _phase(op.forward(x))


def gradient(y, op: MeasurementOperator, x, u, w) -> ComplexSignal:
    """
    ∇f = Aᴴ W² (A x − y⊙u) para f(x) = ‖W(y⊙u) − W A x‖².

    Convenção de Wirtinger (derivada em relação a x*): a derivada
    direcional real de f na direção d é 2·Re(∇fᴴ d).
    """
    y = _measurements(y, op)
    u = as_signal(u, op.M, name="u")
    w = np.asarray(w, dtype=np.float64)
    return op.adjoint(w * (op.forward(x) - y * u))


def _leading_eigenvalue(
    op: MeasurementOperator,
    w: NDArray[np.float64],
    rows: Optional[NDArray[np.intp]] = None,
    tol: float = POWER_TOL,
    max_iters: int = POWER_MAX_ITERS,
) -> float:
    """λ_max(A_Γᴴ W² A_Γ) por iteração de potência (Γ = todas as linhas se rows=None)."""
    if rows is None:
        apply = lambda v: op.adjoint(w * op.forward(v))  # noqa: E731
    else:
        apply = lambda v: op.adjoint_rows(w * op.forward_rows(v, rows), rows)  # noqa: E731

    start = np.random.default_rng(0)
    v = start.standard_normal(op.N) + 1j * start.standard_normal(op.N)
    v /= np.linalg.norm(v)

    lam = 0.0
    for _ in range(max_iters):
        Bv = apply(v)
        lam_new = float(np.real(np.vdot(v, Bv)))
        norm = float(np.linalg.norm(Bv))
        if norm == 0.0:
            return 0.0
        v = Bv / norm
        converged = abs(lam_new - lam) <= tol * abs(lam_new)
        lam = lam_new
        if converged:
            break
    # o quociente de Rayleigh se aproxima de λ_max por baixo
    return lam * (1 + tol)


def step_size(
    op: MeasurementOperator,
    w,
    rule: StepRule = "trace_heuristic",
    rows: Optional[NDArray[np.intp]] = None,
) -> float:
    """
    μ > 0 para o passo x ← x − ∇f/μ.

      trace_heuristic    → Σ_m w_m (= trace(W²))
      leading_eigenvalue → λ_max(Aᴴ W² A), garante f ≤ g e descida monotônica
    """
    w = np.asarray(w, dtype=np.float64)
    if np.any(w <= 0):
        raise ValueError("Pesos devem ser positivos.")
    if rule == "trace_heuristic":
        mu = float(np.sum(w))
    elif rule == "leading_eigenvalue":
        mu = _leading_eigenvalue(op, w, rows)
    else:
        raise ValueError(f"Regra de passo desconhecida: '{rule}'.")
    if mu <= 0:
        logger.warning("μ não positivo (%.3e); usando μ = 1.", mu)
        mu = 1.0
    return mu


def misfit_converged(prev_misfit: float, curr_misfit: float, rel_tol: float) -> bool:
    """|m_r − m_{r−1}| / m_{r−1} ≤ rel_tol (inclusivo); m_{r−1} = 0 ⇒ convergiu."""
    if prev_misfit == 0.0:
        return True
    return abs(curr_misfit - prev_misfit) / prev_misfit <= rel_tol


def stopping(y, op: MeasurementOperator, x_prev, x_curr, rel_tol: float) -> bool:
    """Critério relativo sobre ‖y − |A x|‖²; o chamador impõe max_iters."""
    y = _measurements(y, op)
    return misfit_converged(
        _misfit(y, op.forward(x_prev)),
        _misfit(y, op.forward(x_curr)),
        rel_tol,
    )


# ─────────────────────────────────────────────────────────────────────────────
# Laço externo comum
# ─────────────────────────────────────────────────────────────────────────────

StepFn = Callable[[ComplexSignal, NDArray[np.complex128], NDArray[np.complex128], float], ComplexSignal]


def _iterate(
    y,
    op: MeasurementOperator,
    x0,
    config: SolverConfig,
    step: StepFn,
    name: str,
) -> tuple[ComplexSignal, SolverTrace]:
    y = _measurements(y, op)

    def evaluate(x, r: int) -> tuple[SolverState, NDArray[np.complex128]]:
        z = op.forward(x)
        u = _phase(z)
        res_sq = _residual_sq(y, z, u)
        w = _weights(res_sq, config.p, config.eps)
        return SolverState(x, u, w, iter=r, cost=_lp_cost(res_sq, config.p, config.eps)), z

    state, z = evaluate(as_signal(x0, op.N, name="x0"), 0)
    misfit = _misfit(y, z)
    trace = SolverTrace(initial_cost=state.cost)

    for r in range(1, config.max_iters + 1):
        state, z = evaluate(step(state.x, z, state.u, state.cost), r)
        trace.costs.append(state.cost)
        trace.iterations = r

        new_misfit = _misfit(y, z)
        if misfit_converged(misfit, new_misfit, config.rel_tol):
            trace.reason = "tolerance"
            break
        misfit = new_misfit

    trace.final = state
    logger.debug(
        "%s: p=%.2f iterações=%d motivo=%s custo=%.6e",
        name, config.p, trace.iterations, trace.reason, state.cost,
    )
    return state.x, trace


def _gd_update(y, op, x, z, u, config: SolverConfig) -> ComplexSignal:
    w = _weights(_residual_sq(y, z, u), config.p, config.eps)
    mu = step_size(op, w, config.step_rule)
    return x - op.adjoint(w * (z - y * u)) / mu


# ─────────────────────────────────────────────────────────────────────────────
# Algoritmos
# ─────────────────────────────────────────────────────────────────────────────

def alt_irls(y, op: MeasurementOperator, x0, config: SolverConfig) -> tuple[ComplexSignal, SolverTrace]:
    """
    AltIRLS: x ← (WA)†W(y⊙u) com W do iterado anterior, depois u-step e
    novos pesos. O custo ℓp é não crescente a cada iteração.
    """
    def step(x, z, u, _current):
        w = _weights(_residual_sq(y_arr, z, u), config.p, config.eps)
        return x_step_irls(y_arr, op, u, w)

    y_arr = _measurements(y, op)
    return _iterate(y_arr, op, x0, config, step, "alt_irls")


def alt_gd(y, op: MeasurementOperator, x0, config: SolverConfig) -> tuple[ComplexSignal, SolverTrace]:
    """
    AltGD: pesos de (x, u) atuais, μ pela regra configurada e
    x ← x − ∇f/μ. Com leading_eigenvalue o custo é não crescente.
    """
    y_arr = _measurements(y, op)
    return _iterate(
        y_arr, op, x0, config,
        lambda x, z, u, _c: _gd_update(y_arr, op, x, z, u, config),
        "alt_gd",
    )


def next_t(t: float) -> float:
    """t ← (1 + √(1 + 4t²)) / 2."""
    return (1 + math.sqrt(1 + 4 * t * t)) / 2


def nesterov_sequence(count: int) -> list[float]:
    """t⁰ = 1, t¹, …, t^{count−1}."""
    seq = [1.0]
    while len(seq) < count:
        seq.append(next_t(seq[-1]))
    return seq[:count]


class _Extrapolation:
    """Memória (x anterior, t) do passo acelerado."""

    def __init__(self, y, op: MeasurementOperator, config: SolverConfig) -> None:
        self.y = y
        self.op = op
        self.config = config
        self.x_prev: Optional[ComplexSignal] = None
        self.t = 1.0
        self.restarts = 0

    def __call__(self, x, z, u, current: float) -> ComplexSignal:
        y, op, config = self.y, self.op, self.config
        t_new = next_t(self.t)
        if self.x_prev is None:
            point = x
        else:
            point = x + ((self.t - 1) / t_new) * (x - self.x_prev)

        # pesos e u ancorados no ponto extrapolado
        zp = op.forward(point)
        candidate = _gd_update(y, op, point, zp, _phase(zp), config)

        if config.restart:
            zc = op.forward(candidate)
            if _lp_cost(_residual_sq(y, zc, _phase(zc)), config.p, config.eps) > current:
                candidate = _gd_update(y, op, x, z, u, config)
                t_new = 1.0
                self.restarts += 1

        self.x_prev = x
        self.t = t_new
        return candidate


def alt_gd_accel(y, op: MeasurementOperator, x0, config: SolverConfig) -> tuple[ComplexSignal, SolverTrace]:
    """
    AltGD com extrapolação de Nesterov (t⁰ = 1). Se o custo sobe e
    config.restart, refaz o passo a partir de x com t = 1.
    """
    y_arr = _measurements(y, op)
    extrapolation = _Extrapolation(y_arr, op, config)
    x, trace = _iterate(y_arr, op, x0, config, extrapolation, "alt_gd_accel")
    if extrapolation.restarts:
        logger.debug("alt_gd_accel: %d restarts", extrapolation.restarts)
    return x, trace


def make_blocks(M: int, block_size: int) -> list[NDArray[np.intp]]:
    """
    Partição de 0..M−1 em blocos consecutivos de tamanho block_size.
    Um resto de tamanho 1 é absorvido pelo bloco anterior.
    """
    if block_size <= 1:
        raise ValueError(f"block_size deve ser > 1, recebido {block_size}.")
    idx = np.arange(M)
    blocks = [idx[i:i + block_size] for i in range(0, M, block_size)]
    if len(blocks) > 1 and len(blocks[-1]) == 1:
        blocks[-2] = np.concatenate([blocks[-2], blocks.pop()])
    return blocks


def alt_gd_block(y, op: MeasurementOperator, x0, config: SolverConfig) -> tuple[ComplexSignal, SolverTrace]:
    """
    AltGD incremental por blocos Γ_l. Uma época (L passos internos) conta
    como uma iteração externa para o critério de parada.

      cyclic → blocos em ordem, block incremental gradient
      random → L sorteios uniformes com reposição, stochastic gradient
    """
    if config.block_size is None or config.block_size <= 1:
        raise ValueError(f"gd_block exige block_size > 1, recebido {config.block_size}.")
    y_arr = _measurements(y, op)
    blocks = make_blocks(op.M, config.block_size)
    rng = np.random.default_rng(config.seed)

    def epoch(x, _z, _u, _current):
        if config.schedule == "cyclic":
            order = range(len(blocks))
        else:
            order = rng.integers(0, len(blocks), size=len(blocks))
        for l in order:
            rows = blocks[l]
            yb = y_arr[rows]
            zb = op.forward_rows(x, rows)
            ub = _phase(zb)
            wb = _weights(_residual_sq(yb, zb, ub), config.p, config.eps)
            mu = step_size(op, wb, config.step_rule, rows=rows)
            x = x - op.adjoint_rows(wb * (zb - yb * ub), rows) / mu
        return x

    return _iterate(y_arr, op, x0, config, epoch, "alt_gd_block")


SOLVERS: dict[str, Callable[..., tuple[ComplexSignal, SolverTrace]]] = {
    "irls": alt_irls,
    "gd": alt_gd,
    "gd_accel": alt_gd_accel,
    "gd_block": alt_gd_block,
}


def solve(y, op: MeasurementOperator, x0, config: SolverConfig) -> tuple[ComplexSignal, SolverTrace]:
    """Despacha para a variante de config.variant."""
    return SOLVERS[config.variant](y, op, x0, config)


# ─────────────────────────────────────────────────────────────────────────────
# Inicialização
# ─────────────────────────────────────────────────────────────────────────────

def spectral_init(
    y,
    op: MeasurementOperator,
    rng: np.random.Generator,
    iters: int = SPECTRAL_ITERS,
    tol: float = SPECTRAL_TOL,
) -> ComplexSignal:
    """
    Autovetor principal de Σ_m y_m² a_m a_mᴴ = Aᴴ diag(y²) A por iteração
    de potência, escalado para ‖x⁰‖ = √(mean(y²)).
    """
    y = _measurements(y, op)
    if op.M < op.N:
        raise ValueError(f"Inicialização espectral exige M ≥ N (M={op.M}, N={op.N}).")
    y2 = y ** 2
    if not np.any(y2 > 0):
        raise ValueError("Inicialização espectral indefinida: y identicamente nulo.")

    v = rng.standard_normal(op.N) + 1j * rng.standard_normal(op.N)
    v /= np.linalg.norm(v)
    for _ in range(iters):
        Bv = op.adjoint(y2 * op.forward(v))
        v_new = Bv / np.linalg.norm(Bv)
        change = float(np.linalg.norm(v_new - v))
        v = v_new
        if change < tol:
            break
    return v * math.sqrt(float(np.mean(y2)))


def staged_schedule(target_p: float) -> tuple[float, ...]:
    """Valores de p dos estágios de aquecimento para p alvo < 1."""
    if not 0 < target_p < 1:
        raise ValueError(f"Inicialização em estágios exige 0 < p < 1, recebido {target_p}.")
    return (1.3, 1.0) if target_p > 0.6 else (1.3, 1.0, 0.7)


def staged_p_init(
    y,
    op: MeasurementOperator,
    target_p: float,
    rng: np.random.Generator,
    config: Optional[SolverConfig] = None,
    stage_iters: int = STAGE_ITERS,
    x0=None,
) -> ComplexSignal:
    """
    Aquecimento em estágios: espectral → stage_iters iterações em cada p
    de staged_schedule(target_p), com a variante de `config` (padrão irls).
    O resultado é o ponto inicial da execução final em target_p.
    """
    stages = staged_schedule(target_p)
    base = config or SolverConfig(variant="irls")
    x = spectral_init(y, op, rng) if x0 is None else as_signal(x0, op.N, name="x0")
    for p in stages:
        stage = replace(base, p=p, max_iters=stage_iters, rel_tol=0.0)
        x, trace = solve(y, op, x, stage)
        logger.debug("estágio p=%.1f: %d iterações", p, trace.iterations)
    return x


__all__ = [
    "SolverConfig",
    "SolverState",
    "SolverTrace",
    "VARIANTS",
    "STEP_RULES",
    "SCHEDULES",
    "cost",
    "majorizer_weight",
    "phi_p",
    "surrogate",
    "x_step_irls",
    "u_step",
    "gradient",
    "step_size",
    "misfit_converged",
    "stopping",
    "alt_irls",
    "alt_gd",
    "alt_gd_accel",
    "alt_gd_block",
    "next_t",
    "nesterov_sequence",
    "make_blocks",
    "solve",
    "spectral_init",
    "staged_schedule",
    "staged_p_init",
]
