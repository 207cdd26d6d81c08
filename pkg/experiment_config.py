"""
experiment_config.py
─────────────────────────────────────────────────────────────────────────────
Fábrica central de configuração dos experimentos do benchmark.

O arquivo de configuração é um documento KEY=value no dialeto dotenv
(lido com python-dotenv). Chaves são case-insensitive; listas separadas
por vírgula; booleanos aceitam 1/0/true/false/yes/no.

Ordem de precedência (maior primeiro):
    flags da CLI (--seed, --trials, --out, --workers)
    --set key=value
    variáveis de ambiente PRBENCH_<KEY>
    arquivo --config
    defaults do cenário (SCENARIO_DEFAULTS)
    defaults globais (DEFAULTS)

Exemplo (configs/snr_laplacian.env):

    SCENARIO=snr_sweep
    NOISE=laplacian
    SNR_GRID=0,5,10,15,20,25,30
    SOLVERS=alt_irls,alt_gd,gs
    P=1.0

Cenários:
    snr_sweep               — varre SNR (dB); colunas de CRB para ruído
                              laplaciano/gaussiano
    outlier_sweep           — varre a fração de outliers (GMM ou impulsos)
    sample_complexity_sweep — varre M/N
    p_sweep                 — varre o expoente p
    fourier2d_pipeline      — HIO → {gs, alt_gd} em imagens 2D
    crb_table               — só os limites de Cramér–Rao por SNR

Ruído: NOISE_SCALING=snr (padrão) escala o vetor de ruído inteiro para a
SNR do ponto; NOISE_SCALING=fixed (só GMM e outliers) mantém as
variâncias do arquivo e a SNR vira apenas a realizada.
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

from dotenv import dotenv_values

from retrieval.solver import SCHEDULES, STEP_RULES, SolverConfig
from state import GridPoint

logger = logging.getLogger("phase_bench.experiment_config")

ENV_PREFIX = "PRBENCH_"

SCENARIOS = (
    "snr_sweep",
    "outlier_sweep",
    "sample_complexity_sweep",
    "p_sweep",
    "fourier2d_pipeline",
    "crb_table",
)
SIGNALS = ("exponential", "gaussian", "image")
OPERATORS = ("masked_dft", "gaussian", "fourier2d")
NOISES = ("laplacian", "alpha_stable", "gmm", "gaussian", "outliers", "none")
NOISE_SCALINGS = ("snr", "fixed")
INITS = ("spectral", "staged")

# Nome do solver na CLI → variante do SolverConfig (None = baseline)
SOLVER_VARIANTS: dict[str, Optional[str]] = {
    "alt_irls":     "irls",
    "alt_gd":       "gd",
    "alt_gd_accel": "gd_accel",
    "alt_gd_block": "gd_block",
    "gs":           None,
    "hio":          None,
}

# Eixo varrido por cenário
SWEEP_AXES: dict[str, tuple[str, str]] = {
    "snr_sweep":               ("snr_db", "snr_grid"),
    "outlier_sweep":           ("outlier_fraction", "outlier_grid"),
    "sample_complexity_sweep": ("ratio", "ratio_grid"),
    "p_sweep":                 ("p", "p_grid"),
    "fourier2d_pipeline":      ("snr_db", "snr_grid"),
    "crb_table":               ("snr_db", "snr_grid"),
}


class ConfigError(ValueError):
    """Configuração inválida; `key` identifica a chave culpada."""

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key


# ─────────────────────────────────────────────────────────────────────────────
# Defaults globais e por cenário (valores crus, como no arquivo)
# ─────────────────────────────────────────────────────────────────────────────

DEFAULTS: dict[str, str] = {
    "scenario":          "snr_sweep",
    "signal":            "exponential",
    "signal_length":     "16",
    "image_size":        "16",
    "operator":          "masked_dft",
    "ratio":             "8",
    "oversampling":      "2",
    "noise":             "laplacian",
    "alpha":             "0.8",
    "stable_beta":       "0",
    "gamma":             "2",
    "gmm_c2":            "0.1",
    "gmm_var1":          "0.1",
    "gmm_var2":          "100",
    "outlier_fraction":  "0.1",
    "outlier_variance":  "100",
    "noise_scaling":     "snr",
    "snr_db":            "20",
    "snr_grid":          "0,5,10,15,20,25,30",
    "outlier_grid":      "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5",
    "ratio_grid":        "2,3,4,5,6,7,8",
    "p_grid":            "0.4,0.7,1.0,1.3,1.6,1.9",
    "solvers":           "alt_irls,alt_gd,gs",
    "p":                 "1.3",
    "eps":               "1e-6",
    "max_iters":         "1000",
    "rel_tol":           "1e-7",
    "step_rule":         "trace_heuristic",
    "block_size":        "none",
    "schedule":          "cyclic",
    "restart":           "true",
    "init":              "spectral",
    "hio_iters":         "5000",
    "refine_iters":      "5000",
    "hio_beta":          "0.9",
    "success_threshold": "1e-4",
    "trials":            "100",
    "seed":              "0",
    "out":               "results/{scenario}.csv",
    "workers":           "4",
    "emit_plots":        "false",
    "record_costs":      "false",
}

SCENARIO_DEFAULTS: dict[str, dict[str, str]] = {
    "snr_sweep": {},
    "outlier_sweep": {
        "noise":    "gmm",
        "gmm_var1": "0",
        "gmm_var2": "100",
        "snr_db":   "10",
        "p":        "0.4",
        "init":     "staged",
    },
    "sample_complexity_sweep": {
        "noise":    "gmm",
        "gmm_c2":   "0.2",
        "gmm_var1": "0",
        "gmm_var2": "100",
        "snr_db":   "10",
        "p":        "0.4",
        "init":     "staged",
    },
    "p_sweep": {
        "noise":            "outliers",
        "outlier_fraction": "0.1",
        "outlier_variance": "100",
        "solvers":          "alt_irls,alt_gd",
        "init":             "staged",
    },
    "fourier2d_pipeline": {
        "signal":   "image",
        "operator": "fourier2d",
        "noise":    "gmm",
        "gmm_var1": "0",
        "snr_grid": "10",
        "solvers":  "hio,gs,alt_gd",
        "trials":   "50",
    },
    "crb_table": {
        "solvers": "",
    },
}


# ─────────────────────────────────────────────────────────────────────────────
# Parsers
# ─────────────────────────────────────────────────────────────────────────────

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError(raw)


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(v) for v in raw.split(",") if v.strip())


def _names(raw: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in raw.split(",") if v.strip())


def _optional_int(raw: str) -> Optional[int]:
    return None if raw.strip().lower() in ("", "none") else int(raw)


def _str(raw: str) -> str:
    return raw.strip()


FIELDS: dict[str, Callable[[str], Any]] = {
    "scenario":          _str,
    "signal":            _str,
    "signal_length":     int,
    "image_size":        int,
    "operator":          _str,
    "ratio":             float,
    "oversampling":      int,
    "noise":             _str,
    "alpha":             float,
    "stable_beta":       float,
    "gamma":             float,
    "gmm_c2":            float,
    "gmm_var1":          float,
    "gmm_var2":          float,
    "outlier_fraction":  float,
    "outlier_variance":  float,
    "noise_scaling":     _str,
    "snr_db":            float,
    "snr_grid":          _floats,
    "outlier_grid":      _floats,
    "ratio_grid":        _floats,
    "p_grid":            _floats,
    "solvers":           _names,
    "p":                 float,
    "eps":               float,
    "max_iters":         int,
    "rel_tol":           float,
    "step_rule":         _str,
    "block_size":        _optional_int,
    "schedule":          _str,
    "restart":           _bool,
    "init":              _str,
    "hio_iters":         int,
    "refine_iters":      int,
    "hio_beta":          float,
    "success_threshold": float,
    "trials":            int,
    "seed":              int,
    "out":               _str,
    "workers":           int,
    "emit_plots":        _bool,
    "record_costs":      _bool,
}


# ─────────────────────────────────────────────────────────────────────────────
# Configuração resolvida
# ─────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    signal: str
    signal_length: int
    image_size: int
    operator: str
    ratio: float
    oversampling: int
    noise: str
    alpha: float
    stable_beta: float
    gamma: float
    gmm_c2: float
    gmm_var1: float
    gmm_var2: float
    outlier_fraction: float
    outlier_variance: float
    noise_scaling: str
    snr_db: float
    snr_grid: tuple[float, ...]
    outlier_grid: tuple[float, ...]
    ratio_grid: tuple[float, ...]
    p_grid: tuple[float, ...]
    solvers: tuple[str, ...]
    p: float
    eps: float
    max_iters: int
    rel_tol: float
    step_rule: str
    block_size: Optional[int]
    schedule: str
    restart: bool
    init: str
    hio_iters: int
    refine_iters: int
    hio_beta: float
    success_threshold: float
    trials: int
    seed: int
    out: str
    workers: int
    emit_plots: bool
    record_costs: bool
    sources: dict[str, str] = field(default_factory=dict, compare=False, repr=False)
    """Origem de cada chave: cli | env | file | default."""

    def __post_init__(self) -> None:
        _validate(self)

    # ── Derivados ─────────────────────────────────────────────────────────

    @property
    def signal_size(self) -> int:
        """N (para imagens, image_size²)."""
        return self.image_size ** 2 if self.signal == "image" else self.signal_length

    @property
    def sweep_axis(self) -> str:
        return SWEEP_AXES[self.scenario][0]

    @property
    def sweep_values(self) -> tuple[float, ...]:
        return getattr(self, SWEEP_AXES[self.scenario][1])

    def effective_fraction(self) -> float:
        if self.noise == "gmm":
            return self.gmm_c2
        if self.noise == "outliers":
            return self.outlier_fraction
        return 0.0

    def effective_ratio(self) -> float:
        if self.operator == "fourier2d":
            return float(self.oversampling ** 2)
        return self.ratio

    def grid(self) -> list[GridPoint]:
        """Pontos da varredura, na ordem do arquivo de configuração."""
        base = GridPoint(
            snr_db=self.snr_db,
            outlier_fraction=self.effective_fraction(),
            ratio=self.effective_ratio(),
            p=self.p,
        )
        return [GridPoint(**{**base, self.sweep_axis: float(v)}) for v in self.sweep_values]

    def solver_config(self, name: str, p: float, seed: int = 0) -> SolverConfig:
        """SolverConfig de um solver ℓp; gs e hio não têm um."""
        variant = SOLVER_VARIANTS.get(name)
        if variant is None:
            raise ValueError(f"'{name}' não é um solver ℓp.")
        max_iters = self.refine_iters if self.scenario == "fourier2d_pipeline" else self.max_iters
        return SolverConfig(
            p=p,
            eps=self.eps,
            max_iters=max_iters,
            rel_tol=self.rel_tol,
            variant=variant,
            step_rule=self.step_rule,
            block_size=self.block_size,
            schedule=self.schedule,
            restart=self.restart,
            seed=seed,
        )

    @property
    def out_path(self) -> Path:
        return Path(self.out)


# ─────────────────────────────────────────────────────────────────────────────
# Validação
# ─────────────────────────────────────────────────────────────────────────────

def _choice(key: str, value: str, allowed: tuple[str, ...]) -> None:
    if value not in allowed:
        raise ConfigError(key, f"valor '{value}' desconhecido. Use um de {allowed}.")


def _validate(cfg: ExperimentConfig) -> None:
    _choice("scenario", cfg.scenario, SCENARIOS)
    _choice("signal", cfg.signal, SIGNALS)
    _choice("operator", cfg.operator, OPERATORS)
    _choice("noise", cfg.noise, NOISES)
    _choice("noise_scaling", cfg.noise_scaling, NOISE_SCALINGS)
    _choice("init", cfg.init, INITS)
    _choice("step_rule", cfg.step_rule, STEP_RULES)
    _choice("schedule", cfg.schedule, SCHEDULES)

    for key in ("trials", "workers", "signal_length", "image_size", "oversampling",
                "max_iters", "refine_iters"):
        if getattr(cfg, key) < 1:
            raise ConfigError(key, f"deve ser ≥ 1, recebido {getattr(cfg, key)}.")
    if cfg.hio_iters < 0:
        raise ConfigError("hio_iters", f"deve ser ≥ 0, recebido {cfg.hio_iters}.")

    axis_key = SWEEP_AXES[cfg.scenario][1]
    if not cfg.sweep_values:
        raise ConfigError(axis_key, f"grid vazio para o cenário '{cfg.scenario}'.")

    # sinal e operador
    if (cfg.signal == "image") != (cfg.operator == "fourier2d"):
        raise ConfigError("operator", "fourier2d exige SIGNAL=image e vice-versa.")
    if cfg.scenario == "fourier2d_pipeline" and cfg.operator != "fourier2d":
        raise ConfigError("operator", "fourier2d_pipeline exige OPERATOR=fourier2d.")
    if cfg.scenario == "sample_complexity_sweep" and cfg.operator == "fourier2d":
        raise ConfigError("operator", "sample_complexity_sweep não se aplica a fourier2d.")

    ratios = cfg.ratio_grid if cfg.scenario == "sample_complexity_sweep" else (cfg.ratio,)
    if cfg.operator != "fourier2d":
        for r in ratios:
            if r < 1:
                raise ConfigError("ratio", f"M/N deve ser ≥ 1, recebido {r}.")
            if cfg.operator == "masked_dft" and r != int(r):
                raise ConfigError("ratio", f"masked_dft exige M/N inteiro (número de máscaras), recebido {r}.")
            if cfg.operator == "gaussian" and r * cfg.signal_size != int(r * cfg.signal_size):
                raise ConfigError("ratio", f"M = ratio·N deve ser inteiro, recebido {r}·{cfg.signal_size}.")

    # ruído
    for key in ("gmm_c2", "outlier_fraction"):
        if not 0 <= getattr(cfg, key) <= 1:
            raise ConfigError(key, f"deve estar em [0, 1], recebido {getattr(cfg, key)}.")
    if cfg.scenario == "outlier_sweep":
        if cfg.noise not in ("gmm", "outliers"):
            raise ConfigError("noise", "outlier_sweep exige NOISE=gmm ou NOISE=outliers.")
        if any(not 0 <= f <= 1 for f in cfg.outlier_grid):
            raise ConfigError("outlier_grid", "frações devem estar em [0, 1].")
    if cfg.scenario == "crb_table" and cfg.noise not in ("laplacian", "gaussian"):
        raise ConfigError("noise", "crb_table exige NOISE=laplacian ou NOISE=gaussian.")
    if cfg.noise_scaling == "fixed":
        if cfg.noise not in ("gmm", "outliers"):
            raise ConfigError("noise_scaling", "fixed só vale para NOISE=gmm ou NOISE=outliers.")
        if cfg.scenario in ("snr_sweep", "crb_table"):
            raise ConfigError("noise_scaling", f"fixed não combina com a varredura de SNR de '{cfg.scenario}'.")

    # solvers
    if not cfg.solvers and cfg.scenario != "crb_table":
        raise ConfigError("solvers", "lista de solvers vazia.")
    for name in cfg.solvers:
        _choice("solvers", name, tuple(SOLVER_VARIANTS))
    if "hio" in cfg.solvers and cfg.operator != "fourier2d":
        raise ConfigError("solvers", "hio exige OPERATOR=fourier2d.")
    if "alt_gd_block" in cfg.solvers and (cfg.block_size is None or cfg.block_size <= 1):
        raise ConfigError("block_size", "alt_gd_block exige BLOCK_SIZE > 1.")

    ps = cfg.p_grid if cfg.scenario == "p_sweep" else (cfg.p,)
    for p in ps:
        if not 0 < p <= 2:
            raise ConfigError("p", f"p deve estar em (0, 2], recebido {p}.")
    if not cfg.eps > 0:
        raise ConfigError("eps", f"ε deve ser > 0, recebido {cfg.eps}.")
    if cfg.rel_tol < 0:
        raise ConfigError("rel_tol", f"deve ser ≥ 0, recebido {cfg.rel_tol}.")
    if not 0 < cfg.hio_beta < 1:
        raise ConfigError("hio_beta", f"β deve estar em (0, 1), recebido {cfg.hio_beta}.")


# ─────────────────────────────────────────────────────────────────────────────
# Resolução
# ─────────────────────────────────────────────────────────────────────────────

def _normalize(values: Mapping[str, Any], origin: str, strict: bool = True) -> dict[str, str]:
    out: dict[str, str] = {}
    for key, value in values.items():
        name = key.strip().lower()
        if name not in FIELDS:
            if strict:
                raise ConfigError(name, f"chave desconhecida ({origin}).")
            continue
        if value is None:
            continue
        out[name] = value if isinstance(value, str) else str(value)
    return out


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    """Lê um arquivo KEY=value e devolve as chaves normalizadas."""
    target = Path(path)
    if not target.is_file():
        raise ConfigError("config", f"arquivo não encontrado: {target}")
    return _normalize(dotenv_values(target), f"arquivo {target.name}")


def parse_overrides(pairs: list[str]) -> dict[str, str]:
    """['key=value', ...] de --set → dict."""
    out: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError("set", f"esperado key=value, recebido '{pair}'.")
        key, value = pair.split("=", 1)
        out[key] = value
    return _normalize(out, "--set")


def _env_values(environ: Mapping[str, str]) -> dict[str, str]:
    picked = {
        key[len(ENV_PREFIX):]: value
        for key, value in environ.items()
        if key.startswith(ENV_PREFIX)
    }
    # PRBENCH_LOG_LEVEL e afins não são chaves de experimento
    return _normalize(picked, "ambiente", strict=False)


def _resolve(
    key: str,
    layers: list[tuple[str, dict[str, str]]],
    scenario: Optional[str],
) -> tuple[str, str]:
    """(valor cru, origem) da chave, varrendo as camadas por precedência."""
    for source, values in layers:
        if key in values:
            return values[key], source
    if scenario is not None and key in SCENARIO_DEFAULTS.get(scenario, {}):
        return SCENARIO_DEFAULTS[scenario][key], "default"
    return DEFAULTS[key], "default"


def make_config(
    path: Optional[str | os.PathLike] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    cli: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> ExperimentConfig:
    """
    Resolve e valida a configuração completa.

    Args:
        path:      Arquivo KEY=value (opcional).
        overrides: Pares de --set, já em dict.
        cli:       Flags de atalho (seed, trials, out, workers); None é ignorado.
        environ:   Ambiente a consultar (padrão: os.environ).

    Raises:
        ConfigError: chave desconhecida, valor impossível de converter ou
                     combinação inválida. Nada é computado antes disso.
    """
    layers: list[tuple[str, dict[str, str]]] = [
        ("cli", _normalize(cli or {}, "cli")),
        ("cli", _normalize(overrides or {}, "--set")),
        ("env", _env_values(os.environ if environ is None else environ)),
        ("file", read_config_file(path) if path is not None else {}),
    ]

    raw_scenario, _ = _resolve("scenario", layers, None)
    scenario = raw_scenario.strip()
    _choice("scenario", scenario, SCENARIOS)

    values: dict[str, Any] = {}
    sources: dict[str, str] = {}
    for key, parser in FIELDS.items():
        raw, source = _resolve(key, layers, scenario)
        try:
            values[key] = parser(raw)
        except ValueError:
            raise ConfigError(key, f"valor inválido '{raw}' ({source}).") from None
        sources[key] = source

    values["out"] = values["out"].format(scenario=scenario)
    config = ExperimentConfig(**values, sources=sources)
    logger.debug("Configuração resolvida: cenário=%s trials=%d seed=%d",
                 config.scenario, config.trials, config.seed)
    return config


# ─────────────────────────────────────────────────────────────────────────────
# Diagnóstico
# ─────────────────────────────────────────────────────────────────────────────

def _format_value(value: Any) -> str:
    if isinstance(value, tuple):
        return ",".join(f"{v:g}" if isinstance(v, float) else str(v) for v in value) or "—"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def print_config(config: ExperimentConfig) -> None:
    """Imprime cada chave resolvida com a sua origem."""
    print(f"\n  Cenário:   {config.scenario}")
    print(f"  Grid:      {config.sweep_axis} ∈ {{{_format_value(config.sweep_values)}}}")
    print()
    for f in fields(config):
        if f.name == "sources":
            continue
        value = _format_value(getattr(config, f.name))
        source = config.sources.get(f.name, "default")
        print(f"  {f.name:18s}  {value[:40]:40s}  [{source}]")


__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "DEFAULTS",
    "SCENARIO_DEFAULTS",
    "SCENARIOS",
    "SOLVER_VARIANTS",
    "ENV_PREFIX",
    "make_config",
    "read_config_file",
    "parse_overrides",
    "print_config",
]
