"""
main.py
─────────────────────────────────────────────────────────────────────────────
CLI do benchmark de phase retrieval robusto.

Uso:
    python main.py run --config configs/snr_laplacian.env
    python main.py run --config configs/outlier_sweep.env --trials 500 --seed 7
    python main.py run --config configs/p_sweep.env --set p_grid=0.5,1.0 --emit-plots
    python main.py crb --config configs/crb_table.env
    python main.py config --config configs/fourier2d_pipeline.env

Códigos de saída:
    0 → sucesso
    1 → erro de execução (E/S, falha numérica não recuperável)
    2 → configuração inválida
─────────────────────────────────────────────────────────────────────────────
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import textwrap
import time
from typing import Optional

from dotenv import load_dotenv

from experiment_config import ConfigError, ExperimentConfig, make_config, parse_overrides, print_config

logger = logging.getLogger("phase_bench.main")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


# ─────────────────────────────────────────────────────────────────────────────
# Cores ANSI
# ─────────────────────────────────────────────────────────────────────────────

USE_COLOR = sys.stdout.isatty() and os.name != "nt"

def _c(text: str, code: str) -> str:
    return f"\033[{code}m{text}\033[0m" if USE_COLOR else text

def cyan(t):    return _c(t, "96")
def green(t):   return _c(t, "92")
def yellow(t):  return _c(t, "93")
def red(t):     return _c(t, "91")
def bold(t):    return _c(t, "1")
def dim(t):     return _c(t, "2")


# ─────────────────────────────────────────────────────────────────────────────
# Helpers de UI
# ─────────────────────────────────────────────────────────────────────────────

WIDTH = 70

def _line(char: str = "─", color=dim) -> None:
    print(color(char * WIDTH))

def _header(subtitle: str) -> None:
    print()
    _line("═", bold)
    print(bold("  PHASE BENCH") + dim(f"  —  {subtitle}"))
    _line("═", bold)

def _print_setup(config: ExperimentConfig) -> None:
    print(f"  {bold('Cenário:')}  {config.scenario}")
    print(f"  {bold('Grid:')}     {config.sweep_axis} × {len(config.sweep_values)} pontos")
    print(f"  {bold('Solvers:')}  {', '.join(config.solvers) or dim('—')}")
    print(f"  {bold('Trials:')}   {config.trials}   {bold('Seed:')} {config.seed}   "
          f"{bold('Workers:')} {config.workers}")
    _line()

def _print_final_report(result, written: list[str], elapsed: float) -> None:
    from tools.report import format_summary

    _line("═", bold)
    print(bold("  RESUMO"))
    _line()
    for line in format_summary(result.summary, result.config.sweep_axis):
        print(f"  {line}")

    failures = int((result.rows["termination"] == "error").sum()) if not result.rows.empty else 0
    if failures:
        print(f"\n  {yellow(f'⚠️  {failures} execuções com erro (ver log)')}")

    print(f"\n  {dim('Arquivos:')}")
    for path in written:
        print(f"    {dim('•')} {path}")
    print(f"\n  {dim(f'Tempo total: {elapsed:.1f}s')}")
    _line("═", bold)
    print()


# ─────────────────────────────────────────────────────────────────────────────
# Logging
# ─────────────────────────────────────────────────────────────────────────────

def _setup_logging(verbose: bool, quiet: bool) -> None:
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        level = getattr(logging, os.environ.get("PRBENCH_LOG_LEVEL", "INFO").upper(), logging.INFO)

    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s",
        datefmt="%H:%M:%S",
    )
    # Silencia logs verbosos de terceiros que poluem o terminal
    logging.getLogger("langgraph").setLevel(logging.WARNING)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


# ─────────────────────────────────────────────────────────────────────────────
# Comandos
# ─────────────────────────────────────────────────────────────────────────────

def _load(args: argparse.Namespace, **forced) -> ExperimentConfig:
    cli = {
        "seed":    getattr(args, "seed", None),
        "trials":  getattr(args, "trials", None),
        "out":     getattr(args, "out", None),
        "workers": getattr(args, "workers", None),
        **forced,
    }
    return make_config(
        args.config,
        overrides=parse_overrides(args.set or []),
        cli={k: v for k, v in cli.items() if v is not None},
    )


def _execute(config: ExperimentConfig, subtitle: str, emit_plots: bool) -> None:
    from graph import run_experiment
    from tools.report import emit_costs, emit_csv, emit_plots as write_plots, emit_summary, emit_timing

    _header(subtitle)
    _print_setup(config)

    def _progress(index, point, rows):
        value = point[config.sweep_axis]
        print(f"  {cyan('▸')} {config.sweep_axis}={value:g}  {dim(f'{len(rows)} linhas')}")

    start = time.monotonic()
    result = run_experiment(config, on_grid_point=_progress)
    elapsed = time.monotonic() - start

    out = config.out_path
    written = [
        emit_csv(result.rows, out),
        emit_summary(result.summary, out),
        emit_timing(result.timing, out),
    ]
    if config.record_costs:
        written.append(emit_costs(result.costs, out))
    if emit_plots:
        written.extend(write_plots(result.summary, config.sweep_axis, out))

    _print_final_report(result, [str(p) for p in written], elapsed)


def cmd_run(args: argparse.Namespace) -> None:
    config = _load(args)
    _execute(config, "Monte-Carlo", args.emit_plots or config.emit_plots)


def cmd_crb(args: argparse.Namespace) -> None:
    config = _load(args, scenario="crb_table")
    _execute(config, "Cramér–Rao", False)


def cmd_config(args: argparse.Namespace) -> None:
    config = _load(args)
    _header("Configuração")
    print_config(config)
    print()


# ─────────────────────────────────────────────────────────────────────────────
# Argumentos CLI
# ─────────────────────────────────────────────────────────────────────────────

def _add_common(parser: argparse.ArgumentParser, shortcuts: bool = True) -> None:
    parser.add_argument(
        "--config", "-c",
        default=None,
        help="Arquivo KEY=value com a configuração do experimento",
    )
    parser.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="Sobrescreve uma chave (repetível)",
    )
    if shortcuts:
        parser.add_argument("--seed", type=int, default=None, help="Seed mestre")
        parser.add_argument("--trials", type=int, default=None, help="Trials por ponto do grid")
        parser.add_argument("--out", default=None, help="Caminho do CSV principal")
        parser.add_argument("--workers", type=int, default=None, help="Trials em paralelo")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phase-bench",
        description="Benchmark de phase retrieval robusto (ℓp, CRB, Monte-Carlo)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=textwrap.dedent("""\
        Exemplos:
          python main.py run --config configs/snr_laplacian.env
          python main.py run --config configs/outlier_sweep.env --trials 500
          python main.py run -c configs/p_sweep.env --set p_grid=0.5,1.0 --emit-plots
          python main.py crb --config configs/crb_table.env
          python main.py config --config configs/fourier2d_pipeline.env
        """),
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log em nível DEBUG")
    parser.add_argument("--quiet", "-q", action="store_true", help="Só avisos e erros no log")
    parser.add_argument("--no-color", action="store_true", help="Desabilita cores no output")

    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Executa o experimento e escreve os CSVs")
    _add_common(run)
    run.add_argument("--emit-plots", action="store_true", help="Escreve gráficos PNG ao lado do CSV")
    run.set_defaults(handler=cmd_run)

    crb = sub.add_parser("crb", help="Tabela de limites de Cramér–Rao")
    _add_common(crb)
    crb.set_defaults(handler=cmd_crb)

    show = sub.add_parser("config", help="Mostra a configuração resolvida e a origem de cada chave")
    _add_common(show, shortcuts=False)
    show.set_defaults(handler=cmd_config)

    return parser


# ─────────────────────────────────────────────────────────────────────────────
# Entry point
# ─────────────────────────────────────────────────────────────────────────────

def main(argv: Optional[list[str]] = None) -> int:
    global USE_COLOR

    load_dotenv()

    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.no_color:
        USE_COLOR = False
    _setup_logging(args.verbose, args.quiet)

    try:
        args.handler(args)
    except ConfigError as e:
        print(f"\n  {red(f'❌ Configuração inválida: {e}')}\n", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        print(f"\n\n  {yellow('⚠️  Interrompido pelo usuário.')}\n")
        return EXIT_RUNTIME
    except (OSError, ValueError, ArithmeticError) as e:
        print(f"\n  {red(f'❌ Erro: {e}')}\n", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
