"""Resolução e validação da configuração dos experimentos."""

from __future__ import annotations

from pathlib import Path

import pytest

from experiment_config import (
    ConfigError,
    make_config,
    parse_overrides,
    print_config,
    read_config_file,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "experiment.env"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults():
    config = make_config(environ={})
    assert config.scenario == "snr_sweep"
    assert config.trials == 100
    assert config.solvers == ("alt_irls", "alt_gd", "gs")
    assert config.out == "results/snr_sweep.csv"
    assert config.signal_size == 16
    assert set(config.sources.values()) == {"default"}
    assert len(config.grid()) == 7


def test_file_is_case_insensitive_and_parses_lists(tmp_path):
    path = _write(tmp_path, "# comentário\nscenario=outlier_sweep\nOUTLIER_GRID=0, 0.1 ,0.2\nTRIALS=5\n")
    config = make_config(path, environ={})
    assert config.outlier_grid == (0.0, 0.1, 0.2)
    assert config.trials == 5
    assert config.sources["trials"] == "file"
    # defaults do cenário
    assert config.noise == "gmm"
    assert config.p == 0.4
    assert config.init == "staged"
    assert config.out == "results/outlier_sweep.csv"

    grid = config.grid()
    assert [pt["outlier_fraction"] for pt in grid] == [0.0, 0.1, 0.2]
    assert all(pt["snr_db"] == 10.0 and pt["p"] == 0.4 for pt in grid)


def test_precedence(tmp_path):
    path = _write(tmp_path, "TRIALS=5\n")
    env = {"PRBENCH_TRIALS": "6", "PRBENCH_LOG_LEVEL": "DEBUG"}

    assert make_config(path, environ={}).trials == 5
    config = make_config(path, environ=env)
    assert (config.trials, config.sources["trials"]) == (6, "env")
    assert make_config(path, overrides={"trials": "7"}, environ=env).trials == 7
    config = make_config(path, overrides={"trials": "7"}, cli={"trials": 8}, environ=env)
    assert (config.trials, config.sources["trials"]) == (8, "cli")


def test_unknown_file_key_is_rejected(tmp_path):
    path = _write(tmp_path, "BOGUS=1\n")
    with pytest.raises(ConfigError) as info:
        make_config(path, environ={})
    assert info.value.key == "bogus"


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "nada.env")


@pytest.mark.parametrize(
    "overrides, key",
    [
        ({"trials": "abc"}, "trials"),
        ({"trials": "0"}, "trials"),
        ({"emit_plots": "maybe"}, "emit_plots"),
        ({"scenario": "nope"}, "scenario"),
        ({"snr_grid": ""}, "snr_grid"),
        ({"solvers": "hio"}, "solvers"),
        ({"solvers": "alt_irls,magic"}, "solvers"),
        ({"signal": "image"}, "operator"),
        ({"ratio": "2.5"}, "ratio"),
        ({"scenario": "crb_table", "noise": "gmm"}, "noise"),
        ({"p": "2.5"}, "p"),
        ({"hio_beta": "1"}, "hio_beta"),
        ({"solvers": "alt_gd_block"}, "block_size"),
        ({"noise_scaling": "loud"}, "noise_scaling"),
        ({"noise_scaling": "fixed"}, "noise_scaling"),
        ({"noise": "gmm", "noise_scaling": "fixed"}, "noise_scaling"),
    ],
)
def test_invalid_values(overrides, key):
    with pytest.raises(ConfigError) as info:
        make_config(overrides=overrides, environ={})
    assert info.value.key == key


def test_noise_scaling():
    assert make_config(environ={}).noise_scaling == "snr"
    config = make_config(
        overrides={"scenario": "sample_complexity_sweep", "noise_scaling": "fixed"}, environ={},
    )
    assert config.noise_scaling == "fixed"
    assert (config.noise, config.gmm_c2, config.gmm_var1, config.gmm_var2) == ("gmm", 0.2, 0.0, 100.0)
    assert config.grid()[0]["outlier_fraction"] == 0.2


def test_fourier2d_pipeline_derived_values():
    config = make_config(overrides={"scenario": "fourier2d_pipeline"}, environ={})
    assert config.signal == "image" and config.operator == "fourier2d"
    assert config.signal_size == 256
    assert config.grid()[0]["ratio"] == 4.0
    assert config.solvers == ("hio", "gs", "alt_gd")
    assert config.solver_config("alt_gd", 1.3).max_iters == config.refine_iters


def test_solver_config_mapping():
    config = make_config(overrides={"block_size": "8", "schedule": "random"}, environ={})
    solver = config.solver_config("alt_gd_block", 0.7, seed=3)
    assert solver.variant == "gd_block"
    assert (solver.p, solver.block_size, solver.schedule, solver.seed) == (0.7, 8, "random", 3)
    with pytest.raises(ValueError):
        config.solver_config("gs", 2.0)


def test_parse_overrides():
    assert parse_overrides(["TRIALS=3", "snr_grid=0,10"]) == {"trials": "3", "snr_grid": "0,10"}
    with pytest.raises(ConfigError):
        parse_overrides(["trials"])
    with pytest.raises(ConfigError):
        parse_overrides(["nope=1"])


def test_explicit_out_is_kept():
    config = make_config(cli={"out": "x/y.csv"}, environ={})
    assert str(config.out_path) == "x/y.csv"


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.env")), ids=lambda p: p.stem)
def test_shipped_configs_are_valid(path):
    config = make_config(path, environ={})
    assert config.seed == 2024
    assert config.out.startswith("results/")


def test_print_config_shows_sources(tmp_path, capsys):
    path = _write(tmp_path, "TRIALS=5\n")
    print_config(make_config(path, overrides={"seed": "9"}, environ={}))
    out = capsys.readouterr().out
    assert "[file]" in out and "[cli]" in out and "[default]" in out
