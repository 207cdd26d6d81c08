"""CLI: comandos, arquivos escritos e códigos de saída."""

from __future__ import annotations

import pandas as pd
import pytest

from main import EXIT_CONFIG, EXIT_OK, main
from tools.report import COLUMNS, read_rows

TINY = """\
SCENARIO=snr_sweep
SIGNAL_LENGTH=8
RATIO=4
SNR_GRID=10
SOLVERS=alt_irls,gs
MAX_ITERS=10
TRIALS=1
WORKERS=1
SEED=3
"""


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    import os

    for key in list(os.environ):
        if key.startswith("PRBENCH_"):
            monkeypatch.delenv(key)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "tiny.env"
    path.write_text(TINY, encoding="utf-8")
    return path


def test_run_writes_csv_and_sidecars(tmp_path, config_file):
    out = tmp_path / "res" / "tiny.csv"
    code = main(["--quiet", "--no-color", "run", "--config", str(config_file), "--out", str(out)])
    assert code == EXIT_OK
    rows = pd.read_csv(out)
    assert list(rows.columns) == COLUMNS
    assert rows["solver"].tolist() == ["alt_irls", "gs"]
    assert (tmp_path / "res" / "tiny.summary.csv").exists()
    assert (tmp_path / "res" / "tiny.timing.csv").exists()
    assert not (tmp_path / "res" / "tiny.costs.csv").exists()


def test_run_writes_cost_sidecar_when_recording(tmp_path, config_file):
    out = tmp_path / "tiny.csv"
    code = main(["-q", "run", "-c", str(config_file), "--out", str(out), "--set", "record_costs=true"])
    assert code == EXIT_OK
    costs = pd.read_csv(tmp_path / "tiny.costs.csv")
    assert set(costs["solver"]) == {"alt_irls"}
    assert costs["iteration"].iloc[0] == 0


def test_run_shortcuts_override_file(tmp_path, config_file):
    out = tmp_path / "tiny.csv"
    code = main(["-q", "run", "-c", str(config_file), "--out", str(out), "--trials", "2", "--set", "solvers=gs"])
    assert code == EXIT_OK
    rows = pd.read_csv(out)
    assert rows["trial"].tolist() == [0, 1]
    assert set(rows["solver"]) == {"gs"}


def test_run_emits_plots(tmp_path, config_file):
    out = tmp_path / "tiny.csv"
    assert main(["-q", "run", "-c", str(config_file), "--out", str(out), "--emit-plots"]) == EXIT_OK
    assert (tmp_path / "tiny.mse_db.png").exists()
    assert (tmp_path / "tiny.success_rate.png").exists()


def test_crb_command(tmp_path, config_file):
    out = tmp_path / "crb.csv"
    assert main(["-q", "crb", "-c", str(config_file), "--out", str(out)]) == EXIT_OK
    rows = read_rows(out)
    assert rows["solver"].tolist() == ["crb"]
    assert rows["crb_gaussian"].iloc[0] == 2 * rows["crb_laplacian"].iloc[0]


def test_config_command_prints_sources(config_file, capsys):
    assert main(["--no-color", "config", "-c", str(config_file), "--set", "trials=4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[file]" in out and "[cli]" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--set", "trials=0"],
        ["run", "--set", "trials"],
        ["run", "--set", "unknown=1"],
        ["config", "--config", "nao/existe.env"],
    ],
)
def test_invalid_configuration_exit_code(argv, tmp_path):
    assert main(["-q", *argv, *(["--out", str(tmp_path / "x.csv")] if argv[0] == "run" else [])]) == EXIT_CONFIG
    assert not (tmp_path / "x.csv").exists()
