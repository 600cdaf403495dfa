import os

import pytest

from sparseica.run_bench import EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, main
from sparseica.sweep import RunRecord, read_runs_csv, read_summary_csv, write_runs_csv

GINI_CONFIG = """experiment = gini_vs_beta
sweep_values = 0.2, 0.4
N = 3
T = 400
runs = 2
"""


@pytest.fixture
def gini_config(tmp_path):
    path = tmp_path / "gini.cfg"
    path.write_text(GINI_CONFIG)
    return str(path)


def test_sweep_writes_all_outputs(gini_config, tmp_path):
    out = tmp_path / "results"
    code = main(["sweep", "--config", gini_config, "--out", str(out), "--workers", "1"])
    assert code == EXIT_OK
    for name in ("runs.csv", "summary.csv", "manifest.json", "plot.svg"):
        assert (out / name).exists()
    assert len(read_runs_csv(str(out / "runs.csv"))) == 4
    assert len(read_summary_csv(str(out / "summary.csv"))) == 2


def test_runs_override(gini_config, tmp_path):
    out = tmp_path / "results"
    assert main(["sweep", "--config", gini_config, "--out", str(out), "--workers", "1", "--runs", "1"]) == EXIT_OK
    assert len(read_runs_csv(str(out / "runs.csv"))) == 2


def test_invalid_config_exits_with_validation_code(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text(GINI_CONFIG + "runs = 0\n")
    assert main(["sweep", "--config", str(path), "--workers", "1"]) == EXIT_VALIDATION


def test_missing_config_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == EXIT_VALIDATION


def test_bad_arguments_exit_with_validation_code(gini_config):
    assert main(["sweep", "--config", gini_config, "--workers", "0"]) == EXIT_VALIDATION
    assert main(["no-such-command"]) == EXIT_VALIDATION


def test_run_single(gini_config, capsys):
    assert main(["run", "--config", gini_config, "--value", "0.4"]) == EXIT_OK
    assert "gini =" in capsys.readouterr().out


def test_gen_exports_dataset(gini_config, tmp_path):
    out = tmp_path / "data"
    assert main(["gen", "--config", gini_config, "--out", str(out)]) == EXIT_OK
    assert (out / "sources.csv").exists()


def test_summarize_and_plot(tmp_path):
    runs_csv = tmp_path / "runs.csv"
    records = [
        RunRecord("isr_vs_beta", "ebm", value, index, 1, "normalized_isr", metric, 0.0, True)
        for value, metric in ((0.1, 0.02), (0.5, 0.005))
        for index in range(3)
    ]
    write_runs_csv(records, str(runs_csv))

    assert main(["summarize", "--runs-csv", str(runs_csv)]) == EXIT_OK
    summary = tmp_path / "summary.csv"
    assert summary.exists()

    svg = tmp_path / "plot.svg"
    assert main(["plot", "--summary", str(summary), "--out", str(svg), "--log-y"]) == EXIT_OK
    assert 'id="series-ebm"' in svg.read_text()


def test_plot_of_empty_summary_writes_nothing(tmp_path):
    summary = tmp_path / "summary.csv"
    summary.write_text(
        "experiment,algorithm,sweep_value,n_runs,mean,median,q25,q75,n_excluded\n"
    )
    svg = tmp_path / "plot.svg"
    assert main(["plot", "--summary", str(summary), "--out", str(svg)]) == EXIT_VALIDATION
    assert not os.path.exists(svg)


def test_plot_of_all_nan_summary_is_a_runtime_failure(tmp_path):
    summary = tmp_path / "summary.csv"
    summary.write_text(
        "experiment,algorithm,sweep_value,n_runs,mean,median,q25,q75,n_excluded\n"
        "isr_vs_beta,ebm,0.1,0,nan,nan,nan,nan,3\n"
        "isr_vs_beta,sparse_ebm,0.1,0,nan,nan,nan,nan,3\n"
    )
    svg = tmp_path / "plot.svg"
    assert main(["plot", "--summary", str(summary), "--out", str(svg)]) == EXIT_RUNTIME
    assert not os.path.exists(svg)
