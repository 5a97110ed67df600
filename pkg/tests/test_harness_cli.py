import csv
import io
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest

from fixedb import cli
from fixedb.fixedb_limits import LimitSimConfig, parse_table
from fixedb.harness import (
    CSV_HEADER,
    ExperimentConfig,
    parse_config,
    paper_scale,
    regen_cv_table,
    rows_to_csv,
    run_experiment,
)
from fixedb.series_gen import ModelSpec

IID_CFG = """
# iid Gaussian, mean interval
model = arma11
rho = 0
n = 100
b_list = 0.1
calibration = small-b
target = ci-mean
reps = 1000
seed = 17
"""


def test_parse_config():
    cfg = parse_config("""
        model = tar1   # threshold model
        rho = 0.4
        err = centered_exponential
        n = 200
        b_list = 0.05, 0.1
        calibration = small-b, double-ss, double-ss-bs
        n_prime = 20
        bs = 5, 40, 0.75
        target = region-mean-median
        B = 100
        reps = 3
        workers = 2
    """)
    assert cfg.model.rho == 0.4 and cfg.model.family.value == "tar1"
    assert cfg.b_list == (0.05, 0.1)
    assert cfg.calibrations == ("small-b", "double-ss", "double-ss-bs")
    assert cfg.bs == (5, 40, 0.75) and cfg.B == 100 and cfg.workers == 2
    with pytest.raises(ValueError):
        parse_config("colour = blue")
    with pytest.raises(ValueError):
        parse_config("n 100")


@pytest.mark.parametrize("changes", [
    dict(reps=0),
    dict(alpha=1.0),
    dict(b_list=(0.1, 1.2)),
    dict(b_list=(0.3,), calibrations=("fixed-b",)),
    dict(target="cdf-band", calibrations=("fixed-b",)),
    dict(target="ci-mean", calibrations=("double-ss",)),
    dict(target="cdf-band", method="mbb"),
    dict(target="volume"),
])
def test_invalid_configs(changes):
    with pytest.raises(ValueError):
        ExperimentConfig(**changes)


def test_iid_mean_coverage_corridor():
    rows = run_experiment(parse_config(IID_CFG))
    assert len(rows) == 1
    assert 0.88 <= rows[0].coverage <= 0.97


def test_single_replication_row():
    cfg = replace(parse_config(IID_CFG), reps=1)
    (row,) = run_experiment(cfg)
    assert row.coverage in (0.0, 1.0) and row.reps_used == 1 and row.mean_size > 0
    text = rows_to_csv([row])
    parsed = list(csv.reader(io.StringIO(text)))
    assert tuple(parsed[0]) == CSV_HEADER and len(parsed[1]) == len(CSV_HEADER)


def test_coverage_multiple_of_one_over_reps():
    cfg = ExperimentConfig(ModelSpec(rho=0.5), n=60, b_list=(0.1, 0.2), reps=37, seed=2,
                           calibrations=("small-b", "fixed-b"))
    for row in run_experiment(cfg):
        assert abs(row.coverage * 37 - round(row.coverage * 37)) < 1e-12
        assert 0 <= row.coverage <= 1 and row.mean_size >= 0


def test_deterministic_and_worker_invariant():
    cfg = ExperimentConfig(ModelSpec(rho=0.5), n=80, b_list=(0.1,), method="mbb", B=200, reps=24,
                           seed=5, calibrations=("small-b", "fixed-b"), shape="equal-tailed", alpha=0.1)
    one = rows_to_csv(run_experiment(cfg, workers=1, chunk=5))
    again = rows_to_csv(run_experiment(cfg, workers=1, chunk=5))
    two = rows_to_csv(run_experiment(cfg, workers=2, chunk=7))
    assert one == again == two
    other = rows_to_csv(run_experiment(replace(cfg, seed=6)))
    assert other != one


@pytest.mark.parametrize("target,cals", [
    ("ci-trimmed-mean", ("small-b", "fixed-b")),
    ("region-mean-median", ("small-b", "double-ss", "double-ss-bs")),
    ("cdf-band", ("small-b", "double-ss")),
    ("spec-band", ("small-b", "double-ss")),
])
def test_targets_run(target, cals):
    cfg = ExperimentConfig(ModelSpec(rho=0.3), n=120, b_list=(0.1,), target=target, calibrations=cals,
                           reps=4, seed=1)
    rows = run_experiment(cfg)
    assert [r.calibration for r in rows] == list(cals)


def test_paper_scale_preset():
    cfg = paper_scale(parse_config(IID_CFG))
    assert (cfg.reps, cfg.B) == (10_000, 5_000)
    assert paper_scale(ExperimentConfig(target="cdf-band", calibrations=("small-b",))).reps == 1_000


def test_regen_table_small(caplog):
    cfg = LimitSimConfig(paths=300, grid_n=400, boot_draws=300, seed=4)
    with caplog.at_level("INFO"):
        fits = regen_cv_table(cfg, b_grid=[0.05, 0.1, 0.15, 0.2], h_b_grid=[0.05, 0.1, 0.15, 0.2],
                              kinds=("G", "H"))
    assert "b=0.15" in caplog.text
    assert [(f.kind, f.alpha) for f in fits] == [("G", 0.05), ("G", 0.1), ("H", 0.05), ("H", 0.1)]
    assert all(f.a0 == f.alpha for f in fits)
    with pytest.raises(ValueError):
        regen_cv_table(cfg, b_grid=[0.1], kinds=("G",))


# ---------------------------------------------------------------------------
# command line


@pytest.fixture
def series_file(tmp_path):
    x = np.random.default_rng(0).standard_normal(100)
    path = tmp_path / "series.txt"
    path.write_text("# test series\n" + "\n".join(repr(float(v)) for v in x) + "\n\n")
    return path, x


def test_cli_ci(series_file, capsys):
    path, x = series_file
    assert cli.main(["ci", "--data", str(path), "--l", "10", "--alpha", "0.05", "--method", "ss",
                     "--calibration", "fixed-b", "--shape", "symmetric"]) == 0
    lo, hi = map(float, capsys.readouterr().out.split())
    assert lo < x.mean() < hi


def test_cli_pvalue_and_region(series_file, capsys):
    path, _ = series_file
    assert cli.main(["pvalue", "--data", str(path), "--l", "10", "--theta0", "0"]) == 0
    out = capsys.readouterr().out
    assert "/91)" in out or out.strip() == "1 (1/1)"
    assert cli.main(["region", "--data", str(path), "--b", "0.1", "--n-prime", "15"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("center ") and "radius" in out


def test_cli_band_writes_file(series_file, tmp_path, capsys):
    path, _ = series_file
    out = tmp_path / "band.csv"
    assert cli.main(["band", "--data", str(path), "--b", "0.1", "--bickel-sakov", "10,60,0.75",
                     "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "point,center,lower,upper" and len(lines) == 102


def test_cli_select_blocksize(series_file, capsys):
    path, _ = series_file
    assert cli.main(["select-blocksize", "--data", str(path), "--b", "0.1", "--target", "cdf-band",
                     "--bickel-sakov", "10,60,0.75"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("n_prime ")
    assert out[1] == "sequence 60 45 33 25 18 14 10"


def test_cli_coverage(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(IID_CFG)
    out = tmp_path / "r.csv"
    assert cli.main(["coverage", "--config", str(cfg), "--out", str(out), "--reps", "20"]) == 0
    first = out.read_text()
    assert first.splitlines()[0] == ",".join(CSV_HEADER)
    assert cli.main(["coverage", "--config", str(cfg), "--out", str(out), "--reps", "20"]) == 0
    assert out.read_text() == first


def test_cli_regen_table(tmp_path):
    out = tmp_path / "t.csv"
    assert cli.main(["regen-table", "--paths", "200", "--grid-n", "400", "--kinds", "G,Gtilde",
                     "--b-grid", "0.05,0.1,0.15,0.2", "--out", str(out)]) == 0
    table = parse_table(out.read_text())
    assert set(table) == {("G", 0.05), ("G", 0.1), ("Gtilde", 0.05), ("Gtilde", 0.1)}


def test_cli_unknown_flag_exits_nonzero():
    proc = subprocess.run([sys.executable, "-m", "fixedb.cli", "ci", "--bogus"], capture_output=True, text=True)
    assert proc.returncode != 0
    assert "usage:" in proc.stderr


def test_cli_reports_value_errors(series_file, capsys):
    path, _ = series_file
    assert cli.main(["ci", "--data", str(path), "--l", "500"]) == 2
    assert "error" in capsys.readouterr().err
