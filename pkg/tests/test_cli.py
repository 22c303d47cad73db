import csv
import hashlib
import io
import json

import pytest

from spdcmodes.cli import main

SMALL = """
[grid]
size = 64
extent = 8.0
[hologram]
size = 128
[calibrate]
modes = [[0, -1], [0, 0], [0, 1]]
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.toml"
    p.write_text(SMALL)
    return str(p)


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_overlap_single_reports_both_paths(tmp_path, capsys):
    assert main(["overlap", "--pump", "1", "1", "--signal", "0", "0", "--idler", "2", "1", "--out", str(tmp_path)]) == 0
    (row,) = _rows(capsys.readouterr().out)
    assert row["note"] == "ok"
    assert float(row["discrepancy"]) < 1e-7
    assert float(row["c_closed"]) == pytest.approx(float(row["c_quadrature"]), rel=1e-9)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["command"] == "overlap" and "overlap.csv" in man["files"]
    assert set(man["versions"]) >= {"numpy", "scipy", "python"}
    assert man["files"]["overlap.csv"] == hashlib.sha256((tmp_path / "overlap.csv").read_bytes()).hexdigest()


def test_overlap_violation_annotated(tmp_path, capsys):
    assert main(["overlap", "--signal", "0", "1", "--idler", "0", "0", "--out", str(tmp_path)]) == 0
    (row,) = _rows(capsys.readouterr().out)
    assert float(row["c_closed"]) == 0 and float(row["probability"]) == 0
    assert row["note"].startswith("violates")


def test_overlap_batch_one_row_per_tuple(tmp_path, capsys):
    batch = tmp_path / "b.csv"
    batch.write_text("p_p,ell_p,p_s,ell_s,p_i,ell_i\n0,0,0,0,0,0\n0,1,0,0,0,0\n2,2,1,3,3,-1\n1,0,2,1,0,-1\n")
    assert main(["overlap", "--batch", str(batch), "--out", str(tmp_path / "o"), "--format", "json"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 4
    data = json.loads((tmp_path / "o" / "overlap.json").read_text())
    assert len(data) == 4 and data[1]["probability"] == 0
    assert max(r["discrepancy"] for r in data) < 1e-7


def test_bad_batch_is_config_error(tmp_path):
    batch = tmp_path / "b.csv"
    batch.write_text("1,2,3\n")
    assert main(["overlap", "--batch", str(batch), "--out", str(tmp_path)]) == 2


def test_config_error_exit(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("fiber = {sigma = -1.0}\n")
    assert main(["calibrate", "--config", str(bad), "--out", str(tmp_path)]) == 2


def test_numerical_failure_exit(tmp_path, small_cfg):
    assert main(["hologram", "--config", small_cfg, "--period", "1.5", "--out", str(tmp_path)]) == 3


def test_correlate_artifacts(tmp_path, capsys):
    assert main(["correlate", "--pump", "0", "1", "--ell-s", "0,1", "--out", str(tmp_path)]) == 0
    for stem in ("p_lg_ls0", "p_lg_ls1", "oam_lg", "oam_hygg"):
        for ext in ("csv", "pgm", "png"):
            assert (tmp_path / f"{stem}.{ext}").exists()
    rows = {r["matrix"]: r for r in _rows(capsys.readouterr().out)}
    assert set(rows) == {"p_lg_ls0", "p_lg_ls1", "oam_lg", "oam_hygg"}


def test_hologram_artifacts(tmp_path, small_cfg, capsys):
    assert main(["hologram", "--config", small_cfg, "--p", "0", "--ell", "1", "--out", str(tmp_path)]) == 0
    side = json.loads((tmp_path / "mask_p0_l1.json").read_text())
    assert side["grating_period_px"] == 8 and side["shape"] == [128, 128]
    assert 0.9 < side["round_trip_fidelity"] <= 1
    assert (tmp_path / "mask_p0_l1.pgm").read_bytes().startswith(b"P5\n128 128\n255\n")


def test_tomo_simulate_then_fit(tmp_path, capsys):
    sim, fit = tmp_path / "sim", tmp_path / "fit"
    assert main(["tomo", "simulate", "--seed", "2", "--out", str(sim)]) == 0
    assert len((sim / "records.csv").read_text().splitlines()) == 257
    assert main(["tomo", "fit", "--input", str(sim / "records.csv"), "--out", str(fit)]) == 0
    report = _rows((fit / "tomo_report.csv").read_text())[0]
    assert float(report["fidelity_to_theory"]) > 0.95
    assert (fit / "rho_fit_real.png").exists() and (fit / "rho_fit.json").exists()


def test_tomo_fit_missing_input(tmp_path):
    assert main(["tomo", "fit", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 2


def test_calibrate(tmp_path, small_cfg, capsys):
    assert main(["calibrate", "--config", small_cfg, "--sigma", "1.0", "--out", str(tmp_path)]) == 0
    rows = _rows(capsys.readouterr().out)
    eff = [float(r["efficiency"]) for r in rows]
    assert max(eff) == 1.0 and eff[0] == pytest.approx(eff[2])
    assert (tmp_path / "crosstalk.csv").exists() and (tmp_path / "crosstalk.png").exists()
