import numpy as np
import pytest

from spdcmodes import io as aio
from spdcmodes.config import DEFAULTS, RunConfig, config_hash, load
from spdcmodes.correlations import p_correlation_matrix
from spdcmodes.errors import ConfigError, IncompleteData
from spdcmodes.overlap import PumpSpec
from spdcmodes.tomography import DensityMatrix, simulate_records, theory_state


def test_defaults_valid():
    cfg = load()
    assert cfg == DEFAULTS
    assert cfg["waist_ratio"] == 0.2 and cfg["hygg_waist_ratio"] == 0.1


def test_precedence_flags_over_file_over_defaults(tmp_path):
    f = tmp_path / "run.toml"
    f.write_text('waist_ratio = 0.3\n[noise]\nseed = 4\nmean_counts = 500.0\n')
    cfg = load(f, {"noise": {"seed": 9}})
    assert cfg["waist_ratio"] == 0.3
    assert cfg["noise"]["seed"] == 9
    assert cfg["noise"]["mean_counts"] == 500.0
    assert cfg["noise"]["dark"] == DEFAULTS["noise"]["dark"]


@pytest.mark.parametrize("text", [
    "waist_ratio = -1.0",
    "p_range = []",
    "bogus = 1",
    "[pump]\np = 1.5",
    "[output]\nformats = ['xml']",
    "[calibrate]\nmodes = [[0]]",
    "pump = 3",
    "not toml at all [",
])
def test_invalid_configs(tmp_path, text):
    f = tmp_path / "bad.toml"
    f.write_text(text)
    with pytest.raises(ConfigError):
        load(f)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load(tmp_path / "absent.toml")


def test_hash_ignores_output_dir_only():
    a = RunConfig.load(overrides={"output": {"dir": "x"}})
    b = RunConfig.load(overrides={"output": {"dir": "y"}})
    c = RunConfig.load(overrides={"noise": {"seed": 1}})
    d = RunConfig.load(overrides={"output": {"formats": ["json"]}})
    assert a.hash == b.hash == config_hash(load())
    assert a.hash != c.hash and a.hash != d.hash


def test_matrix_csv_round_trip(tmp_path):
    m = p_correlation_matrix(PumpSpec.of(1, 0), 0)
    aio.write_matrix_csv(tmp_path / "m.csv", m.values, m.axis_s, m.axis_i)
    rows, cols, vals = aio.read_matrix_csv(tmp_path / "m.csv")
    assert rows == ["0", "1", "2", "3"] and cols == rows
    assert np.array_equal(vals, m.values)


def test_pgm_round_trip(tmp_path):
    vals = np.array([[0.0, 0.5], [1.0, 0.25]])
    aio.write_pgm(tmp_path / "a.pgm", vals)
    img = aio.read_pgm(tmp_path / "a.pgm")
    assert img.tolist() == [[0, 128], [255, 64]]
    raw = np.arange(6, dtype=np.uint8).reshape(2, 3)
    aio.write_pgm(tmp_path / "b.pgm", raw)
    assert np.array_equal(aio.read_pgm(tmp_path / "b.pgm"), raw)


@pytest.mark.parametrize("suffix", ["csv", "json"])
def test_records_round_trip(tmp_path, suffix):
    recs = simulate_records(theory_state(PumpSpec.of(0, 0), 1), mean_counts=50, seed=2, normalize=False)
    path = tmp_path / f"r.{suffix}"
    (aio.write_records_csv if suffix == "csv" else aio.write_records_json)(path, recs)
    back = aio.read_records(path)
    assert [(r.projector.key, r.count) for r in back] == [(r.projector.key, r.count) for r in recs]


def test_records_unknown_label(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("psi,zeta,count\n0,9,3\n")
    with pytest.raises(IncompleteData):
        aio.read_records(path)


def test_density_dict_round_trip(tmp_path):
    rho = theory_state(PumpSpec.of(1, 0), 1)
    d = aio.density_to_dict(rho)
    assert d["basis"][:5] == ["00", "01", "02", "03", "10"]
    assert np.allclose(aio.density_from_dict(d).matrix, rho.matrix)
    aio.write_density_bars(tmp_path / "b.csv", DensityMatrix.maximally_mixed())
    lines = (tmp_path / "b.csv").read_text().splitlines()
    assert lines[0] == "row,col,real,imag" and len(lines) == 257
