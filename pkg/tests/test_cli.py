import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpmhd.cli import parse_config, read_snapshot, serialize
from lpmhd.cli.config import RunConfig
from lpmhd.cli.main import main
from lpmhd.errors import ConfigError

MHD = """# small mhd run
model = mhd
N = 4
h = 0.1
T_final = 1.0
output_every = 5
grid = 6, 8
"""

HAZELTINE = """model = hazeltine
N = 5
alpha = 2.0
h = 0.05
T_final = 0.5
seed = 17
L_cut = 3
gamma = 1.5
amplitude = 0.3
output_every = 2
sample_every = 2
grid = 8, 16
fp_tol = 1e-14
fp_max_iters = 80
baseline = false
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_minimal_config_defaults():
    cfg = parse_config("model = mhd\nN = 6\nT_final = 2\n")
    assert cfg.h == 0.1 and cfg.n_steps == 20
    assert cfg.L_cut == 5 and cfg.gamma == 2.0 and cfg.seed == 0
    assert cfg.fp_tol == 1e-13 and cfg.fp_max_iters == 100 and not cfg.baseline
    assert cfg.grid == (32, 64)


@pytest.mark.parametrize("text,key,line", [
    ("model = mhd\nT_final = 1\n", "N", None),
    ("model = hazeltine\nN = 4\nT_final = 1\n", "alpha", None),
    ("model = mhd\nN = 4\nT_final = 1\ncolour = red\n", "colour", 4),
    ("model = mhd\nN = 4\nN = 5\nT_final = 1\n", "N", 3),
    ("model = mhd\nN = four\nT_final = 1\n", "N", 2),
    ("model = mhd\nN = 4.5\nT_final = 1\n", "N", 2),
    ("model = mhd\nN = 4\nT_final = 0\n", "T_final", 3),
    ("model = mhd\nN = 4\nT_final = 0.25\n", "T_final", 3),
    ("model = mhd\nN = 1\nT_final = 1\n", "N", 2),
    ("model = mhd\nN = 4\nL_cut = 4\nT_final = 1\n", "L_cut", 3),
    ("model = stokes\nN = 4\nT_final = 1\n", "model", 1),
    ("model = mhd\nN = 4\nT_final = 1\nbaseline = maybe\n", "baseline", 4),
    ("model = mhd\nN = 4\nT_final = 1\ngrid = 4\n", "grid", 4),
    ("model = kirchhoff\nT_final = 1\nkirchhoff_a = 1, 1, 1\n", "kirchhoff_a", 3),
    ("model = kirchhoff\nT_final = 1\nkirchhoff_preset = custom\n", "kirchhoff_preset", 3),
    ("model = kirchhoff\nT_final = 1\nkirchhoff_preset = clebsch\nkirchhoff_a = 1, 2, 3\n"
     "kirchhoff_b = 1, 2, 3\nkirchhoff_c = 1, 1, 1\n", "kirchhoff_preset", 3),
    ("model = mhd\nN = 4\nT_final = 1\njust words\n", None, 4),
])
def test_config_errors_name_key_and_line(text, key, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.key == key
    if key is not None:
        assert f"'{key}'" in str(exc.value)
    if line is not None:
        assert exc.value.line == line and f"line {line}" in str(exc.value)


def test_hazeltine_roundtrip():
    cfg = parse_config(HAZELTINE)
    assert parse_config(serialize(cfg)) == cfg
    assert serialize(parse_config(serialize(cfg))) == serialize(cfg)


def test_kirchhoff_custom_roundtrip():
    text = ("model = kirchhoff\nT_final = 10\nkirchhoff_preset = custom\n"
            "kirchhoff_a = 1, 2, 3\nkirchhoff_b = 0.1, 0.2, 0, 0.2, 0.1, 0, 0, 0, 0.3\n"
            "kirchhoff_c = 1, 1, 2\n")
    cfg = parse_config(text)
    assert parse_config(serialize(cfg)) == cfg


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["euler", "mhd", "hazeltine"]), st.integers(2, 40),
       st.integers(1, 500), st.sampled_from([0.1, 0.05, 0.2, 0.025]),
       st.floats(-5, 5), st.integers(0, 2**32), st.floats(0, 4), st.booleans())
def test_serialize_roundtrip_property(model, N, steps, h, alpha, seed, gamma, baseline):
    cfg = RunConfig(model=model, T_final=steps * h, N=N, h=h, alpha=alpha, seed=seed,
                    L_cut=N - 1, gamma=gamma, baseline=baseline)
    assert parse_config(serialize(cfg)) == cfg


def run_cli(*args):
    return main(list(args) + ["--quiet"])


def read(path):
    with open(path) as fh:
        return fh.read()


def test_check_and_run_outputs(tmp_path):
    cfg = write(tmp_path, "mhd.cfg", MHD)
    assert run_cli("check", cfg) == 0
    out = tmp_path / "out"
    assert run_cli("run", cfg, "--out", str(out)) == 0
    for name in ("manifest.txt", "timeseries.txt"):
        assert read(out / name).startswith("# lpmhd")
    lines = read(out / "timeseries.txt").splitlines()
    cols = lines[1].split()
    assert cols[:4] == ["step", "time", "iterations", "H"]
    assert "tr_w_theta^1" in cols and "eig_Theta_0" in cols
    assert len(lines) == 2 + 11
    snaps = sorted(os.listdir(out / "snapshots"))
    assert snaps == ["snap_00000000.txt", "snap_00000005.txt", "snap_00000010.txt"]
    grids = sorted(os.listdir(out / "grids"))
    assert len(grids) == 6 and "grid_00000000_W.txt" in grids
    g = np.loadtxt(out / "grids" / grids[0])
    assert g.shape == (6, 8)
    state, header = read_snapshot(out / "snapshots" / snaps[-1])
    assert header["step"] == 10 and header["names"] == ["W", "Theta"]
    assert header["algebra"] == "su" and state[0].shape == (4, 4)
    manifest = read(out / "manifest.txt")
    assert "seed = 0" in manifest and "numpy_version" in manifest


def test_determinism(tmp_path):
    cfg = write(tmp_path, "h.cfg", HAZELTINE)
    assert run_cli("run", cfg, "--out", str(tmp_path / "a")) == 0
    assert run_cli("run", cfg, "--out", str(tmp_path / "b")) == 0
    for rel in ("timeseries.txt", "manifest.txt", "snapshots/snap_00000010.txt"):
        assert read(tmp_path / "a" / rel) == read(tmp_path / "b" / rel)


def test_resume_matches_uninterrupted(tmp_path):
    cfg = write(tmp_path, "h.cfg", HAZELTINE)
    full = tmp_path / "full"
    assert run_cli("run", cfg, "--out", str(full)) == 0
    snap = str(full / "snapshots" / "snap_00000004.txt")
    res = tmp_path / "res"
    assert run_cli("resume", snap, cfg, "--out", str(res)) == 0
    a, _ = read_snapshot(full / "snapshots" / "snap_00000010.txt")
    b, _ = read_snapshot(res / "snapshots" / "snap_00000010.txt")
    assert max(np.linalg.norm(x - y) for x, y in zip(a, b)) < 1e-12
    assert "resumed_step = 4" in read(res / "manifest.txt")
    # the resumed series starts at the snapshot step
    assert read(res / "timeseries.txt").splitlines()[2].split()[0] == "4"


def test_resume_rejects_mismatch(tmp_path):
    cfg = write(tmp_path, "h.cfg", HAZELTINE)
    out = tmp_path / "o"
    assert run_cli("run", cfg, "--out", str(out)) == 0
    other = write(tmp_path, "m.cfg", MHD)
    assert run_cli("resume", str(out / "snapshots" / "snap_00000004.txt"), other) == 2
    assert run_cli("resume", str(out / "snapshots" / "snap_00000010.txt"), cfg) == 2
    assert run_cli("resume", str(out / "manifest.txt"), cfg) == 2


def test_kirchhoff_run(tmp_path):
    cfg = write(tmp_path, "k.cfg", "model = kirchhoff\nkirchhoff_preset = lsk\nT_final = 5\n"
                "output_every = 10\n")
    out = tmp_path / "k"
    assert run_cli("run", cfg, "--out", str(out)) == 0
    assert not (out / "grids").exists()
    state, header = read_snapshot(out / "snapshots" / "snap_00000050.txt")
    assert header["algebra"] == "so3" and np.all(state[0].imag == 0)
    data = np.loadtxt(out / "timeseries.txt", skiprows=2)
    names = read(out / "timeseries.txt").splitlines()[1].split()
    col = data[:, names.index("tr_w_theta^1")]
    assert np.max(np.abs(col - col[0])) < 1e-12


def test_baseline_marker(tmp_path):
    cfg = write(tmp_path, "b.cfg", MHD + "baseline = true\n")
    out = tmp_path / "b"
    assert run_cli("run", cfg, "--out", str(out)) == 0
    assert "baseline 1" in read(out / "timeseries.txt").splitlines()[0]


def test_exit_codes(tmp_path):
    assert run_cli("check", write(tmp_path, "bad.cfg", "model = mhd\nT_final = 1\n")) == 2
    assert run_cli("check", str(tmp_path / "missing.cfg")) == 2
    fail = write(tmp_path, "f.cfg", MHD.replace("h = 0.1", "h = 0.5") + "fp_max_iters = 2\n"
                 "amplitude = 5\n")
    out = tmp_path / "f"
    assert run_cli("run", fail, "--out", str(out)) == 3
    # manifest and the partial series are on disk
    assert "fp_max_iters = 2" in read(out / "manifest.txt")
    assert len(read(out / "timeseries.txt").splitlines()) == 3
