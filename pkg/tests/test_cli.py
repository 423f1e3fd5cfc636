import os
import subprocess
import sys
from pathlib import Path

import pytest

from largej.cli import main

REPO = Path(__file__).resolve().parents[1]


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    env["PYTHONPATH"] = str(REPO / "src")
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "largej.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )


def test_missing_config_file_exits_2(tmp_path):
    res = run_cli(["spectrum", "--config", str(tmp_path / "nope.cfg")])
    assert res.returncode == 2
    assert "not found" in res.stderr


def test_unknown_structure_exits_2():
    assert main(["spectrum", "--structure", "7.7"]) == 2


def test_empty_j_range_exits_2():
    assert main(["regge", "--structure", "2.7", "--j-min", "9", "--j-max", "3"]) == 2


def test_reduce_csv_schema(tmp_path):
    out = tmp_path / "reduce.csv"
    code = main([
        "reduce", "--structure", "2.7", "--j", "8", "--E", "2.0",
        "--r-min", "0.5", "--r-max", "20", "--points", "64",
        "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "r,W1,W2,Y,Z,det_V22"
    data = [l for l in lines if l and not l.startswith("#")][1:]
    assert len(data) > 40
    zs = [abs(float(l.split(",")[4])) for l in data]
    assert max(zs) <= 1e-10  # scalar structure: Z vanishes


def test_reduce_pole_footer_in_natural_sector(tmp_path):
    out = tmp_path / "reduce_nat.csv"
    code = main([
        "reduce", "--structure", "2.6", "--j", "8", "--E", "3.03",
        "--sector", "natural", "--r-min", "0.5", "--r-max", "40",
        "--points", "64", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert any(l.startswith("# pole:") for l in lines)


def test_spectrum_csv_sorted_and_labeled(tmp_path):
    out = tmp_path / "spec.csv"
    code = main([
        "spectrum", "--structure", "2.6", "--j-min", "8", "--j-max", "10",
        "--nr-max", "1", "--out", str(out),
    ])
    assert code == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "j,n_r,family,E,E2,label,status"
    rows = [l.split(",") for l in lines[1:]]
    fams = [r[2] for r in rows]
    assert fams == sorted(fams, key=lambda f: ["A", "0", "-", "+"].index(f))
    assert all(r[6] == "ok" for r in rows)


def test_config_file_roundtrip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("structure = 2.6\nj-min = 8\nj-max = 9\nnr-max = 0\n")
    out = tmp_path / "o.csv"
    assert main(["spectrum", "--config", str(cfg), "--out", str(out)]) == 0
    body = out.read_text()
    assert "2.6" in body.splitlines()[0]


def test_regge_deterministic_across_thread_envs(tmp_path):
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"regge_{threads}.csv"
        res = run_cli(
            ["regge", "--structure", "2.7", "--j-min", "8", "--j-max", "12",
             "--nr-max", "1", "--out", str(out)],
            env_extra={"OMP_NUM_THREADS": threads,
                       "OPENBLAS_NUM_THREADS": threads},
        )
        assert res.returncode == 0, res.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_regge_slope_annotation_matches_data(tmp_path):
    out = tmp_path / "regge.csv"
    assert main([
        "regge", "--structure", "2.6", "--j-min", "8", "--j-max", "16",
        "--nr-max", "0", "--out", str(out),
    ]) == 0
    lines = out.read_text().splitlines()
    rows = [l.split(",") for l in lines if l and not l.startswith("#")][1:]
    a_rows = [(int(r[3]), float(r[5])) for r in rows if r[1] == "A"]
    a_rows.sort()
    slope = (a_rows[-1][1] - a_rows[0][1]) / (a_rows[-1][0] - a_rows[0][0])
    notes = [l for l in lines if l.startswith("# slope_E2_vs_ell family=A")]
    assert notes
    annotated = float(notes[0].split("sigma=")[1])
    assert annotated == pytest.approx(slope, rel=1e-12)
    # slope equals k a = 4 * 0.27 up to the finite-j tail
    assert slope == pytest.approx(4 * 0.27, rel=1e-3)
