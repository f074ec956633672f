"""Command-line interface: formats, exit codes, manifests, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from l1sketch import merge_breakpoints, uniform_density
from l1sketch.cli import main
from l1sketch.io import family_from_json, family_to_json, save_family


@pytest.fixture
def pair_family_path(tmp_path):
    fam = merge_breakpoints([uniform_density("a", 0.0, 1.0), uniform_density("b", 1.0, 2.0)])
    path = tmp_path / "pair.json"
    save_family(fam, str(path))
    return str(path)


def test_family_round_trip(tmp_path):
    fam = merge_breakpoints([uniform_density("a", 0.0, 1.0), uniform_density("b", 0.25, 1.25)])
    text = family_to_json(fam)
    back = family_from_json(text)
    assert back.names == fam.names
    np.testing.assert_array_equal(back.breakpoints.points, fam.breakpoints.points)
    for d1, d2 in zip(back.densities, fam.densities):
        assert [(s.b, s.c) for s in d1.segments] == [(s.b, s.c) for s in d2.segments]
        for s1, s2 in zip(d1.segments, d2.segments):
            np.testing.assert_array_equal(s1.coeffs, s2.coeffs)
    # canonical form is a fixed point
    assert family_to_json(back) == text


def test_dist_exact_csv(pair_family_path, tmp_path, capsys):
    out = tmp_path / "dist.csv"
    code = main(["dist", pair_family_path, "--method", "exact", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "name,a,b"
    row_a = [l for l in lines if l.startswith("a,")][0]
    assert row_a.split(",")[2] == "2.0"
    assert any(l.startswith("# manifest:") for l in lines)


def test_dist_json_embeds_manifest(pair_family_path, tmp_path):
    out = tmp_path / "dist.json"
    code = main(
        ["dist", pair_family_path, "--method", "exact", "--format", "json", "--out", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["names"] == ["a", "b"]
    assert doc["matrix"][0][1] == 2.0
    assert doc["manifest"]["command"] == "dist"
    assert len(doc["manifest"]["input_digest"]) == 64


def test_dist_sketch_rerun_byte_identical(pair_family_path, tmp_path):
    out1, out2 = tmp_path / "one.json", tmp_path / "two.json"
    args = [
        "dist", pair_family_path, "--method", "sketch", "--epsilon", "0.5",
        "--delta", "0.3", "--seed", "11", "--format", "json",
    ]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_dist_malformed_json_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"degree": 0, "breakpoints": [0, 1], "densities": [',)
    code = main(["dist", str(bad), "--method", "exact"])
    assert code == 2
    assert "line" in capsys.readouterr().err


def test_dist_structural_error_exit_2(tmp_path, capsys):
    doc = {
        "degree": 0,
        "breakpoints": [0.0, 1.0],
        "densities": [{"name": "x", "segments": [{"b": 0, "c": 0, "coeffs": [1.0]}]}],
    }
    bad = tmp_path / "bad2.json"
    bad.write_text(json.dumps(doc))
    code = main(["dist", str(bad), "--method", "exact"])
    assert code == 2
    assert capsys.readouterr().err


def test_dist_bad_epsilon_exit_3(pair_family_path, capsys):
    code = main(["dist", pair_family_path, "--method", "sketch", "--epsilon", "0.9"])
    assert code == 3
    assert "epsilon" in capsys.readouterr().err


def test_dist_missing_file_exit_2(capsys):
    assert main(["dist", "/nonexistent/family.json", "--method", "exact"]) == 2


def test_sample_ci1_zero_count(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sample", "ci1", "--count", "0", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# manifest:")
    assert lines[1] == "x0,x1" and len(lines) == 2  # no data rows


def test_sample_ci1_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sample", "ci1", "--count", "5", "--seed", "3", "--out", str(a)]) == 0
    assert main(["sample", "ci1", "--count", "5", "--seed", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = [r for r in a.read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == "x0,x1" and len(rows) == 6
    floats = [float(v) for v in rows[1].split(",")]
    assert all(np.isfinite(floats))


def test_sample_cid_shape(tmp_path):
    out = tmp_path / "c.csv"
    code = main(
        ["sample", "cid", "--d", "2", "--r", "50", "--count", "3", "--seed", "4", "--out", str(out)]
    )
    assert code == 0
    rows = [r for r in out.read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == "x0,x1,x2" and len(rows) == 4
    assert len(rows[1].split(",")) == 3


def test_eval_ci1_density_grid(tmp_path):
    out = tmp_path / "grid.csv"
    assert main(["eval", "ci1-density", "--grid", "-3:3:0.05", "--out", str(out)]) == 0
    rows = [r for r in out.read_text().splitlines() if not r.startswith("#")]
    assert len(rows) == 1 + 121 * 121
    vals = np.array([float(r.split(",")[2]) for r in rows[1:]])
    assert np.all(vals >= 0.0)
    origin = [r for r in rows[1:] if r.startswith("0.0,0.0,")]
    assert abs(float(origin[0].split(",")[2]) - 0.723595) < 1e-5


def test_eval_density_points(pair_family_path, tmp_path):
    out = tmp_path / "vals.csv"
    code = main(
        ["eval", "density", "--input", pair_family_path, "--name", "a",
         "--points", "0.5,1.5", "--out", str(out)]
    )
    assert code == 0
    rows = [r for r in out.read_text().splitlines() if not r.startswith("#")]
    assert float(rows[1].split(",")[1]) == 1.0
    assert float(rows[2].split(",")[1]) == 0.0


def test_eval_density_unknown_name(pair_family_path, capsys):
    code = main(["eval", "density", "--input", pair_family_path, "--name", "zz", "--points", "0"])
    assert code == 3


def test_calibrate_output(tmp_path):
    out = tmp_path / "cal.json"
    code = main(
        ["calibrate", "--d-max", "2", "--eps", "0.05", "--trials", "50",
         "--seed", "5", "--out", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["c"] > 0 and set(doc["per_degree"]) == {"1", "2"}
    assert doc["manifest"]["parameters"]["trials"] == 50


def test_bench_smoke(tmp_path):
    out = tmp_path / "bench.csv"
    code = main(
        ["bench", "--m", "3", "--n", "3", "--t", "1500", "3000",
         "--seed", "6", "--out", str(out)]
    )
    assert code == 0
    rows = [r for r in out.read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == "method,m,n,d,t,seconds"
    methods = {r.split(",")[0] for r in rows[1:]}
    assert methods == {"exact", "sketch"}
    assert all(float(r.split(",")[5]) > 0 for r in rows[1:])


def test_env_seed_default(pair_family_path, tmp_path, monkeypatch):
    monkeypatch.setenv("L1SKETCH_SEED", "77")
    out1 = tmp_path / "e1.json"
    assert main(["dist", pair_family_path, "--method", "sketch", "--epsilon", "0.5",
                 "--delta", "0.3", "--format", "json", "--out", str(out1)]) == 0
    monkeypatch.delenv("L1SKETCH_SEED")
    out2 = tmp_path / "e2.json"
    assert main(["dist", pair_family_path, "--method", "sketch", "--epsilon", "0.5",
                 "--delta", "0.3", "--seed", "77", "--format", "json", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_internal_error_exit_4(pair_family_path, monkeypatch, capsys):
    import l1sketch.cli as cli_mod
    from l1sketch import EnvelopeDominationError

    def boom(*args, **kwargs):
        raise EnvelopeDominationError("synthetic domination failure")

    monkeypatch.setattr(cli_mod, "run_scheme", boom)
    code = main(["dist", pair_family_path, "--method", "sketch", "--epsilon", "0.5",
                 "--delta", "0.3"])
    assert code == 4
    assert "internal" in capsys.readouterr().err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "l1sketch.cli", "--version"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "l1sketch" in proc.stdout
