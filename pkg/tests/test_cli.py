import json
import subprocess
import sys
from math import pi

import pytest

from toeplab.cli import main

A1_POLY = {"terms": [{"gamma": [1, 0], "delta": [1, 0], "re": 1.0, "im": 0.0}]}
A1_INV = {"terms": [{"gamma": [1, 0], "coeff": 1}]}
A2_INV = {"terms": [{"gamma": [0, 1], "coeff": 1}]}
F_X = {"coeffs": [0, 1], "label": "x"}


def run_cli(tmp_path, experiment, manifest, extra=()):
    mpath = tmp_path / "manifest.json"
    mpath.write_text(json.dumps(manifest))
    out = tmp_path / "out"
    code = main(["--experiment", experiment, "--manifest", str(mpath), "--out", str(out), *extra])
    return code, out


def test_theorem1_run(tmp_path):
    manifest = {"n": 2, "symbol": A1_POLY, "f": F_X, "k_list": [10, 20, 30, 40], "fit_order": 1}
    code, out = run_cli(tmp_path, "theorem1", manifest)
    assert code == 0
    assert (out / "measures.csv").exists() and (out / "run.json").exists()
    fit = json.loads((out / "fit.json").read_text())
    # scaled measure is pi (1 + 1/k) on the nose
    assert fit["c"][0] == pytest.approx(pi, abs=1e-9)
    assert fit["c"][1] == pytest.approx(pi, abs=1e-7)
    lines = (out / "measures.csv").read_text().splitlines()
    assert lines[0] == "n,k,m,f_id,mu,scaled_mu"
    assert len(lines) == 5


def test_theorem2_run(tmp_path):
    manifest = {
        "subtorus": {"example": "diagonal_circle_2"},
        "symbol": A1_INV,
        "f": F_X,
        "k_list": [10, 15, 20, 25, 30],
        "samples": 50000,
        "seed": 1,
    }
    code, out = run_cli(tmp_path, "theorem2", manifest)
    assert code == 0
    payload = json.loads((out / "fit.json").read_text())
    assert payload["regular_free"]["ok"] is True
    assert payload["fit"]["c"][0] == pytest.approx(pi, abs=1e-6)
    assert abs(payload["leading_estimate"] - pi) < 5 * payload["leading_stderr"]
    lines = (out / "fiber_measures.csv").read_text().splitlines()
    assert lines[0] == "k,count,mu,scaled_mu"
    assert len(lines) == 6


def test_theorem2_regularity_failure_exits_3(tmp_path):
    manifest = {
        "subtorus": {"example": "weighted_line"},
        "symbol": A1_INV,
        "f": F_X,
        "k_list": [10, 15, 20],
    }
    code, _ = run_cli(tmp_path, "theorem2", manifest)
    assert code == 3


def test_inverse_run(tmp_path):
    manifest = {
        "n": 2,
        "symbol": A1_INV,
        "grid": [["0", "1"], ["1/2", "1/2"], ["1/4", "3/4"]],
        "k_max_list": [16, 32, 64],
        "order": 1,
    }
    code, out = run_cli(tmp_path, "inverse", manifest)
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert [r["k_max"] for r in summary["runs"]] == [16, 32, 64]
    assert all(r["missing_points"] == 0 for r in summary["runs"])
    assert summary["runs"][-1]["max_abs_err"] < 1e-3
    # one acceleration step leaves an O(k^-2) tail
    assert summary["slope"] < -1.5
    lines = (out / "reconstruction.csv").read_text().splitlines()
    assert lines[0].startswith("k_max,point,levels,estimate,truth")
    assert len(lines) == 10


def test_inverse_rejects_both_k_max_forms(tmp_path):
    manifest = {
        "n": 2,
        "symbol": A1_INV,
        "grid": [["1/2", "1/2"]],
        "k_max": 16,
        "k_max_list": [16, 32],
    }
    code, _ = run_cli(tmp_path, "inverse", manifest)
    assert code == 2


def test_model_run(tmp_path):
    manifest = {"states": [{"m": [1], "k_dim": 1}, {"m": [2], "k_dim": 1}]}
    code, out = run_cli(tmp_path, "model", manifest)
    assert code == 0
    report = json.loads((out / "isometry.json").read_text())
    assert report["ok"] is True
    assert report["quad"] == {"hermite_points": 64, "fourier_points": 24}


def test_distinguish_run(tmp_path):
    manifest = {
        "subtorus": {"example": "diagonal_circle_2"},
        "symbol_a": A1_INV,
        "symbol_b": A2_INV,
        "k_max": 6,
    }
    code, out = run_cli(tmp_path, "distinguish", manifest)
    assert code == 0
    report = json.loads((out / "distinguish.json").read_text())
    assert report["first_labeled_difference"] == 1
    assert report["first_multiset_difference"] is None


def test_unknown_manifest_field(tmp_path):
    manifest = {"n": 2, "symbol": A1_POLY, "f": F_X, "k_list": [10, 20, 30, 40], "bogus": 1}
    code, _ = run_cli(tmp_path, "theorem1", manifest)
    assert code == 2


def test_experiment_mismatch(tmp_path):
    manifest = {"experiment": "model", "n": 2, "symbol": A1_POLY, "f": F_X, "k_list": [10, 20, 30, 40]}
    code, _ = run_cli(tmp_path, "theorem1", manifest)
    assert code == 2


def test_missing_manifest(tmp_path):
    code = main(["--experiment", "model", "--manifest", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")])
    assert code == 2


def test_malformed_manifest(tmp_path):
    mpath = tmp_path / "broken.json"
    mpath.write_text("{not json")
    code = main(["--experiment", "model", "--manifest", str(mpath), "--out", str(tmp_path / "o")])
    assert code == 2


def test_bad_threads_flag(tmp_path):
    manifest = {"states": [{"m": [1], "k_dim": 1}]}
    code, _ = run_cli(tmp_path, "model", manifest, extra=("--threads", "0"))
    assert code == 2


def test_seed_flag_overrides_manifest(tmp_path):
    manifest = {
        "subtorus": {"example": "full_torus_12"},
        "symbol": {"terms": [{"gamma": [1, 0], "coeff": 1}]},
        "f": F_X,
        "k_list": [4, 6, 8],
        "seed": 3,
    }
    code, out = run_cli(tmp_path, "theorem2", manifest, extra=("--seed", "11"))
    assert code == 0
    run = json.loads((out / "run.json").read_text())
    assert run["seed"] == 11
    assert run["experiment"] == "theorem2"
    assert set(run["outputs"]) == {"fiber_measures.csv", "fit.json"}
    assert run["manifest"]["seed"] == 3


def test_rerun_is_byte_identical(tmp_path):
    manifest = {
        "subtorus": {"example": "diagonal_circle_2"},
        "symbol": A1_INV,
        "f": F_X,
        "k_list": [10, 15, 20],
        "samples": 20000,
    }
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    _, out1 = run_cli(tmp_path / "a", "theorem2", manifest)
    _, out2 = run_cli(tmp_path / "b", "theorem2", manifest)
    for name in ("fiber_measures.csv", "fit.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_module_entry_point(tmp_path):
    mpath = tmp_path / "m.json"
    mpath.write_text(json.dumps({"states": [{"m": [1], "k_dim": 0}]}))
    proc = subprocess.run(
        [sys.executable, "-m", "toeplab.cli", "--experiment", "model",
         "--manifest", str(mpath), "--out", str(tmp_path / "o")],
        capture_output=True,
    )
    assert proc.returncode == 0
    assert (tmp_path / "o" / "isometry.json").exists()
