import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from condgeo import io as cio
from condgeo.cli import ExperimentConfig, run_command, run_suite, trial_rng, worker_count
from condgeo.errors import InputError


def _write_matrix(path, A):
    cio.save_json(path, cio.matrix_to_json(np.asarray(A)))
    return str(path)


def _run(capsys, *argv):
    code = run_command([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def test_classify_prints_signature_and_codimension(tmp_path, capsys):
    f = _write_matrix(tmp_path / "d.json", np.diag([2.0, 2.0, 1.0]))
    code, out = _run(capsys, "classify", "--input", f)
    assert code == 0
    assert out == '{"signature":[2,1],"codim_C":3}\n'


def test_classify_all_adds_details(tmp_path, capsys):
    f = _write_matrix(tmp_path / "d.json", np.diag([2.0, 2.0, 1.0]))
    code, out = _run(capsys, "classify", "--input", f, "--all")
    obj = json.loads(out)
    assert code == 0 and obj["field"] == "real" and obj["sigma"] == [2.0, 2.0, 1.0]
    assert "codim_R" in obj


def test_geodesic_between_equal_endpoints(tmp_path, capsys):
    a = _write_matrix(tmp_path / "a.json", [[2.0, 1.0], [0.0, 1.0]])
    out = tmp_path / "geo.json"
    code, text = _run(capsys, "geodesic", "--a", a, "--b", a, "--nodes", 8, "--out", out)
    assert code == 0
    assert json.loads(out.read_text())["length"] == 0.0
    with open(tmp_path / "geo.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "sigma_min", "log_alpha", "speed"]
    assert len(rows) == 10


def test_geodesic_outputs_are_byte_identical(tmp_path, capsys):
    a = _write_matrix(tmp_path / "a.json", [[2.0, 1.0], [0.5, 1.0]])
    b = _write_matrix(tmp_path / "b.json", [[1.0, -0.3], [0.2, 3.0]])
    blobs = []
    for k in range(2):
        out = tmp_path / f"g{k}.json"
        code, _ = _run(capsys, "geodesic", "--a", a, "--b", b, "--nodes", 32, "--out", out)
        assert code == 0
        blobs.append((out.read_bytes(), (tmp_path / f"g{k}.csv").read_bytes()))
    assert blobs[0] == blobs[1]


def test_geodesic_then_convexity_check(tmp_path, capsys):
    a = _write_matrix(tmp_path / "a.json", [[2.0, 1.0], [0.5, 1.0]])
    b = _write_matrix(tmp_path / "b.json", [[1.0, -0.3], [0.2, 3.0]])
    geo = tmp_path / "geo.json"
    assert _run(capsys, "geodesic", "--a", a, "--b", b, "--nodes", 32, "--out", geo)[0] == 0
    code, out = _run(capsys, "check-convexity", "--geodesic", geo, "--tol", 1e-4)
    assert code == 0
    assert json.loads(out)["verdict"] == "convex_within_tol"
    assert (tmp_path / "geo.convexity.csv").exists()


def test_unconverged_geodesic_is_a_verification_failure(tmp_path, capsys):
    a = _write_matrix(tmp_path / "a.json", [[2.0, 1.0], [0.5, 1.0]])
    b = _write_matrix(tmp_path / "b.json", [[1.0, -0.3], [0.2, 3.0]])
    code, out = _run(capsys, "geodesic", "--a", a, "--b", b, "--nodes", 32, "--max-iter", 1,
                     "--out", tmp_path / "g.json")
    assert code == 2
    assert json.loads(out)["violated"] == "first_order_residual"


def test_variety_geodesic_and_its_convexity(tmp_path, capsys):
    rng = np.random.default_rng(3)
    p = _write_matrix(tmp_path / "p.json", rng.standard_normal((2, 3)))
    q = _write_matrix(tmp_path / "q.json", rng.standard_normal((2, 3)))
    out = tmp_path / "w.json"
    code, _ = _run(capsys, "variety-geodesic", "--p", p, "--q", q, "--nodes", 32, "--out", out)
    assert code == 0
    obj = json.loads(out.read_text())
    assert len(obj["points"]) == 33 and "x_re" in obj["points"][0]
    code, text = _run(capsys, "check-convexity", "--geodesic", out)
    assert code == 0 and json.loads(text)["verdict"] == "convex_within_tol"


def test_svd_track_writes_cluster_columns(tmp_path, capsys):
    t = np.linspace(0, 1, 21)
    nodes = np.array([np.diag([2 + s, 1.0]) for s in t])
    path = tmp_path / "path.json"
    cio.save_json(path, cio.path_to_json(nodes, t))
    out = tmp_path / "traj.csv"
    code, text = _run(capsys, "svd-track", "--path", path, "--steps", 50, "--out", out)
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "sigma_1", "sigma_2", "residual", "unitary_drift"]
    assert float(rows[-1][1]) == pytest.approx(3.0, abs=1e-8)
    assert json.loads(text)["max_residual"] <= 1e-8


def test_lemma46_sample(capsys):
    code, out = _run(capsys, "lemma46-sample", "--n", 3, "--m", 4, "--draws", 200, "--seed", 1)
    obj = json.loads(out)
    assert code == 0 and obj["verdict"] == "pass" and obj["violations"] == 0


def test_hessian_check_pass_and_fail(tmp_path, capsys):
    cfg = tmp_path / "hc.json"
    cfg.write_text(json.dumps({"n": 2, "m": 2, "trials": 3, "seed": 0, "sigma": [3.0, 1.0]}))
    code, out = _run(capsys, "hessian-check", "--config", cfg)
    obj = json.loads(out)
    assert code == 0 and len(obj["rows"]) == 3 and obj["columns"][0] == "trial"
    cfg.write_text(json.dumps({"n": 2, "m": 2, "trials": 1, "tol": 1e-300, "sigma": [3.0, 1.0]}))
    code, out = _run(capsys, "hessian-check", "--config", cfg)
    assert code == 2 and json.loads(out)["violated"] == "hessian_symmetry_identity"


def test_mu_from_matrix_and_from_system(tmp_path, capsys):
    m = _write_matrix(tmp_path / "a.json", np.diag([2.0, 0.5]))
    code, out = _run(capsys, "mu", "--matrix", m)
    assert code == 0 and json.loads(out)["mu"] == pytest.approx(2.0)
    sys_ = tmp_path / "s.json"
    sys_.write_text(json.dumps({"degrees": [4], "polynomials": [[{"exponent": [1], "re": 2.0},
                                                                 {"exponent": [3], "re": 5.0}]]}))
    code, out = _run(capsys, "mu", "--system", sys_)
    assert code == 0 and json.loads(out)["mu"] == pytest.approx(1.0)


@pytest.mark.parametrize(
    "argv",
    [
        ["classify"],
        ["nonsense"],
        ["geodesic", "--a", "missing.json", "--b", "missing.json", "--out", "x.json"],
        ["report", "--trials", "0"],
        ["lemma46-sample", "--rtol", "-1"],
    ],
)
def test_input_errors_exit_with_one(capsys, argv):
    code, out = _run(capsys, *argv)
    assert code == 1
    assert json.loads(out)["status"] == "error"


def test_malformed_and_singular_inputs_have_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    code, out = _run(capsys, "classify", "--input", bad)
    assert code == 1 and json.loads(out)["error"] == "malformed_json"
    s = _write_matrix(tmp_path / "s.json", np.diag([1.0, 0.0]))
    e = _write_matrix(tmp_path / "e.json", np.eye(2))
    code, out = _run(capsys, "geodesic", "--a", s, "--b", e, "--out", tmp_path / "g.json")
    assert code == 1


def test_small_theorem_report_passes(capsys):
    code, out = _run(capsys, "report", "--suite", "theorem1", "--seed", 0, "--trials", 4, "--nodes", 32)
    obj = json.loads(out)
    assert code == 0
    assert obj["summary"]["passed"] == 4
    assert [r["trial"] for r in obj["trials"]] == [0, 1, 2, 3]


def test_report_is_independent_of_worker_count(monkeypatch):
    cfg = ExperimentConfig(n=2, m=2, nodes=24, trials=3, seed=5)
    monkeypatch.setenv("CONDGEO_THREADS", "1")
    serial = cio.dumps(run_suite("theorem1", cfg))
    monkeypatch.setenv("CONDGEO_THREADS", "2")
    parallel = cio.dumps(run_suite("theorem1", cfg))
    assert serial == parallel


def test_worker_count_validation(monkeypatch):
    monkeypatch.setenv("CONDGEO_THREADS", "zero")
    with pytest.raises(InputError):
        worker_count()
    monkeypatch.delenv("CONDGEO_THREADS")
    assert worker_count() == 1


def test_trial_streams_are_reproducible_and_distinct():
    a = trial_rng(0, 1).standard_normal(4)
    assert np.array_equal(a, trial_rng(0, 1).standard_normal(4))
    assert not np.array_equal(a, trial_rng(0, 2).standard_normal(4))
    assert not np.array_equal(a, trial_rng(1, 1).standard_normal(4))


def test_config_validation():
    with pytest.raises(InputError):
        ExperimentConfig(n=3, m=2)
    with pytest.raises(InputError):
        ExperimentConfig(tol=0.0)


def test_module_entry_point(tmp_path):
    f = _write_matrix(tmp_path / "d.json", np.diag([2.0, 2.0, 1.0]))
    proc = subprocess.run([sys.executable, "-m", "condgeo", "classify", "--input", f],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == '{"signature":[2,1],"codim_C":3}\n'
