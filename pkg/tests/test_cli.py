import csv
import json

import numpy as np
import pytest

from rolledgp.bundle import load_bundle
from rolledgp.cli import cmd_convergence, cmd_fit, cmd_simulate, main
from rolledgp.model import simulate
from rolledgp.presets import get_preset


def test_simulate_preset(tmp_path):
    out = tmp_path / "s.json"
    assert main(["simulate", "--preset", "s2-hetero", "--n", "10", "--seed", "1", "--out", str(out)]) == 0
    b = load_bundle(out)
    assert b.n == 10 and b.curves.shape == (10, 100, 3) and b.manifold.kind == "sphere"


def test_simulate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["simulate", "--preset", "spd-demo", "--n", "3", "--seed", "9", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_simulate_empty(tmp_path):
    out = tmp_path / "e.json"
    assert main(["simulate", "--preset", "spd-demo", "--n", "0", "--seed", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["curves"] == []


def test_simulate_strict_reports_cut_locus(tmp_path, capsys):
    args = ["simulate", "--preset", "s2-hetero", "--n", "40", "--seed", "0", "--out", str(tmp_path / "x.json")]
    assert main(args + ["--strict"]) == 1
    assert "CutLocusError" in capsys.readouterr().err


def test_simulate_from_model_file(tmp_path):
    model = get_preset("spd-demo", r=30)
    spec = {
        "manifold": model.manifold.descriptor,
        "M_w": model.params.M.tolist(),
        "U_w": model.params.U.tolist(),
        "V_w": model.params.V.tolist(),
        "base_point": model.b.tolist(),
        "frame": model.frame.tolist(),
        "r": 30,
    }
    (tmp_path / "m.json").write_text(json.dumps(spec))
    b = cmd_simulate(tmp_path / "o.json", 4, 2, model=str(tmp_path / "m.json"))
    assert np.allclose(b.curves, simulate(model, 4, np.random.default_rng(2).spawn(1)[0]))


def test_fit_recovers_mean_from_near_noiseless_bundle(tmp_path):
    model = get_preset("spd-demo")
    quiet = type(model)(model.manifold, type(model.params)(model.params.M, model.params.U, 1e-20 * model.params.V), model.b, model.frame)
    from rolledgp.bundle import CurveBundle, save_bundle

    save_bundle(CurveBundle(model.manifold, simulate(quiet, 5, 0), base_point=model.b, frame=model.frame), tmp_path / "z.json")
    for method in ("fre", "ls", "mle"):
        rep = cmd_fit(tmp_path / "z.json", tmp_path / f"{method}.json", method, 5)
        assert np.max(np.abs(np.array(rep["M_w"]) - model.params.M)) < 1e-6
    rep = json.loads((tmp_path / "fre.json").read_text())
    assert set(rep) >= {"M_w", "U_w", "V_w", "gamma_hat", "loglik", "iterations"}
    assert np.array(rep["gamma_hat"]).shape == (100, 4)


def test_fit_on_euclidean_is_pointwise_mean_projection(tmp_path):
    from rolledgp.bundle import CurveBundle, save_bundle
    from rolledgp.manifolds import Euclidean
    from rolledgp.model import bspline_matrix, right_inverse

    rng = np.random.default_rng(3)
    x = rng.standard_normal((8, 30, 2)).cumsum(axis=1) * 0.1
    b = np.zeros(2)
    save_bundle(CurveBundle(Euclidean(2), x, base_point=b, frame=np.eye(2)), tmp_path / "e.json")
    rep = cmd_fit(tmp_path / "e.json", tmp_path / "f.json", "fre", 6)
    oracle = x.mean(axis=0).T @ right_inverse(bspline_matrix(6, 30))
    assert np.allclose(rep["M_w"], oracle, atol=1e-10)


def test_usage_errors_exit_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["fit", "--in", "x.json", "--method", "bogus", "--out", "y.json"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2
    assert main(["simulate", "--n", "2", "--out", str(tmp_path / "a.json")]) == 2
    main(["simulate", "--preset", "spd-demo", "--n", "3", "--seed", "1", "--out", str(tmp_path / "u.json")])
    assert main(["test2", "--in", str(tmp_path / "u.json"), "--R", "5", "--out", str(tmp_path / "t.json")]) == 2
    capsys.readouterr()


def test_computation_errors_exit_1(tmp_path):
    assert main(["fit", "--in", str(tmp_path / "missing.json"), "--out", str(tmp_path / "f.json")]) == 1
    main(["simulate", "--preset", "spd-demo", "--n", "0", "--seed", "1", "--out", str(tmp_path / "e.json")])
    assert main(["fit", "--in", str(tmp_path / "e.json"), "--k", "5", "--out", str(tmp_path / "f.json")]) == 1


def test_test2_labelled_and_two_files(tmp_path):
    g = tmp_path / "g.json"
    main(["simulate", "--preset", "so3-synthetic", "--r", "40", "--n", "12", "--seed", "4",
          "--groups", "2", "--shift", "0.15", "--out", str(g)])
    out, hist = tmp_path / "t.json", tmp_path / "h.csv"
    assert main(["test2", "--in", str(g), "--R", "30", "--seed", "1", "--out", str(out), "--hist", str(hist)]) == 0
    rep = json.loads(out.read_text())
    assert rep["p_value"] == 1 / 31 and len(rep["J_resampled"]) == 30
    rows = list(csv.DictReader(hist.open()))
    assert sum(int(r["count"]) for r in rows) == 30
    # identical groups from two files
    s = tmp_path / "s.json"
    main(["simulate", "--preset", "so3-synthetic", "--r", "40", "--n", "12", "--seed", "4", "--out", str(s)])
    assert main(["test2", "--in", str(s), "--in2", str(s), "--R", "9", "--seed", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["p_value"] == 1.0


def test_convergence_single_n(tmp_path):
    out = tmp_path / "c.csv"
    rows, medians, _ = cmd_convergence(out, [10], 3)
    assert len(rows) == 3 and len(medians) == 1
    table = list(csv.DictReader(out.open()))
    assert [r["seed"] for r in table] == ["0", "1", "2", "median"]
    assert main(["convergence", "--n-list", "10,5", "--seeds", "1", "--out", str(out)]) == 1


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "rolledgp", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "simulate" in r.stdout
