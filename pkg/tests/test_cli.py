import json

import numpy as np
import pytest

from paflow import cli
from paflow.acceptance import cone_points
from paflow.hyperbolic import build_genus2_fn


@pytest.fixture(scope="module")
def paths(data_dir):
    return str(data_dir / "genus2_track.json"), str(data_dir / "genus2_pa.json")


def _run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_track_validate_and_info(capsys, paths):
    code, rep = _run(capsys, ["track", "validate", paths[0]])
    assert code == 0 and rep["results"]["valid"]
    code, rep = _run(capsys, ["track", "info", paths[0], "--no-timing"])
    assert code == 0
    assert rep["results"]["dimension"] == 6 and rep["results"]["maximal"]
    assert rep["wall_time"] is None
    assert list(rep["inputs"]) == [paths[0]]


def test_pa_analyze(capsys, paths):
    code, rep = _run(capsys, ["pa", "analyze", "--track", paths[0], "--incidence", paths[1]])
    assert code == 0
    assert all(c["passed"] for c in rep["checks"])
    assert rep["results"]["stretch"] > 1
    assert rep["results"]["blocks"][0]["kind"] == "RealPair"


def test_deterministic_without_timing(capsys, paths):
    argv = ["potential", "build", "--track", paths[0], "--incidence", paths[1], "--no-timing"]
    _, a = _run(capsys, argv)
    _, b = _run(capsys, argv)
    assert a == b


def test_flow_run(capsys, tmp_path, paths, example):
    pot = tmp_path / "pot.json"
    _run(capsys, ["potential", "build", "--track", paths[0], "--incidence", paths[1],
                  "--json-out", str(pot)])
    pt = tmp_path / "sigma.json"
    s0 = cone_points(example, 1, np.random.default_rng(0))[0]
    pt.write_text(json.dumps({"sigma": s0.tolist()}))
    code, rep = _run(capsys, ["flow", "run", "--potential", str(pot), "--sigma", str(pt), "--t", "2"])
    assert code == 0
    assert len(rep["results"]["trajectory"]) == 11
    assert not rep["results"]["left_cone"]
    # starting outside the cone is a failed check, not an input error
    pt.write_text(json.dumps({"sigma": (-s0).tolist()}))
    code, rep = _run(capsys, ["flow", "run", "--potential", str(pot), "--sigma", str(pt)])
    assert code == 3 and rep["error"]["type"] == "LeftCone"
    pt.write_text(json.dumps({"sigma": [1.0, 2.0]}))
    code, _ = _run(capsys, ["flow", "run", "--potential", str(pot), "--sigma", str(pt)])
    assert code == 2


def test_bracket_and_jacobian(capsys, tmp_path):
    f = tmp_path / "b.json"
    z = [[0.0, 0.0], [0.0, 0.0]]
    f.write_text(json.dumps({"log_lambda": [1, 2], "l_alpha": [1, 1], "l_beta": [1, 1], "l_A": [1, 1],
                             "l_B": [1, 1], "cos_beta_B": z, "cos_beta_A": z, "cos_alpha_B": z,
                             "cos_alpha_A": [[1.0, 0.0], [0.0, 0.0]]}))
    code, rep = _run(capsys, ["bracket", "eval", "--input", str(f)])
    assert code == 0 and rep["results"]["bracket"] == 1.0
    I, Z = np.eye(2).tolist(), np.zeros((2, 2)).tolist()
    f.write_text(json.dumps({"A": I, "B": Z, "C": Z, "D": I}))
    code, rep = _run(capsys, ["jacobian", "assemble", "--input", str(f)])
    assert code == 0
    f.write_text(json.dumps({"A": (2 * np.eye(2)).tolist(), "B": Z, "C": Z, "D": I}))
    code, rep = _run(capsys, ["jacobian", "assemble", "--input", str(f)])
    assert code == 3 and rep["error"]["type"] == "NotSymplectic"


def test_cosine_check(capsys, tmp_path):
    f = tmp_path / "rep.json"
    f.write_text(json.dumps(build_genus2_fn((1.5, 1.8, 2.2), (0.3, -0.2, 0.4)).to_dict()))
    code, rep = _run(capsys, ["cosine", "check", "--rep", str(f), "--gamma", "BD", "--delta", "ABab"])
    assert code == 0
    r = rep["results"]
    assert r["cosine_sum"] == pytest.approx(r["dlength_dtwist"], abs=1e-6)
    code, rep = _run(capsys, ["twist", "derivative", "--rep", str(f), "--gamma", "BD", "--delta", "ABab",
                              "--weight", "2"])
    assert rep["results"]["dlength_dtwist"] == pytest.approx(2 * r["dlength_dtwist"], rel=1e-6)


def test_input_errors(capsys, tmp_path, paths):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, rep = _run(capsys, ["track", "validate", str(bad)])
    assert code == 2 and rep["error"]["type"] == "InputError"
    code, _ = _run(capsys, ["track", "info", str(tmp_path / "missing.json")])
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["accept", "bogus"])
    assert exc.value.code == 2


def test_tolerance_sources(monkeypatch):
    args = cli.build_parser().parse_args(["track", "info", "x"])
    assert cli._tolerance(args) == cli.DEFAULT_TOL
    monkeypatch.setenv("PAFLOW_TOL", "1e-5")
    assert cli._tolerance(args) == 1e-5
    args = cli.build_parser().parse_args(["track", "info", "x", "--tolerance", "1e-3"])
    assert cli._tolerance(args) == 1e-3


def test_accept_exit_code_follows_checks(capsys):
    code, rep = _run(capsys, ["accept", "hamiltonian", "--no-timing"])
    assert code == (0 if all(c["passed"] for c in rep["checks"]) else 3)
    assert len(rep["checks"]) == 4
    code, rep = _run(capsys, ["accept", "hyperbolic"])
    failed = [c["name"] for c in rep["checks"] if not c["passed"]]
    assert code == (3 if failed else 0)
