import json

import numpy as np

from sphereoid.bodies import SphericalBody
from sphereoid.cli import main


def test_run_pass_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--experiment", "polar_bp", "--seed", "4", "--trials", "2", "--out", str(a)]) == 0
    assert main(["run", "--experiment", "polar_bp", "--seed", "4", "--trials", "2", "--out", str(b)]) == 0
    assert (a / "trials.csv").read_bytes() == (b / "trials.csv").read_bytes()
    assert "pass" in capsys.readouterr().out


def test_run_violation_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tolerances": {"all": 1e-15}, "trials": 2}))
    code = main(["run", "--experiment", "property_suite", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["status"] == "violation"


def test_run_numerical_failure_exit_code(tmp_path, capsys):
    # a body too thin for rejection sampling
    body = {"center": [0, 0, 1], "image": {"vertices": [[2.0, 1e-5], [-2.0, -1e-5], [2.0, 2e-5],
                                                          [-2.0, -2e-5]], "symmetric": True}}
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"body": body, "sample_sizes": [8]}))
    code = main(["run", "--experiment", "convergence", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_body_command(tmp_path, capsys):
    assert main(["body", "--make", "cap", "--radius", "0.5"]) == 0
    K = SphericalBody.from_json(json.loads(capsys.readouterr().out))
    assert abs(np.arctan(K.image.radius) - 0.5) < 1e-15
    out = tmp_path / "k.json"
    assert main(["body", "--make", "random", "--seed", "3", "--out", str(out)]) == 0
    K = SphericalBody.from_json(json.loads(out.read_text()))
    assert K.image.symmetric
