import json
import os

import numpy as np
import pytest

from hartreelab import harness as hz
from hartreelab.errors import ParseError, ValidationError


BASE = """
experiment = evolve
params.n = 3
params.lambda = 0.0
params.alpha = 2.0
params.tau = 0.5
params.eps = 1
"""


def test_minimal_config_gets_defaults(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text(BASE)
    cfg = hz.load_config(str(path))
    assert cfg["grid.J"] == 1024
    assert cfg["evolve.dt"] == 1e-3
    assert cfg["seed"] == 0
    assert cfg["output.dir"] == "out"


def test_unknown_key_named(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text(BASE + "params.gamma = 3\n")
    with pytest.raises(ValidationError, match="params.gamma"):
        hz.load_config(str(path))


def test_negative_tau_rejected(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text(BASE.replace("params.tau = 0.5", "params.tau = -0.1"))
    with pytest.raises(ValidationError, match="tau"):
        hz.load_config(str(path))


def test_parse_error_carries_line_number(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("experiment = evolve\nparams.n == 3\n")
    with pytest.raises((ParseError, ValidationError), match="line 2"):
        hz.load_config(str(path))


def test_parse_error_on_bad_type(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text(BASE + "grid.J = twelve\n")
    with pytest.raises(ParseError, match="grid.J"):
        hz.load_config(str(path))


def test_validation_aggregates_all_issues(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("experiment = evolve\nparams.n = 2\nparams.alpha = 2.0\n"
                    "params.tau = -1.0\n")
    with pytest.raises(ValidationError) as err:
        hz.load_config(str(path))
    assert len(err.value.issues) >= 2


def test_check_params_cli_roundtrip(tmp_path):
    out = tmp_path / "cp"
    rc = hz.main(["check-params", "--n", "3", "--lambda", "0.0",
                  "--alpha", "2.0", "--tau", "0.5", "--eps", "-1",
                  "--out", str(out)])
    assert rc == 0
    payload = json.loads((out / "check_params.json").read_text())
    assert payload["kappa"] == 0.0
    assert payload["p"] == pytest.approx(4.0)
    assert "witness" in payload
    assert payload["witness"]["reverify_violations"] == []
    manifest = json.loads((out / "manifest.json").read_text())
    assert any(o["path"] == "check_params.json" for o in manifest["outputs"])


def test_check_params_infeasible_exit_code(tmp_path):
    out = tmp_path / "cp2"
    rc = hz.main(["check-params", "--n", "3", "--lambda", "0.0",
                  "--alpha", "2.0", "--tau", "1.2", "--eps", "-1",
                  "--out", str(out)])
    assert rc == 2
    payload = json.loads((out / "check_params.json").read_text())
    assert payload["infeasible_constraint"].startswith("rr:")


def test_check_params_bad_tau_exit_2(tmp_path):
    rc = hz.main(["check-params", "--n", "3", "--lambda", "0.0",
                  "--alpha", "2.0", "--tau", "-0.5", "--eps", "-1",
                  "--out", str(tmp_path / "cp3")])
    assert rc in (1, 2)


def test_evolve_and_virial_check_pipeline(tmp_path):
    cfg_path = tmp_path / "c.ini"
    cfg_path.write_text(BASE + f"""
grid.J = 384
grid.R_max = 12.0
evolve.T = 0.06
evolve.dt = 1e-3
evolve.cadence = 0.02
evolve.amp = 0.5
evolve.save_fields = true
output.dir = {tmp_path}/ev
""")
    rc = hz.main(["evolve", "--config", str(cfg_path)])
    assert rc == 0
    traj = (tmp_path / "ev" / "trajectory.csv").read_text().splitlines()
    assert traj[0] == "t,M,E,P,I,ME,MG,MP,gradnorm"
    assert len(traj) >= 4
    rc = hz.main(["virial-check", "--config", str(cfg_path),
                  "--traj", str(tmp_path / "ev" / "fields"),
                  "--R", "3", "--out", str(tmp_path / "vc")])
    assert rc == 0
    verdict = json.loads((tmp_path / "vc" / "verdict.json").read_text())
    assert verdict["max_residual"] < 1e-2
    header = (tmp_path / "vc" / "virial_R3.csv").read_text().splitlines()[0]
    assert header.split(",")[:5] == ["t", "V", "M", "V2_fd", "V2_analytic"]


def test_ground_state_pipeline_writes_artifacts(tmp_path):
    cfg = {
        "experiment": "ground-state", "params.n": 3, "params.lambda": 0.0,
        "params.alpha": 2.0, "params.tau": 0.5, "params.eps": -1,
        "grid.J": 256, "grid.R_max": 12.0,
        "output.dir": str(tmp_path / "gs"),
    }
    rc = hz.run_experiment(hz.load_config(None, cfg))
    assert rc == 0
    result = json.loads((tmp_path / "gs" / "result.json").read_text())
    assert result["pohozaev_residual"] < 1e-3
    assert result["el_residual"] < 1e-3
    assert result["C"] > 0
    assert (tmp_path / "gs" / "phi.csv").exists()


def test_manifest_lists_every_output_with_hash(tmp_path):
    cfg = {
        "experiment": "gn-verify", "params.n": 3, "params.lambda": 0.0,
        "params.alpha": 2.0, "params.tau": 0.5, "params.eps": -1,
        "grid.J": 256, "grid.R_max": 12.0, "gn.fields": 5, "seed": 4,
        "output.dir": str(tmp_path / "gn"),
    }
    rc = hz.run_experiment(hz.load_config(None, cfg))
    assert rc == 0
    manifest = json.loads((tmp_path / "gn" / "manifest.json").read_text())
    listed = {o["path"] for o in manifest["outputs"]}
    on_disk = {p for p in os.listdir(tmp_path / "gn")
               if p not in ("manifest.json",)}
    assert listed == on_disk
    for entry in manifest["outputs"]:
        assert len(entry["sha256"]) == 64


def test_seeded_rerun_byte_identical(tmp_path):
    def run(out):
        cfg = {
            "experiment": "gn-verify", "params.n": 3, "params.lambda": 0.0,
            "params.alpha": 2.0, "params.tau": 0.5, "params.eps": -1,
            "grid.J": 256, "grid.R_max": 12.0, "gn.fields": 8, "seed": 11,
            "output.dir": str(out),
        }
        assert hz.run_experiment(hz.load_config(None, cfg)) == 0
        return (out / "gn.csv").read_bytes()
    assert run(tmp_path / "a") == run(tmp_path / "b")


def test_dichotomy_pipeline_row_count(tmp_path):
    cfg = {
        "experiment": "dichotomy", "params.n": 3, "params.lambda": 0.0,
        "params.alpha": 2.0, "params.tau": 0.5, "params.eps": -1,
        "grid.J": 256, "grid.R_max": 12.0, "solver.tol_el": 0.2,
        "dichotomy.c_list": "0.85", "dichotomy.T": 0.05,
        "evolve.dt": 1e-3, "evolve.cadence": 0.01,
        "output.dir": str(tmp_path / "d"),
    }
    rc = hz.run_experiment(hz.load_config(None, cfg))
    assert rc == 0
    rows = (tmp_path / "d" / "dichotomy.csv").read_text().splitlines()
    assert len(rows) == 2   # header + one sweep point


def test_run_experiment_reports_internal_errors(tmp_path):
    cfg = {
        "experiment": "virial-check", "params.n": 3, "params.lambda": 0.0,
        "params.alpha": 2.0, "params.tau": 0.5, "params.eps": 1,
        "virial.traj": str(tmp_path / "missing"),
        "output.dir": str(tmp_path / "x"),
    }
    rc = hz.run_experiment(hz.load_config(None, cfg))
    assert rc == 1
    assert (tmp_path / "x" / "error.json").exists()
