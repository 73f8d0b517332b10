"""End-to-end CLI tests: file I/O, exit codes, report determinism."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from gnorm.choi import kraus_channel, max_entangled_projection
from gnorm.decisions import Experiment, classical_problem, experiment_to_json, helstrom
from gnorm.hermitian import herm, identity, matrix_to_json, outer
from gnorm.sections import states_section

PKG_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def run_cli(*argv, env_extra=None):
    env = dict(os.environ)
    env["PYTHONPATH"] = os.pathsep.join(
        [os.path.join(PKG_ROOT, "src"), env.get("PYTHONPATH", "")]
    )
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        [sys.executable, "-m", "gnorm.cli", *argv],
        capture_output=True,
        text=True,
        env=env,
    )
    return proc


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh)
    return str(path)


@pytest.fixture
def state_files(tmp_path):
    zero = write_json(tmp_path / "zero.json", matrix_to_json(outer([1.0, 0.0])))
    plus = write_json(
        tmp_path / "plus.json",
        matrix_to_json(outer([1.0 / math.sqrt(2), 1.0 / math.sqrt(2)])),
    )
    return zero, plus


def test_norm_command_states(tmp_path):
    sec = write_json(tmp_path / "sec.json", {"kind": "states", "dims": [2]})
    mat = write_json(tmp_path / "mat.json", matrix_to_json(herm(np.diag([1.0, -1.0]))))
    proc = run_cli("norm", sec, mat)
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["values"]["value"] == pytest.approx(2.0, abs=1e-9)
    assert report["command"] == "norm"
    assert "requested_tol" in report and "achieved_tol" in report


def test_norm_command_singleton_closed_form(tmp_path):
    sec = write_json(
        tmp_path / "sec.json",
        {"kind": "singleton", "matrix": matrix_to_json(identity(2) / 2)},
    )
    mat = write_json(tmp_path / "mat.json", matrix_to_json(herm(np.diag([1.0, -1.0]))))
    proc = run_cli("norm", sec, mat)
    report = json.loads(proc.stdout)
    # the slice through I/2: value |(I/2)^(1/2) x (I/2)^(1/2)|_1 = 1
    assert report["values"]["value"] == pytest.approx(1.0, abs=1e-9)
    assert report["method"] == "closed_form"


def test_norm_command_dual_flag(tmp_path):
    sec = write_json(tmp_path / "sec.json", {"kind": "states", "dims": [2]})
    mat = write_json(tmp_path / "mat.json", matrix_to_json(herm(np.diag([1.0, -1.0]))))
    proc = run_cli("norm", sec, mat, "--dual")
    report = json.loads(proc.stdout)
    assert report["values"]["value"] == pytest.approx(1.0, abs=1e-9)


def test_norm_witness_out(tmp_path):
    sec = write_json(tmp_path / "sec.json", {"kind": "channels", "dims": [2, 2]})
    mat = write_json(
        tmp_path / "mat.json",
        matrix_to_json(herm(max_entangled_projection(2).entries, (2, 2))),
    )
    wpath = str(tmp_path / "wit.json")
    proc = run_cli("norm", sec, mat, "--witness-out", wpath, "--tol", "1e-8")
    assert proc.returncode == 0
    wit = json.load(open(wpath))
    assert "primal_witness" in wit and len(wit["dual_witness"]) == 2


def test_dmax_command(tmp_path):
    a = write_json(tmp_path / "a.json", matrix_to_json(herm(np.diag([0.5, 0.5]))))
    proc = run_cli("dmax", a, a)
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["values"]["dmax"] == pytest.approx(0.0, abs=1e-9)


def test_dmax_infinite_value(tmp_path):
    a = write_json(tmp_path / "a.json", matrix_to_json(herm(np.diag([0.0, 1.0]))))
    b = write_json(tmp_path / "b.json", matrix_to_json(herm(np.diag([1.0, 0.0]))))
    proc = run_cli("dmax", a, b)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["values"]["dmax"] == "inf"


def test_helstrom_command(state_files):
    zero, plus = state_files
    proc = run_cli("helstrom", zero, plus, "--lambda", "0.5")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    expected = (1.0 - 1.0 / math.sqrt(2.0)) / 2.0
    assert report["values"]["error"] == pytest.approx(expected, abs=1e-6)


def test_diamond_command(tmp_path):
    psi = herm(max_entangled_projection(2).entries, (2, 2))
    x_z = kraus_channel([np.diag([1.0, -1.0]).astype(complex)]).matrix
    c0 = write_json(tmp_path / "c0.json", matrix_to_json(psi))
    c1 = write_json(tmp_path / "c1.json", matrix_to_json(x_z))
    proc = run_cli("diamond", c0, c1, "--lambda", "0.5", "--tol", "1e-8")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["values"]["value"] == pytest.approx(1.0, abs=1e-6)
    assert report["values"]["error"] == pytest.approx(0.0, abs=1e-6)


def test_comb_norm_command(tmp_path):
    psi = herm(max_entangled_projection(2).entries, (2, 2))
    from gnorm.hermitian import tensor

    member = tensor(psi, psi)
    mat = write_json(tmp_path / "m.json", matrix_to_json(member))
    proc = run_cli("comb-norm", mat, "--dims", "2,2,2,2", "--tol", "1e-7")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["values"]["value"] == pytest.approx(1.0, abs=1e-5)


def test_hmin_command(tmp_path):
    sigma = identity((2, 2)) / 4
    mat = write_json(tmp_path / "s.json", matrix_to_json(sigma))
    proc = run_cli("hmin", mat, "--tol", "1e-8")
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["values"]["hmin"] == pytest.approx(1.0, abs=1e-6)


def test_certify_command(tmp_path, state_files):
    zero_p, plus_p = state_files
    s = states_section(2)
    zero = outer([1.0, 0.0])
    plus = outer([1.0 / math.sqrt(2), 1.0 / math.sqrt(2)])
    e = Experiment(s, (zero, plus), np.array([0.5, 0.5]))
    p = classical_problem(np.eye(2))
    exp = write_json(tmp_path / "exp.json", experiment_to_json(e, p))
    _, povm = helstrom(zero, plus, 0.5)
    cand = write_json(
        tmp_path / "cand.json",
        {"kind": "povm", "effects": [matrix_to_json(m) for m in povm.effects]},
    )
    proc = run_cli("certify", cand, exp)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["values"]["feasible"] is True


def test_tester_check_command(tmp_path):
    psi = herm(max_entangled_projection(2).entries, (2, 2))
    x_z = kraus_channel([np.diag([1.0, -1.0]).astype(complex)]).matrix
    c0 = write_json(tmp_path / "c0.json", matrix_to_json(psi))
    c1 = write_json(tmp_path / "c1.json", matrix_to_json(x_z))
    proc = run_cli("tester-check", c0, c1, "--lambda", "0.5")
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["values"]["exists"] is True


def test_exit_code_input_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    sec = write_json(tmp_path / "sec.json", {"kind": "states", "dims": [2]})
    proc = run_cli("norm", sec, str(bad))
    assert proc.returncode == 1
    assert "JSON" in proc.stderr or "json" in proc.stderr


def test_exit_code_missing_field(tmp_path):
    sec = write_json(tmp_path / "sec.json", {"kind": "states", "dims": [2]})
    mat = write_json(tmp_path / "mat.json", {"dims": [2]})
    proc = run_cli("norm", sec, mat)
    assert proc.returncode == 1
    assert "matrix" in proc.stderr


def test_exit_code_non_convergence(tmp_path):
    sec = write_json(tmp_path / "sec.json", {"kind": "channels", "dims": [2, 2]})
    rng = np.random.default_rng(0)
    g = rng.normal(size=(4, 4))
    mat = write_json(
        tmp_path / "mat.json", matrix_to_json(herm((g + g.T) / 2, (2, 2)))
    )
    proc = run_cli("norm", sec, mat, "--max-iter", "26", "--tol", "1e-14")
    assert proc.returncode == 2


def test_exit_code_validation_failure(tmp_path, state_files):
    zero_p, plus_p = state_files
    s = states_section(2)
    zero = outer([1.0, 0.0])
    plus = outer([1.0 / math.sqrt(2), 1.0 / math.sqrt(2)])
    e = Experiment(s, (zero, plus), np.array([0.5, 0.5]))
    p = classical_problem(np.eye(2))
    exp = write_json(tmp_path / "exp.json", experiment_to_json(e, p))
    cand = write_json(
        tmp_path / "cand.json",
        {"kind": "choi", "matrix": matrix_to_json(identity((2, 2)))},
    )
    proc = run_cli("certify", cand, exp)
    assert proc.returncode == 3


def test_report_determinism(tmp_path):
    sec = write_json(tmp_path / "sec.json", {"kind": "channels", "dims": [2, 2]})
    psi = herm(max_entangled_projection(2).entries, (2, 2))
    mat = write_json(tmp_path / "mat.json", matrix_to_json(psi))
    out1 = run_cli("norm", sec, mat, "--tol", "1e-8").stdout
    out2 = run_cli("norm", sec, mat, "--tol", "1e-8").stdout
    assert out1 == out2


def test_env_default_tol(tmp_path):
    sec = write_json(tmp_path / "sec.json", {"kind": "states", "dims": [2]})
    mat = write_json(tmp_path / "mat.json", matrix_to_json(herm(np.diag([1.0, -1.0]))))
    proc = run_cli("norm", sec, mat, env_extra={"GNORM_DEFAULT_TOL": "1e-5"})
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["requested_tol"] == pytest.approx(1e-5)
