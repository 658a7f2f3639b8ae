import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qmeas import cli
from qmeas.io import (
    ParseError,
    build,
    dump_operator_file,
    encode_matrix,
    load_operator_file,
    parse_operator_file,
    povm_entry,
)
from qmeas.models import neutron_J_closed_form, neutron_bivariate, neutron_povm, observables
from qmeas.povm import Povm

LN2 = math.log(2)


def write(tmp_path, doc, name="ops.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def diag_povm_doc(e1=(1, 0), e2=(0, 1)):
    return {
        "dim": 2,
        "objects": [
            {"name": "Z", "role": "povm",
             "operators": [encode_matrix(np.diag(e1)), encode_matrix(np.diag(e2))]}
        ],
    }


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


# ---- operator files ---------------------------------------------------------

def test_parse_error_is_positioned():
    doc = diag_povm_doc()
    doc["objects"][0]["operators"][1][1][0] = [0.0]
    with pytest.raises(ParseError, match=r"\$\.objects\[0\]\.operators\[1\]\[1\]\[0\]"):
        parse_operator_file(doc)


def test_parse_rejects_unknown_role():
    doc = diag_povm_doc()
    doc["objects"][0]["role"] = "channel"
    with pytest.raises(ParseError, match="role"):
        parse_operator_file(doc)


def test_json_syntax_error_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2,\n "objects": [,]}')
    with pytest.raises(ParseError, match="line 2"):
        load_operator_file(str(p))


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
def test_export_import_identity(tmp_path, a):
    out = str(tmp_path / "n.json")
    assert cli.main(["neutron-export", "--a", str(a), "--chi", "0.7", "--out", out]) == 0
    f = load_operator_file(out)
    objs = {o.name: build(o) for o in f.objects}
    assert np.max(np.abs(objs["neutron"].effects - neutron_povm(0.7, a).effects)) <= 1e-12
    assert np.max(np.abs(objs["R"].grid - neutron_bivariate(0.7, a).grid)) <= 1e-12
    obs = observables(0.7)
    assert np.max(np.abs(objs["path"].pvm.effects - obs.path.pvm.effects)) <= 1e-12
    np.testing.assert_array_equal(objs["interference"].values, [1, -1])


# ---- validate ---------------------------------------------------------------

def test_validate_ok(tmp_path, capsys):
    code, out = run(["validate", write(tmp_path, diag_povm_doc())], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["valid"] and rep["objects"][0]["is_pvm"]


def test_validate_names_bad_effect(tmp_path, capsys):
    doc = diag_povm_doc((1.1, 0), (-0.1, 1))
    doc["objects"][0]["labels"] = ["up", "down"]
    code, out = run(["validate", write(tmp_path, doc)], capsys)
    assert code == 2
    rep = json.loads(out)["objects"][0]
    assert not rep["valid"] and "'down'" in rep["error"]
    assert rep["min_eigenvalues"][1] == pytest.approx(-0.1)


def test_validate_roundtrip_neutron(tmp_path, capsys):
    out = str(tmp_path / "n.json")
    cli.main(["neutron-export", "--a", "0.5", "--chi", "1.1", "--out", out])
    code, text = run(["validate", out], capsys)
    assert code == 0
    kinds = {o["name"]: o for o in json.loads(text)["objects"]}
    assert kinds["neutron"]["valid"] and not kinds["neutron"]["is_pvm"]


def test_validate_missing_file(tmp_path):
    assert cli.main(["validate", str(tmp_path / "nope.json")]) == 1


def test_validate_parse_error(tmp_path):
    assert cli.main(["validate", write(tmp_path, {"dim": 0, "objects": []})]) == 1


# ---- martens -----------------------------------------------------------------

@pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
def test_martens_neutron(tmp_path, capsys, a):
    path = str(tmp_path / "n.json")
    cli.main(["neutron-export", "--a", str(a), "--chi", "0.3", "--out", path])
    code, out = run(["martens", path], capsys)
    assert code == 0
    rep = json.loads(out)
    J_l, J_m = neutron_J_closed_form(a)
    assert rep["status"] == "satisfied"
    assert rep["J_lambda"] == pytest.approx(J_l, abs=1e-9)
    assert rep["J_mu"] == pytest.approx(J_m, abs=1e-9)
    assert rep["martens_bound"] == pytest.approx(LN2, abs=1e-12)


def test_martens_identity_grid(tmp_path, capsys):
    Z = [encode_matrix(np.diag([1, 0])), encode_matrix(np.diag([0, 1]))]
    zero = encode_matrix(np.zeros((2, 2)))
    doc = {"dim": 2, "objects": [
        {"name": "R", "role": "bivariate", "grid": [[Z[0], zero], [zero, Z[1]]]},
        {"name": "A", "role": "pvm", "operators": Z},
        {"name": "B", "role": "pvm", "operators": Z},
    ]}
    code, out = run(["martens", write(tmp_path, doc)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["J_lambda"] == 0 and rep["J_mu"] == 0
    assert rep["martens_bound"] == pytest.approx(0.0, abs=1e-12)


def test_martens_malformed_grid(tmp_path):
    Z = [encode_matrix(np.diag([1, 0])), encode_matrix(np.diag([0, 1]))]
    doc = {"dim": 2, "objects": [
        {"name": "R", "role": "bivariate", "grid": [[Z[0], Z[0]], [Z[1], Z[1]]]},
        {"name": "A", "role": "pvm", "operators": Z},
        {"name": "B", "role": "pvm", "operators": Z},
    ]}
    assert cli.main(["martens", write(tmp_path, doc)]) == 2


def test_martens_infeasible(tmp_path, capsys):
    path = str(tmp_path / "n.json")
    cli.main(["neutron-export", "--a", "0.5", "--chi", "0.3", "--out", path])
    doc = json.loads(open(path).read())
    objs = doc["objects"]
    # swap observable order: rows no longer decompose over the interference PVM
    objs[3], objs[4] = objs[4], objs[3]
    code, out = run(["martens", write(tmp_path, doc, "swapped.json")], capsys)
    assert code == 2
    assert json.loads(out)["status"] == "infeasible"


# ---- entropic-check -----------------------------------------------------------

def test_entropic_check(tmp_path, capsys):
    path = str(tmp_path / "n.json")
    cli.main(["neutron-export", "--a", "0.5", "--chi", "0.3", "--out", path])
    code, out = run(["entropic-check", path], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["H_A"] == pytest.approx(LN2) and rep["H_B"] == pytest.approx(LN2)


# ---- neutron-sweep --------------------------------------------------------------

def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def test_sweep_three_points(tmp_path):
    out = str(tmp_path / "sweep.csv")
    assert cli.main(["neutron-sweep", "--a-steps", "3", "--chi", "0.5", "--out", out]) == 0
    header, rows = read_csv(out)
    assert header == ["a", "J_lambda", "J_mu", "bound", "sum_minus_bound"]
    assert [r[0] for r in rows] == [0.0, 0.5, 1.0]
    for a, J_l, J_m, bound, slack in rows:
        assert (J_l, J_m) == pytest.approx(neutron_J_closed_form(a), abs=1e-9)
        assert bound == pytest.approx(LN2, abs=1e-12)
        assert slack >= -1e-9
    assert rows[1][1] == pytest.approx(0.477386, abs=1e-5)


def test_sweep_format_is_bit_stable(tmp_path):
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    cli.main(["neutron-sweep", "--a-steps", "11", "--out", a])
    cli.main(["neutron-sweep", "--a-steps", "11", "--out", b])
    data = open(a, "rb").read()
    assert data == open(b, "rb").read()
    assert b"\r" not in data
    # 17 significant digits round-trip exactly
    _, rows = read_csv(a)
    assert rows[3][1] == float(format(rows[3][1], ".17g"))


def test_sweep_rejects_too_few_steps(tmp_path):
    assert cli.main(["neutron-sweep", "--a-steps", "1", "--out", str(tmp_path / "x.csv")]) == 2


def test_sweep_cross_check_failure(tmp_path, monkeypatch):
    monkeypatch.setattr(cli.models, "neutron_J_closed_form", lambda a: (0.0, 0.0))
    assert cli.main(["neutron-sweep", "--a-steps", "3", "--out", str(tmp_path / "x.csv")]) == 3


# ---- photon ---------------------------------------------------------------------

def test_photon_csv(tmp_path):
    out = str(tmp_path / "p.csv")
    assert cli.main(["photon", "--eta", "0.5", "--nmax", "3", "--out", out]) == 0
    header, rows = read_csv(out)
    assert header == ["n", "mean_detected", "lambda_0", "lambda_1", "lambda_2", "lambda_3"]
    assert rows[2][2:] == [0.25, 0.5, 0.25, 0.0]
    for n, mean, *col in rows:
        assert mean == pytest.approx(0.5 * n, abs=1e-12)
        assert sum(col) == pytest.approx(1.0, abs=1e-12)


def test_photon_ideal_and_minimal(tmp_path):
    out = str(tmp_path / "p.csv")
    cli.main(["photon", "--eta", "1", "--nmax", "4", "--out", out])
    _, rows = read_csv(out)
    np.testing.assert_array_equal(np.array(rows)[:, 2:], np.eye(5))
    cli.main(["photon", "--eta", "0.25", "--nmax", "1", "--out", out])
    _, rows = read_csv(out)
    # row n holds column n of lambda
    np.testing.assert_allclose(np.array(rows)[:, 2:].T, [[1, 0.75], [0, 0.25]])


def test_photon_invalid_eta(tmp_path):
    assert cli.main(["photon", "--eta", "0", "--nmax", "3"]) == 2


# ---- simulate ---------------------------------------------------------------------

def test_simulate_byte_identical(tmp_path):
    path = str(tmp_path / "n.json")
    cli.main(["neutron-export", "--a", "0.5", "--chi", str(np.pi / 2), "--out", path])
    outs = [str(tmp_path / f"s{i}.json") for i in range(2)]
    for o in outs:
        assert cli.main(["simulate", path, "--shots", "100000", "--seed", "12345", "--out", o]) == 0
    data = open(outs[0], "rb").read()
    assert data == open(outs[1], "rb").read()
    rep = json.loads(data)
    assert rep["measurement"] == "neutron"
    assert sum(rep["counts"]) == 100000
    assert rep["report"]["dof"] == 2


def test_simulate_bivariate_first(tmp_path, capsys):
    doc = {"dim": 2, "objects": [
        {"name": "rho", "role": "state", "operator": encode_matrix(np.eye(2) / 2)},
        {"name": "R", "role": "bivariate",
         "grid": [[encode_matrix(e) for e in row] for row in neutron_bivariate(1.0, 0.5).grid]},
    ]}
    code, out = run(["simulate", write(tmp_path, doc), "--shots", "0", "--seed", "1"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["counts"] == [[0, 0], [0, 0]] and "report" not in rep


def test_dump_helpers(tmp_path):
    path = str(tmp_path / "x.json")
    dump_operator_file(path, 2, [povm_entry("Z", Povm([np.diag([1, 0]), np.diag([0, 1])]))])
    (obj,) = load_operator_file(path).objects
    assert build(obj).is_pvm


def test_module_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "qmeas", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "radians" in res.stdout
    for cmd in ("validate", "martens", "neutron-sweep", "photon", "simulate", "entropic-check"):
        assert cmd in res.stdout


def test_log_env(tmp_path):
    out = str(tmp_path / "s.csv")
    res = subprocess.run(
        [sys.executable, "-m", "qmeas", "neutron-sweep", "--a-steps", "3", "--out", out],
        capture_output=True, text=True, env={"QMEAS_LOG": "info", "PATH": ""},
    )
    assert res.returncode == 0
    assert "wrote 3 sweep rows" in res.stderr
