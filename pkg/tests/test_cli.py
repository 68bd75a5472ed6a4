import json

import pytest

from sieve_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_admissible_shifts_and_forms(capsys):
    code, out, _ = run(capsys, "admissible", "0,2,4")
    assert code == 0
    assert json.loads(out)["admissible"] is False and json.loads(out)["witness"] == 3
    code, out, _ = run(capsys, "admissible", "--forms", "1:0,1:2,1:6")
    rep = json.loads(out)
    assert rep["admissible"] and rep["rho_unconditional"] == 7 and rep["rho_geh"] == 7


def test_compute_preset_is_deterministic(capsys):
    argv = ("compute", "--preset", "tableC_F1_k4", "--theta0", "1", "--corrections", "none")
    code, a, _ = run(capsys, *argv)
    assert code == 0
    _, b, _ = run(capsys, *argv)
    ja, jb = json.loads(a), json.loads(b)
    assert ja["result"]["upsilon"] == pytest.approx(10.44612, abs=5e-5)
    ja.pop("timing"), jb.pop("timing")
    assert ja == jb
    assert len(ja["manifest"]["params_hash"]) == 16


def test_compute_csv_and_poly_file(capsys, tmp_path):
    assert run(capsys, "presets", "--write", str(tmp_path))[0] == 0
    poly = tmp_path / "tableC_F1_k3.json"
    code, out, _ = run(capsys, "compute", "--poly", str(poly), "--theta", "1/3",
                       "--mode", "conjecture", "--support", "simplex", "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    fields = dict(zip(header.split(","), row.split(",")))
    assert float(fields["upsilon"]) == pytest.approx(7.38120, abs=5e-5)


@pytest.mark.parametrize("argv", [
    ("compute",),
    ("compute", "--preset", "nope"),
    ("compute", "--preset", "headline5", "--theta", "x"),
    ("compute", "--preset", "headline5", "--corrections", "5,1"),
    ("admissible",),
    ("regions", "show", "Q7"),
    ("frobnicate",),
])
def test_usage_errors_exit_one(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_regions_show(capsys):
    code, out, _ = run(capsys, "regions", "show", "R3")
    obj = json.loads(out)
    assert code == 0 and len(obj["pieces"]) == 4
    code, out, _ = run(capsys, "regions", "show", "A2,2")
    assert code == 0 and json.loads(out)["dim"] == 1


def test_reproduce_writes_csv(capsys, tmp_path):
    target = tmp_path / "c.csv"
    code, _, err = run(capsys, "reproduce", "C", "--k", "3", "4", "--out", str(target))
    assert code == 0 and "cells pass" in err
    lines = target.read_text().strip().splitlines()
    assert lines[0].startswith("table,k,column") and len(lines) == 5


def test_optimize_writes_polynomial(capsys, tmp_path):
    out = tmp_path / "g3.json"
    code, _, _ = run(capsys, "optimize", "--k", "3", "--table", "G", "--out", str(out))
    assert code == 0
    res = json.loads(out.read_text())["result"][0]
    assert res["upsilon"] <= res["published"] + 1e-3
    assert (tmp_path / "g3.poly.json").exists()
