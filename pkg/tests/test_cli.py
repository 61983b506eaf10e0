import json
import subprocess
import sys

import pytest

from flatcyl.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def golden_l(tmp_path, capsys):
    path = tmp_path / "L.json"
    code, out, _ = run(capsys, "build", "--prototype", "5", "0", "1", "1", "-1", "-o", str(path))
    assert code == 0
    return path


def test_build_prints_summary(capsys, golden_l):
    code, out, _ = run(capsys, "build", "--prototype", "5", "0", "1", "1", "-1")
    info = json.loads(out)
    assert info == {"schema": 1, "stratum": "H(2)", "genus": 2, "area": "(5-1√5)/2", "cone_angles_pi": [6]}
    assert json.loads(golden_l.read_text())["schema"] == 1


def test_build_invalid_prototype(capsys):
    code, _, err = run(capsys, "build", "--prototype", "5", "1", "1", "1", "1")
    assert code == 2
    assert json.loads(err)["error"] == "InvalidPrototype"


def test_build_square_tiled(capsys):
    code, out, _ = run(capsys, "build", "--square-tiled", "(1,2,3)", "(1)(2,3)")
    assert code == 0 and json.loads(out)["stratum"] == "H(2)"
    code, _, err = run(capsys, "build", "--square-tiled", "(1)(2)", "(1)(2)")
    assert code == 2 and json.loads(err)["error"] == "NotConnected"


def test_build_octagon_and_slit_torus(capsys):
    assert json.loads(run(capsys, "build", "--octagon")[1])["area"] == "(2+2√2)/1"
    code, out, _ = run(capsys, "build", "--slit-torus", "1", "0", "0", "1", "1/2", "1/6")
    assert code == 0 and json.loads(out)["genus"] == 1


def test_decompose_and_saddles(capsys, golden_l):
    code, out, _ = run(capsys, "decompose", str(golden_l), "--direction", "0", "1")
    assert code == 0 and len(json.loads(out)["cylinders"]) == 2
    first = run(capsys, "saddles", str(golden_l), "--max-len2", "4")
    second = run(capsys, "saddles", str(golden_l), "--max-len2", "4")
    assert first == second and first[0] == 0
    assert len(json.loads(first[1])["saddles"]) == 32


def test_graph_outputs(capsys, golden_l):
    code, out, _ = run(capsys, "graph", str(golden_l), "--ball-r2", "4", "--center", "horiz", "--format", "dot")
    assert code == 0 and out.startswith('graph "ball"')
    code, out, _ = run(capsys, "graph", str(golden_l), "--ball-r2", "4", "--center", "horiz")
    data = json.loads(out)
    assert len(data["vertices"]) == 32 and set(data["distances"]) == {"0", "1"}


def test_quotient_dot(capsys):
    code, out, _ = run(capsys, "quotient", "--disc", "5", "--format", "dot")
    assert code == 0
    assert "v0 -- v1;" in out and "v1 -- v1;" in out


def test_exit_codes(capsys, golden_l, monkeypatch):
    code, _, err = run(capsys, "quotient", "--disc", "5", "--search-r2", "1")
    assert code == 3 and json.loads(err)["error"] == "SearchBudgetTooSmall"
    code, _, _ = run(capsys, "quotient", "--disc", "6")
    assert code == 2
    code, _, _ = run(capsys, "saddles", "/nonexistent.json")
    assert code == 2
    monkeypatch.setenv("FLATSURF_BUDGET", "nope")
    code, _, _ = run(capsys, "saddles", str(golden_l))
    assert code == 2
    monkeypatch.setenv("FLATSURF_BUDGET", "1")
    code, _, _ = run(capsys, "decompose", str(golden_l), "--direction", "1", "0")
    assert code == 3


def test_path_certificate(capsys, golden_l):
    code, out, _ = run(capsys, "path", str(golden_l), "--pairs", "5", "--seed", "1")
    cert = json.loads(out)
    assert code == 0 and cert["ok"] and len(cert["pairs"]) == 5


def test_check_dichotomy(capsys):
    code, out, _ = run(capsys, "check", "--suite", "dichotomy")
    assert code == 0 and json.loads(out)["ok"]


def test_check_on_surface_file(capsys, tmp_path):
    path = tmp_path / "six.json"
    run(capsys, "build", "--square-tiled", "(1)(2,3,4)(5,6)", "(1,2)(3,5)(4,6)", "-o", str(path))
    code, out, _ = run(capsys, "check", str(path), "--suite", "dichotomy")
    assert code == 0 and json.loads(out)["dichotomy"]["rows"][0]["stratum"] == "H(1,1)"


def test_module_entry_point(golden_l):
    res = subprocess.run([sys.executable, "-m", "flatcyl", "saddles", str(golden_l), "--max-len2", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["schema"] == 1
