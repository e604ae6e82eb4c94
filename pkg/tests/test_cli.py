import json
import subprocess
import sys

import numpy as np
import pytest

from sphandle.cli import main


@pytest.fixture(autouse=True)
def fixed_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_axioms(tmp_path, capsys):
    assert run(["axioms", "--dihedral", "12"], capsys)[0] == 0
    assert run(["axioms", "--trivial", "5"], capsys)[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "table": [[1, 1], [0, 1]]}))
    code, out, _ = run(["axioms", "--table", str(bad)], capsys)
    assert code == 1 and "Q1 violated at (0,)" in out
    assert run(["axioms", "--dihedral", "0"], capsys)[0] == 2
    assert run(["axioms", "--table", str(tmp_path / "missing.json")], capsys)[0] == 2
    rng = tmp_path / "range.json"
    rng.write_text(json.dumps({"n": 2, "table": [[0, 5], [1, 1]]}))
    assert run(["axioms", "--table", str(rng)], capsys)[0] == 2


def test_color_finite(capsys, tmp_path):
    code, out, err = run(["color", "--knot", "trefoil", "--finite", "dihedral3"], capsys)
    data = json.loads(out)
    assert code == 0 and data["count"] == 9 and len(data["colorings"]) == 9
    table = tmp_path / "d5.json"
    table.write_text(json.dumps({"n": 5, "table": [[(2 * y - x) % 5 for y in range(5)] for x in range(5)]}))
    code, out, _ = run(["color", "--knot", "figure8", "--finite", str(table)], capsys)
    assert json.loads(out)["count"] == 25


def test_color_spherical(capsys):
    code, out, err = run(["color", "--knot", "trefoil", "--r", "1.5707963", "--seed", "7"], capsys)
    data = json.loads(out)
    assert code == 0
    assert any(c["class"] == "NONTRIVIAL" for c in data["colorings"])
    assert data["orbits"] == len(data["colorings"])
    assert "NONTRIVIAL" in err and "not a completeness proof" in err

    code, out, err = run(["color", "--knot", "unknot", "--r", "1.0"], capsys)
    data = json.loads(out)
    assert data["orbits"] == 1 and data["colorings"][0]["class"] == "TRIVIAL"


def test_color_degrees(capsys):
    code, out, _ = run(["color", "--knot", "trefoil", "--r-deg", "90", "--starts", "8"], capsys)
    assert json.loads(out)["r"] == pytest.approx(np.pi / 2)


@pytest.mark.parametrize("argv", [
    ["color", "--knot", "trefoil", "--r", "3.5"],
    ["color", "--knot", "trefoil", "--r", "0"],
    ["color", "--pd", "[[1,2,3]]", "--r", "1.0"],
    ["color", "--knot", "7_99", "--r", "1.0"],
    ["color", "--knot", "trefoil"],
    ["color", "--r", "1.0"],
    ["color", "--knot", "trefoil", "--r", "1.0", "--starts", "0"],
])
def test_color_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_color_pd_input(capsys):
    code, out, _ = run(["color", "--pd", "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]", "--finite", "dihedral5"], capsys)
    assert code == 0 and json.loads(out)["count"] == 25


def test_byte_identical_reruns(tmp_path, capsys, monkeypatch):
    outs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("SPHANDLE_THREADS", threads)
        path = tmp_path / f"run{threads}.json"
        assert run(["color", "--knot", "figure8", "--r", "1.0", "--seed", "4", "--out", str(path)], capsys)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    manifest = json.loads(outs[0])["manifest"]
    assert manifest["seed"] == 4 and manifest["command"] == "color"
    assert manifest["timestamp"] == "2023-11-14T22:13:20Z"


def test_correspond_trace_zero(capsys):
    code, out, _ = run(["correspond", "--knot", "trefoil", "--r", str(np.pi / 2)], capsys)
    data = json.loads(out)
    assert code == 0 and data["ok"]
    for res in data["results"]:
        for g in res["representation"]["generators"]:
            assert abs(2 * g["q"]["w"]) < 1e-10
        assert all(c["ok"] for c in res["audit"]["clauses"].values())


def test_correspond_figure_eight(capsys):
    code, out, _ = run(["correspond", "--knot", "figure8", "--r", str(np.pi / 3), "--matrix"], capsys)
    data = json.loads(out)
    assert code == 0
    for res in data["results"]:
        for g in res["representation"]["generators"]:
            assert 2 * g["q"]["w"] == pytest.approx(1.0, abs=1e-10)
            assert len(g["matrix"]) == 4


def test_correspond_from_file_and_tampered(tmp_path, capsys):
    path = tmp_path / "cols.json"
    assert run(["color", "--knot", "trefoil", "--r", "1.2", "--out", str(path)], capsys)[0] == 0
    code, _, err = run(["correspond", "--knot", "trefoil", "--from-colorings", str(path)], capsys)
    assert code == 0

    data = json.loads(path.read_text())
    v = data["colorings"][-1]["arcs"][0]["v"]
    data["colorings"][-1]["arcs"][0]["v"] = [1.1 * c for c in v]
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(data))
    code, _, err = run(["correspond", "--knot", "trefoil", "--from-colorings", str(bad)], capsys)
    assert code == 1 and "trace" in err

    code, _, _ = run(["correspond", "--knot", "figure8", "--from-colorings", str(path)], capsys)
    assert code == 2


def test_isocheck(capsys):
    code, out, err = run(["isocheck", "--samples", "10000", "--seed", "1"], capsys)
    assert code == 0 and json.loads(out)["ok"]
    assert run(["isocheck", "--samples", "0"], capsys)[0] == 2
    code, out, err = run(["isocheck", "--samples", "500", "--flip-orientation"], capsys)
    assert code == 1 and "clark_saito" in err and "FAIL" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sphandle", "axioms", "--dihedral", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "Q3 ok" in proc.stdout
