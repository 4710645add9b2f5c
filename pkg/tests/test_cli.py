import json
import subprocess
import sys
from pathlib import Path

import pytest

from colexlab.cli import CSV_COLUMNS, main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


GOLDEN_CASES = {
    "build_simplicial_D2.txt": ["build", "--family", "simplicial", "--D", "2"],
    "goodness_D2_j1_k2.json": ["goodness", "--D", "2", "--j", "1", "--k", "2"],
    "gates_steane_H.json": ["gates", "--code", "steane", "--gate", "H"],
    "gates_15_R2.json": ["gates", "--code", "15", "--gate", "R2"],
    "clusters_grid2d_l4.json": ["clusters", "--graph", "grid2d", "--l", "4"],
    "thermal_steane_exact.csv": ["thermal", "--family", "simplicial", "--D", "2", "--beta", "0,1,2", "--exact"],
    "thermal_toric_mc.csv": ["thermal", "--family", "toric", "--D", "2", "--d", "1", "--L", "3", "--beta", "1",
                             "--steps", "400", "--burn-in", "20", "--seed", "5"],
    "anneal_small.json": ["anneal", "--D", "2", "--d", "2", "--L", "4", "--beta", "1", "--sweeps", "40",
                          "--chains", "4", "--burn-in", "10", "--seed", "1"],
}


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden(capsys, name):
    code, out, _ = run(capsys, GOLDEN_CASES[name])
    assert code == 0
    assert out == (GOLDEN / name).read_text()


def test_build_examples(capsys, tmp_path):
    path = tmp_path / "toric.json"
    code, out, _ = run(capsys, ["build", "--family", "toric", "--D", "2", "--d", "1", "--L", "3", "--out", str(path)])
    assert code == 0 and out.startswith("[[18,2,3]]")
    desc = json.loads(path.read_text())
    assert desc["n"] == 18 and desc["k"] == 2 and desc["version"] == 1
    code, _, err = run(capsys, ["build", "--family", "toric", "--D", "2", "--d", "3"])
    assert code == 2 and "error" in err


@pytest.mark.parametrize("D, n", [(2, 7), (3, 15), (4, 31)])
def test_build_simplicial_sizes(capsys, D, n):
    code, out, _ = run(capsys, ["build", "--family", "simplicial", "--D", str(D), "--w-max", "1"])
    desc = json.loads(out.splitlines()[1])
    assert code == 0 and desc["n"] == n and desc["k"] == 1


def test_usage_errors(capsys):
    assert run(capsys, ["nonsense"])[0] == 2
    assert run(capsys, ["thermal", "--beta", "x"])[0] == 2
    assert run(capsys, ["thermal", "--beta", "-1"])[0] == 2
    assert run(capsys, ["thermal", "--beta", "1", "--p", "0.6"])[0] == 2
    assert run(capsys, ["thermal", "--family", "toric", "--beta", "1"])[0] == 2
    assert run(capsys, ["goodness", "--D", "2", "--j", "5", "--k", "1"])[0] == 2
    assert run(capsys, ["goodness", "--D", "2", "--j", "1", "--k", "1", "--punctured"])[0] == 2
    assert run(capsys, ["gates", "--gate", "T"])[0] == 2
    assert run(capsys, ["anneal", "--L", "1"])[0] == 2


def test_thermal_exact_too_large(capsys, tmp_path):
    n = 21
    desc = {"version": 1, "n": n, "k": 1, "x_gens": [], "z_gens": [[i, i + 1] for i in range(n - 1)],
            "logical_x": [list(range(n))], "logical_z": [[0]], "meta": {}}
    path = tmp_path / "chain20.json"
    path.write_text(json.dumps(desc))
    code, _, err = run(capsys, ["thermal", "--descriptor", str(path), "--beta", "1", "--exact"])
    assert code == 3 and "too large" in err


def test_thermal_matches_exact(capsys):
    _, exact, _ = run(capsys, ["thermal", "--family", "simplicial", "--D", "2", "--beta", "0,1,2", "--exact"])
    _, mc, _ = run(capsys, ["thermal", "--family", "simplicial", "--D", "2", "--beta", "0,1,2", "--steps", "20000", "--seed", "4"])
    ex_rows = [r.split(",") for r in exact.splitlines()[1:]]
    mc_rows = [r.split(",") for r in mc.splitlines()[1:]]
    assert mc.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(mc_rows) == 3
    for e, m in zip(ex_rows, mc_rows):
        assert abs(float(e[5]) - float(m[5])) < 3 * float(m[6])


def test_thermal_deterministic_and_env_seed(capsys, monkeypatch, tmp_path):
    argv = ["thermal", "--family", "toric", "--D", "2", "--L", "3", "--beta", "0.5,1", "--p", "0.05",
            "--steps", "200", "--burn-in", "10"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--seed", "9", "--out", str(a)]) == 0
    assert main(argv + ["--seed", "9", "--out", str(b), "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    monkeypatch.setenv("COLEXLAB_SEED", "9")
    _, out, _ = run(capsys, argv)
    assert out == a.read_text()
    monkeypatch.setenv("COLEXLAB_SEED", "nine")
    assert run(capsys, argv)[0] == 2


def test_goodness_examples(capsys):
    _, out, _ = run(capsys, ["goodness", "--D", "3", "--j", "2", "--k", "2"])
    rep = json.loads(out)
    assert rep["verdict"] is True and rep["agree"] is True
    assert rep["bruteforce"]["method"] == "enumeration" and rep["theorem"]["method"] == "theorem"
    _, out, _ = run(capsys, ["goodness", "--D", "2", "--j", "1", "--k", "2"])
    rep = json.loads(out)
    assert rep["verdict"] is False and rep["theorem"]["witness"]
    _, out, _ = run(capsys, ["goodness", "--D", "2", "--j", "1", "--k", "0"])
    assert json.loads(out)["verdict"] is True


def test_gates_reports(capsys):
    _, out, _ = run(capsys, ["gates", "--code", "15", "--gate", "H"])
    assert json.loads(out)["preserved"] is False
    _, out, _ = run(capsys, ["gates", "--code", "steane", "--gate", "CNOT"])
    assert json.loads(out)["logical_action"] == {"X0": "+XX", "X1": "+IX", "Z0": "+ZI", "Z1": "+ZZ"}


def test_clusters_peierls(capsys):
    _, out, _ = run(capsys, ["clusters", "--graph", "path", "--l", "3", "--beta", "3"])
    rep = json.loads(out)
    assert rep["count"] == 3 and rep["within_bound"] and rep["peierls"] > 0
    assert run(capsys, ["clusters", "--graph", "path", "--l", "3", "--beta", "0.1"])[0] == 3


def test_anneal_acceptance(capsys):
    code, out, _ = run(capsys, ["anneal", "--D", "2", "--d", "2", "--L", "8", "--beta", "1", "--threads", "4"])
    assert code == 0 and json.loads(out)["fraction"] >= 0.99


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "colexlab", "gates", "--gate", "X"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["logical_action"] == {"X0": "+X", "Z0": "-Z"}
