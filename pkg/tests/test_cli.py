import csv
import io
import json

import pytest

from stochpack.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    inst = tmp_path / "inst.txt"
    inst.write_text("# sizes\n0.5\n0.5\n0.3\n0.7\n0.25\n")
    finite = tmp_path / "finite.json"
    finite.write_text(json.dumps({"kind": "finite", "atoms": [[0.25, 0.6], ["0.333333333", 0.4]]}))
    uniform = tmp_path / "uniform.json"
    uniform.write_text(json.dumps({"kind": "uniform", "a": 0, "b": 1}))
    return tmp_path, inst, finite, uniform


def test_pack_writes_json(files):
    tmp, inst, _, _ = files
    code, out = run("pack", "--algo", "BF", "--input", str(inst), "--out", str(tmp / "p.json"))
    assert code == 0 and "3 bins" in out
    assert json.loads((tmp / "p.json").read_text()) == {"bins": [[0, 1], [2, 3], [4]], "n": 5}


def test_pack_meta(files):
    _, inst, _, _ = files
    code, _ = run("pack", "--algo", "meta", "--input", str(inst), "--delta", "0.25")
    assert code == 0


def test_opt(files):
    _, inst, _, _ = files
    code, out = run("opt", "--input", str(inst))
    assert code == 0 and out.startswith("opt=3")


def test_simulate_iid_csv(files):
    tmp, _, finite, _ = files
    path = tmp / "out.csv"
    code, out = run("simulate-iid", "--dist", str(finite), "--algo", "BF", "--n", "500", "--trials", "3",
                    "--seed", "1", "--csv", str(path))
    assert code == 0 and "denominator=opt" in out
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 3 and rows[0]["denom_kind"] == "opt"


def test_simulate_random_order(files):
    _, inst, _, uniform = files
    assert run("simulate-random-order", "--input", str(inst), "--algo", "FF", "--trials", "4", "--seed", "2")[0] == 0
    assert run("simulate-random-order", "--gen", str(uniform), "--n", "100", "--algo", "MBF", "--trials", "2",
               "--seed", "2")[0] == 0
    assert run("simulate-random-order", "--algo", "FF", "--trials", "4", "--seed", "2")[0] != 0


def test_triplets():
    code, out = run("triplets", "--n", "60", "--m", "30", "--trials", "2000", "--seed", "1")
    assert code == 0 and "formula=2.457627" in out
    assert run("triplets", "--n", "5", "--m", "9", "--trials", "5", "--seed", "1")[0] != 0


def test_vector(files):
    _, _, _, uniform = files
    code, out = run("vector", "--dim", "2", "--dists", str(uniform), "--n", "10", "--trials", "2", "--seed", "3",
                    "--algo", "BF")
    assert code == 0 and "denominator=opt" in out
    assert run("vector", "--dim", "3", "--dists", str(uniform), str(uniform), "--n", "10", "--trials", "1",
               "--seed", "3")[0] != 0


def test_precondition_failures(files, tmp_path):
    _, inst, finite, _ = files
    bad = tmp_path / "bad.txt"
    bad.write_text("0.5\n1.5\n")
    assert run("pack", "--algo", "BF", "--input", str(bad))[0] != 0
    assert run("pack", "--algo", "NOPE", "--input", str(inst))[0] != 0
    assert run("simulate-iid", "--dist", str(finite), "--algo", "BF", "--n", "10", "--trials", "0", "--seed", "1")[0] != 0
    assert run("opt", "--input", str(tmp_path / "missing.txt"))[0] != 0
