import json
import os
import subprocess
import sys

import pytest

from geodex.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


MATRIX = [
    # (argv, expected exit code)
    (["build", "johnson", "--n", "5", "--k", "2"], 0),
    (["build", "pg", "--space", "sp", "--omega", "3", "--q", "2", "--k", "2"], 0),
    (["build", "johnson", "--n", "3", "--k", "2"], 2),
    (["build", "grassmann", "--n", "4", "--k", "2", "--q", "6"], 2),
    (["build", "hamming", "--k", "14", "--m", "3"], 3),
    (["build", "dualpolar", "--space", "o+", "--omega", "2", "--q", "4"], 2),
    (["build", "doubledodd", "--k", "3", "--derive", "halved"], 0),
    (["build", "hamming", "--k", "4", "--m", "2", "--derive", "folded"], 0),
    (["build", "johnson", "--n", "5", "--k", "2", "--derive", "halved"], 2),
    (["check", "gtg", "--family", "dualpolar", "--space", "sp", "--omega", "2", "--q", "2"], 0),
    (["check", "gtg", "--family", "pg", "--space", "sp", "--omega", "3", "--q", "2", "--k", "2"], 1),
    (["check", "dtg", "--family", "johnson", "--n", "6", "--k", "3"], 0),
    (["check", "array", "--family", "grassmann", "--n", "4", "--k", "2", "--q", "2"], 0),
    (["check", "array", "--family", "pg", "--space", "sp", "--omega", "3", "--q", "2", "--k", "2"], 1),
    (["check", "primitivity", "--family", "hamming", "--k", "4", "--m", "2"], 0),
    (["check", "bijection", "--family", "johnson", "--n", "6", "--k", "3"], 0),
    (["check", "pg-orbits", "--space", "sp", "--omega", "3", "--q", "2", "--k", "2"], 0),
    (["check", "screens", "--qmax", "200"], 0),
    (["check", "screens", "--qmax", "3"], 2),
    (["array", "--family", "johnson", "--n", "5", "--k", "2"], 0),
    (["census", "--family", "hamming", "--k", "3", "--m", "2"], 0),
    (["primitivity", "--family", "doubledodd", "--k", "3"], 0),
    (["bijection", "--family", "alternating", "--k", "4", "--q", "2"], 2),
    (["orbits", "--family", "odd", "--k", "3", "--object", "arcs", "--length", "3"], 0),
    (["screens", "--qmax", "100"], 0),
    (["pg", "distance", "--omega", "3", "--q", "2", "--k", "2", "--x", "0", "--y", "5"], 0),
    (["pg", "opposite", "--omega", "3", "--q", "2", "--k", "2", "--x", "0", "--y", "0"], 2),
    (["pg", "types", "--m", "4", "--omega", "6", "--k", "4"], 0),
    (["pg", "types", "--m", "4", "--omega", "4", "--k", "4"], 2),
    (["pg", "normalize", "--omega", "3", "--q", "2", "--k", "2", "--x", "0", "--y", "300"], 0),
]


@pytest.mark.parametrize("argv,code", MATRIX, ids=[" ".join(a[:2]) + f"#{i}" for i, (a, _) in enumerate(MATRIX)])
def test_exit_code_matrix(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code, (out, err)
    if code in (0, 1):
        rep = json.loads(out)
        assert rep["config"]["seed"] == 0
        assert "claim" in rep or argv[0] == "build"
    else:
        assert err.startswith("geodex: ")


def test_matrix_is_large_enough():
    assert len(MATRIX) >= 20
    assert {c for _, c in MATRIX} == {0, 1, 2, 3}


def test_build_text_summary(capsys):
    code, out, _ = run(capsys, "build", "johnson", "--n", "5", "--k", "2", "--format", "text")
    assert code == 0 and out.splitlines()[0] == "n=10 valency=6 diameter=2"
    code, out, _ = run(capsys, "build", "pg", "--space", "sp", "--omega", "3", "--q", "2", "--k", "2",
                       "--format", "text")
    assert "n=315" in out and "diameter=3" in out


def test_pg_orbits_lengths(capsys):
    code, out, _ = run(capsys, "check", "pg-orbits", "--space", "sp", "--omega", "3", "--q", "2", "--k", "2")
    rep = json.loads(out)
    assert code == 0 and rep["result"]["lengths"] == [1, 2, 1] == rep["result"]["predicted"]


def test_screens_report(capsys):
    code, out, _ = run(capsys, "check", "screens", "--qmax", "1000")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] is True
    assert all(not s["divides"] for s in rep["result"]["sporadic"])


def test_byte_identical_json(capsys):
    argv = ["check", "gtg", "--family", "johnson", "--n", "6", "--k", "3", "--seed", "7"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    assert json.loads(a)["config"]["seed"] == 7


def test_save_and_reload(capsys, tmp_path):
    path = str(tmp_path / "g.json")
    assert run(capsys, "build", "grassmann", "--n", "4", "--k", "2", "--q", "2", "--save", path)[0] == 0
    code, out, _ = run(capsys, "check", "gtg", "--graph", path)
    assert code == 0 and json.loads(out)["pass"] is True
    gdx = str(tmp_path / "g.gdx")
    assert run(capsys, "build", "cycle", "--k", "9", "--save", gdx)[0] == 0
    code, out, _ = run(capsys, "array", "--graph", gdx)
    assert code == 0


def test_malformed_graph_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3, "adjacency": [[1], [0]]}')
    assert run(capsys, "array", "--graph", str(bad))[0] == 4
    junk = tmp_path / "junk.gdx"
    junk.write_bytes(b"GDX1\x00")
    assert run(capsys, "array", "--graph", str(junk))[0] == 4
    forged = tmp_path / "forged.json"
    forged.write_text(json.dumps({"n": 3, "adjacency": [[1], [0, 2], [1]], "generators": [[1, 2, 0]]}))
    assert run(capsys, "check", "gtg", "--graph", str(forged))[0] == 4


def test_out_and_tsv(capsys, tmp_path):
    out = tmp_path / "r.tsv"
    code, printed, _ = run(capsys, "census", "--family", "cycle", "--k", "5", "--format", "tsv", "--out", str(out))
    assert code == 0 and printed == ""
    lines = out.read_text().splitlines()
    assert all("\t" in line for line in lines)


def test_threads_env(capsys, monkeypatch):
    monkeypatch.delenv("GEODEX_THREADS", raising=False)
    code, out, _ = run(capsys, "array", "--family", "cycle", "--k", "6", "--threads", "2")
    assert code == 0 and json.loads(out)["config"]["threads"] == 2
    assert os.environ["GEODEX_THREADS"] == "2"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "geodex", "array", "--family", "johnson", "--n", "5", "--k", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["b"] == [6, 2]
