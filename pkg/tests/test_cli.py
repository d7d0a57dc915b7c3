import json

import pytest

from adiabatic_mixing.cli import main


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_and_enumerate(tmp_path, capsys):
    path = tmp_path / "g.txt"
    assert run(capsys, "gen", "--n", "3", "--m", "2", "--seed", "1", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "enumerate", "--graph", str(path), "--format", "json")
    assert code == 0
    assert json.loads(out)["Ns"] == 5


def test_holonomy_json(capsys):
    code, out, _ = run(capsys, "holonomy", "--n", "2", "--m", "1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["dn"] == pytest.approx(1.0)
    assert data["cn"] == pytest.approx(1 / 3)


def test_diffuse_csv(capsys):
    code, out, _ = run(capsys, "diffuse", "--n", "4", "--m", "3", "--t", "1.5")
    assert code == 0
    assert out.splitlines()[0] == "index,bitmask,probability"


def test_bad_input_exit_1(tmp_path, capsys):
    assert run(capsys, "gen", "--n", "3", "--m", "9")[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n0 7\n")
    code, _, err = run(capsys, "enumerate", "--graph", str(bad))
    assert code == 1
    assert "line 2" in err
    assert run(capsys, "holonomy")[0] == 1
    assert run(capsys, "case2", "--n", "2", "--instances", "1")[0] == 1


def test_capacity_exit_3(capsys):
    assert run(capsys, "adiabatic-check", "--n", "13", "--m", "13")[0] == 3
    assert run(capsys, "enumerate", "--n", "31", "--m", "0")[0] == 3


def test_adiabatic_check(capsys):
    code, out, _ = run(capsys, "adiabatic-check", "--n", "2", "--m", "1", "--T", "5", "--T", "20")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "T,steps,leakage,fidelity"
    assert len(lines) == 3


def test_baseline(capsys):
    code, out, _ = run(capsys, "baseline", "--n", "6", "--m", "15", "--trials", "100")
    assert code == 0
    data = json.loads(out)
    assert data["nontrivial"] is None
    assert data["empirical_failure"] == 1.0


@pytest.mark.parametrize("kind", ["case1", "case2"])
def test_case_output_is_byte_identical(kind, tmp_path, capsys):
    paths = [tmp_path / f"{kind}_{i}.csv" for i in range(2)]
    for p in paths:
        assert run(capsys, kind, "--n-min", "6", "--n-max", "8", "--instances", "3", "--out", str(p),
                   "--fit-out", str(p) + ".json")[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert (tmp_path / f"{kind}_0.csv.json").read_bytes() == (tmp_path / f"{kind}_1.csv.json").read_bytes()
    fits = json.loads((tmp_path / f"{kind}_0.csv.json").read_text())
    assert fits["Ns"]["points"] == 3


def test_entropy_trace_and_fit(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    assert run(capsys, "entropy-trace", "--n", "5", "--m", "5", "--samples", "11", "--out", str(trace))[0] == 0
    assert len(trace.read_text().splitlines()) == 12
    table = tmp_path / "xy.csv"
    table.write_text("x,y\n1,2\n2,4\n3,8\n")
    code, out, _ = run(capsys, "fit", str(table), "--transform", "log2")
    assert code == 0
    assert json.loads(out)["slope"] == pytest.approx(1.0)
    assert run(capsys, "fit", str(table), "--x", "nope")[0] == 1
