import csv
import json
import math

import pytest

from ergkit.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_uniqueness(capsys):
    code, out, _ = run(["solve", "--alpha", "0", "--h", "0", "--json"], capsys)
    assert code == 0
    res = json.loads(out)
    assert res["maximizers"] == [pytest.approx(0.5, abs=1e-14)]
    assert res["free_energy"] == pytest.approx(0.346574, abs=1e-6)
    assert res["phase"] == "Uniqueness"


def test_solve_critical(capsys):
    code, out, _ = run(["solve", "--alpha", "3.375", "--h", "-0.806853", "--json"], capsys)
    res = json.loads(out)
    assert code == 0
    assert res["phase"] == "CriticalPoint"
    assert res["maximizers"] == [2 / 3]


def test_solve_domain_and_usage(capsys):
    assert run(["solve", "--alpha", "-3", "--h", "0"], capsys)[0] == 2
    assert run(["solve", "--alpha", "abc", "--h", "0"], capsys)[0] == 1
    assert run(["nosuch"], capsys)[0] == 1


def test_manifest_written(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert run(["solve", "--alpha", "1", "--h", "1", "--out", str(out), "--seed", "7"], capsys)[0] == 0
    man = json.loads((tmp_path / "s.json.manifest.json").read_text())
    assert man["subcommand"] == "solve" and man["seed"] == 7
    assert set(man["outputs"]) == {str(out)}
    assert len(man["outputs"][str(out)]) == 64


def test_curve(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert run(["curve", "--alpha-min", "3.376", "--alpha-max", "8", "--points", "12", "--out", str(out)], capsys)[0] == 0
    rows = list(csv.DictReader(out.open()))
    qs = [float(r["q"]) for r in rows]
    assert all(b < a for a, b in zip(qs, qs[1:]))
    assert abs(qs[0] - (math.log(2) - 1.5)) < 1e-2
    assert all(0 < float(r["kappa"]) < 1 for r in rows)
    assert len(rows[3]["q"].replace("-", "").replace(".", "")) >= 16
    assert run(["curve", "--alpha-min", "2", "--alpha-max", "8", "--out", str(out)], capsys)[0] == 2


def test_mf_alpha0_identity(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code, stdout, _ = run(["mf", "--n", "10", "--alpha", "0", "--h", "0.5", "--out", str(out)], capsys)
    assert code == 0
    res = json.loads(stdout)
    assert res["log_partition"] == pytest.approx(45 * math.log1p(math.exp(0.5)), rel=1e-13)


def test_mf_window(tmp_path, capsys):
    out = tmp_path / "w.csv"
    code, stdout, _ = run(["mf", "--n", "200", "--alpha", "5", "--h", "-1.9", "--window", "1", "0.3",
                           "--moments", "1", "3", "--out", str(out)], capsys)
    assert code == 0
    res = json.loads(stdout)
    assert set(res["moments"]) == {"1", "3"}
    probs = [float(r["prob"]) for r in csv.DictReader(out.open())]
    assert sum(probs) == pytest.approx(1.0)


def test_sample_deterministic_and_check(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sample", "--n", "25", "--alpha", "-1", "--h", "1", "--samples", "300", "--seed", "5"]
    assert run(args + ["--out", str(a)], capsys)[0] == 0
    assert run(args + ["--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    ma = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    mb = json.loads((tmp_path / "b.csv.manifest.json").read_text())
    assert ma["outputs"][str(a)] == mb["outputs"][str(b)]
    code, stdout, _ = run(["check", "--batch", str(a), "--out", str(tmp_path / "r")], capsys)
    assert code == 0
    rep = json.loads(stdout)
    assert rep["law"]["law"] == "Gaussian"
    assert 0 <= rep["ks"] <= 1
    assert (tmp_path / "r.hist.csv").read_text().startswith("bin_left,bin_right,count,theory_density")


def test_sample_chains_and_warning(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, err = run(["sample", "--n", "8", "--alpha", "3.375", "--h", "-0.8068528194400547", "--samples", "5",
                        "--chains", "2", "--out", str(out)], capsys)
    assert code == 0
    assert "warning" in err
    assert (tmp_path / "c_chain1.csv").exists()


def test_sample_usage_errors(capsys):
    assert run(["sample", "--n", "2", "--alpha", "0", "--h", "0"], capsys)[0] == 1
    assert run(["sample", "--n", "5", "--alpha", "0", "--h", "0", "--chains", "0"], capsys)[0] == 1
