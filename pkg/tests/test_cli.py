import csv
import io
import json
import os
import subprocess
import sys
from fractions import Fraction
from importlib import resources

import jsonschema
import pytest

from hpx.cli import main, parse_p, parse_p_spec, write_atomic

SCHEMA = json.loads(resources.files("hpx").joinpath("schemas/output.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return doc["result"]


def test_parse_p_exact():
    assert parse_p("2/3") == Fraction(2, 3)
    assert parse_p("0.5") == Fraction(1, 2)
    assert parse_p("0.6666667") != Fraction(2, 3)
    assert parse_p_spec("0.1:0.9:0.1") == [Fraction(i, 10) for i in range(1, 10)]
    assert parse_p_spec("1/3:2/3:1/3") == [Fraction(1, 3), Fraction(2, 3)]
    assert parse_p_spec("0.25") == [Fraction(1, 4)]


def test_constants(capsys):
    r = run_json(capsys, "constants", "--k", "3", "--p", "2/3")
    assert r["source"] == "closed_form" and r["p_exact"] == "2/3"
    assert r["table"]["entries"][r["table"]["best"]]["value"] == pytest.approx(1.4973643032, abs=1e-9)
    assert run_json(capsys, "constants", "--k", "2", "--p", "0.5")["value"] == pytest.approx(1.6875)
    r = run_json(capsys, "constants", "--k", "1", "--p", "1.5")
    assert r["value"] == 1 and r["source"] == "trivial"


def test_constants_without_closed_form_uses_solver(capsys):
    r = run_json(capsys, "constants", "--k", "3", "--p", "0.6666667", "--starts", "20")
    assert r["source"] == "solver"
    assert r["value"] == pytest.approx(1.4973643, abs=1e-6)
    assert r["bounds"]["closed_form"] is None


def test_bounds_csv_grid(capsys):
    code, out, _ = run(capsys, "bounds", "--k", "2", "--kmax", "3", "--p", "0.25:0.75:0.25", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    assert float(rows[1]["dual_bound"]) == pytest.approx(2.0)
    r = run_json(capsys, "bounds", "--k", "3", "--p", "2/3")
    assert r["rows"][0]["dual_bound"] == pytest.approx(1.6976527263)


def test_solve(capsys):
    r = run_json(capsys, "solve", "--k", "2", "--p", "1/2", "--l", "0", "--starts", "30", "--seed", "4")
    vals = sorted(s["candidate"]["value"] for s in r["solutions"])
    assert vals[-1] == pytest.approx(27 / 16, abs=1e-10)
    assert r["summary"]["distinct_canonical"] == len(vals)


def test_search_modes(capsys):
    r = run_json(capsys, "search", "--k", "2", "--p", "1/2", "--mode", "structured", "--l", "0", "--starts", "4")
    assert r["objective"] == pytest.approx(27 / 16, abs=1e-8)
    r = run_json(capsys, "search", "--k", "2", "--p", "1/2", "--mode", "polynomial", "--degree", "8",
                 "--starts", "6")
    assert 27 / 16 - 1e-4 <= r["objective"] <= 27 / 16 + 1e-8


def test_scan_csv_atomic(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, stdout, _ = run(capsys, "scan", "--kmax", "2", "--p", "0.25:0.75:0.25", "--starts", "4",
                          "--format", "csv", "--out", str(out))
    assert code == 0 and stdout == ""
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["k", "p", "best_l", "best_value", "closed_form", "gap", "zero_free", "a0_nonzero"]
    assert len(rows) == 6
    row = [r for r in rows if r["k"] == "2" and float(r["p"]) == 0.5][0]
    assert float(row["best_value"]) == pytest.approx(1.6875, abs=1e-8)
    assert [p.name for p in tmp_path.iterdir()] == ["scan.csv"]


def test_scan_json_hits_two_thirds_exactly(capsys):
    r = run_json(capsys, "scan", "--kmax", "3", "--p", "1/3:2/3:1/3", "--starts", "4")
    row = [x for x in r["rows"] if x["k"] == 3 and abs(x["p"] - 2 / 3) < 1e-12][0]
    assert row["closed_form"] == pytest.approx(1.4973643032, abs=1e-9)
    assert row["best_l"] == 0 and abs(row["gap"]) < 1e-7


def test_verify(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, _ = run(capsys, "verify", "--suite", "paper-values", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, SCHEMA)
    assert doc["result"]["passed"] and len(doc["result"]["checks"]) > 20
    code, _, _ = run(capsys, "verify", "--suite", "identities", "--format", "csv")
    assert code == 0


def test_verify_failure_exit_code(monkeypatch, capsys):
    from hpx import cli, verify
    monkeypatch.setitem(cli.SUITES, "paper-values", lambda budget: [verify.Check("forced", False, "x")])
    code, out, _ = run(capsys, "verify", "--suite", "paper-values")
    assert code == 1 and json.loads(out)["result"]["passed"] is False


@pytest.mark.parametrize("argv", [
    ["constants", "--k", "0", "--p", "1/2"],
    ["constants", "--k", "2", "--p", "-1"],
    ["constants", "--k", "2", "--p", "abc"],
    ["solve", "--k", "2", "--p", "3/2", "--l", "0"],
    ["solve", "--k", "2", "--p", "1/2", "--l", "5"],
    ["search", "--k", "2", "--p", "1/2", "--mode", "polynomial"],
    ["scan", "--kmax", "2", "--p", "0.5:1.5:0.5"],
    ["scan", "--kmax", "2", "--p", "0.1:0.2"],
    ["bogus"],
    [],
])
def test_usage_errors(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_non_convergence_exit_code(monkeypatch, capsys):
    from hpx import cli
    monkeypatch.setattr(cli, "solve_multistart", lambda *a, **k: [])
    assert run(capsys, "solve", "--k", "2", "--p", "1/2", "--l", "0")[0] == 3


def test_write_atomic_replaces_whole_file(tmp_path):
    target = tmp_path / "x.json"
    target.write_text("old contents that are longer")
    write_atomic(str(target), "new")
    assert target.read_text() == "new"
    assert [p.name for p in tmp_path.iterdir()] == ["x.json"]


def test_console_entry_point_with_thread_cap(tmp_path):
    env = dict(os.environ, HPX_THREADS="2")
    proc = subprocess.run([sys.executable, "-m", "hpx", "search", "--k", "2", "--p", "1/2", "--l", "0",
                           "--starts", "4"], capture_output=True, text=True, env=env, timeout=120)
    assert proc.returncode == 0, proc.stderr
    parallel = json.loads(proc.stdout)["result"]
    env["HPX_THREADS"] = "1"
    proc = subprocess.run([sys.executable, "-m", "hpx", "search", "--k", "2", "--p", "1/2", "--l", "0",
                           "--starts", "4"], capture_output=True, text=True, env=env, timeout=120)
    assert json.loads(proc.stdout)["result"] == parallel
