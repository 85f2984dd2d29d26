import csv
import io
import json
import subprocess
import sys

import pytest

from smoothcount.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_exact_examples():
    assert run("exact", "--bases", "2,3", "--x", "1e6") == (0, "142\n")
    assert run("exact", "--bases", "2,3,5,7", "--x", "1e3") == (0, "141\n")
    assert run("exact", "--bases", "2,3", "--x", "1") == (0, "1\n")
    assert run("exact", "--bases", "2,3", "--x", "1e4", "--squares") == (0, "11\n")


def test_exact_json():
    code, text = run("exact", "--bases", "2,3", "--x", "1e100", "--format", "json")
    assert code == 0
    assert json.loads(text) == {"basis": [2, 3], "x": "1e100", "count": 35084}


def test_invalid_basis_exit_2(capsys):
    code, text = run("exact", "--bases", "2,4", "--x", "10")
    assert code == 2 and text == ""
    assert "GcdNotOne" in capsys.readouterr().err
    code, _ = run("formula", "--variant", "hl2", "--bases", "2,3,4", "--x", "10")
    assert code == 2
    assert "MultiplicativelyDependentPair" in capsys.readouterr().err
    assert run("formula", "--variant", "hl2", "--bases", "2,3,5", "--x", "10")[0] == 2


@pytest.mark.parametrize("argv", [
    ["exact", "--bases", "2,3", "--x", "1.5"],
    ["exact", "--bases", "2,x", "--x", "10"],
    ["exact", "--bases", "2,3"],
    ["formula", "--variant", "nope", "--bases", "2,3", "--x", "10"],
    ["formula", "--variant", "hl2", "--bases", "2,3", "--x", "10", "--R", "abc"],
    ["formula", "--variant", "hl2", "--bases", "2,3", "--x", "10", "--R", "-1"],
    ["formula", "--variant", "schumacher2", "--bases", "2,3", "--x", "1"],
    ["formula", "--variant", "hl2", "--bases", "2,3", "--x", "10", "--digits", "10"],
    ["table", "--preset", "table9"],
    ["table", "--preset", "table1", "--rows", "5..99"],
    ["sweep", "--variant", "hl2", "--bases", "2,3", "--x", "10", "--R", "5:1"],
    ["bogus"],
])
def test_parse_errors_exit_3(argv, capsys):
    code, text = run(*argv)
    assert code == 3
    assert text == ""
    assert capsys.readouterr().err.startswith("error:")


def test_formula_text_output():
    code, text = run("formula", "--variant", "hl2", "--bases", "2,3", "--x", "10", "--R", "6", "--digits", "40")
    assert code == 0
    lines = dict(line.split(None, 1) for line in text.strip().splitlines())
    assert lines["total"].startswith("7.010395367925806528")
    assert lines["rounded_count"] == "7"
    assert lines["terms_used"] == "2:4 3:6"
    assert lines["resonance_warnings"] == "none"


def test_formula_squares_json():
    code, text = run("formula", "--variant", "squares", "--bases", "2,3", "--x", "1e4", "--nm", "5", "--k", "400",
                     "--format", "json", "--places", "15")
    assert code == 0
    data = json.loads(text)
    assert data["total"] == "11.038613589829049"
    assert abs(float(data["total"]) - 11.038613589829053) < 1e-14
    assert data["terms_used"] == {"2": 5, "3": 5, "k": 400}


def test_formula_general_adaptive():
    code, text = run("formula", "--variant", "general", "--bases", "2,3,5", "--x", "1e3", "--adaptive", "--format", "json")
    assert code == 0
    assert json.loads(text)["rounded_count"] == 86


def test_json_round_trip_is_byte_stable():
    code, text = run("formula", "--variant", "triple", "--bases", "2,3,5", "--x", "1e3", "--R", "40", "--format", "json")
    assert code == 0
    assert json.dumps(json.loads(text), indent=2) + "\n" == text
    keys = list(json.loads(text))
    assert keys[:5] == ["variant", "basis", "x", "digits", "truncation"]


def test_digits_precedence(monkeypatch):
    args = ["formula", "--variant", "hl2", "--bases", "2,3", "--x", "10", "--R", "6", "--format", "json"]
    monkeypatch.setenv("SMOOTHCOUNT_DIGITS", "30")
    assert json.loads(run(*args)[1])["digits"] == 30
    assert json.loads(run(*args, "--digits", "60")[1])["digits"] == 60
    monkeypatch.delenv("SMOOTHCOUNT_DIGITS")
    assert json.loads(run(*args)[1])["digits"] == 50
    monkeypatch.setenv("SMOOTHCOUNT_DIGITS", "many")
    assert run(*args)[0] == 3


def test_table_row_zero_table2():
    code, text = run("table", "--preset", "table2", "--rows", "0..0", "--format", "json")
    assert code == 0
    (row,) = json.loads(text)
    # printed to 38 places, correct to about 20
    assert row["formula"].startswith("1.004082812812447944")
    assert row["paper_formula"] == "1.00408281281244794423184044310637662236"
    assert float(row["abs_diff"]) < 1e-19
    assert row["round_ok"] and row["digits_ok"] and row["status"] == "ok"


def test_table1_csv_and_summary(capsys):
    code, text = run("table", "--preset", "table1", "--rows", "1..10", "--format", "csv", "--jobs", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["row"] for r in rows] == [str(i) for i in range(1, 11)]
    assert all(r["round_ok"] == "true" and r["digits_ok"] == "true" for r in rows)
    assert "10 ok, 0 failed" in capsys.readouterr().err


def test_table5_shows_large_deviation_but_passes():
    code, text = run("table", "--preset", "table5", "--rows", "0..9", "--format", "json")
    assert code == 0
    row = [r for r in json.loads(text) if r["x"] == "1e7"][0]
    assert row["exact"] == 18 and row["formula"] == "18.408421860888305"


def test_table_skips_and_fails(capsys):
    code, text = run("table", "--preset", "table2", "--rows", "13..14", "--format", "json")
    assert code == 0
    assert all(r["status"] == "skipped: beyond-desk-scale" for r in json.loads(text))
    # the cubic table differs from the printed digits by more than 1e-6 here
    code, text = run("table", "--preset", "table3", "--rows", "1..1", "--format", "json")
    assert code == 1
    assert json.loads(text)[0]["status"] == "FAIL"
    assert "digits off by" in capsys.readouterr().err


def test_sweep_rows():
    code, text = run("sweep", "--variant", "hl2", "--bases", "2,3", "--x", "1e3", "--R", "1:100", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 100
    r26 = rows[25]
    assert r26["R"] == "26" and abs(float(r26["error"])) < 0.005
    assert all(r["exact"] == "40" for r in rows)


def test_sweep_parallel_matches_serial():
    args = ["sweep", "--variant", "general", "--bases", "2,3", "--x", "1e2", "--R", "1:50", "--format", "csv"]
    serial = run(*args)[1]
    assert run(*args, "--jobs", "3")[1] == serial
    errors = [abs(float(r["error"])) for r in csv.DictReader(io.StringIO(serial))]
    assert all(e < 0.5 for e in errors[20:])


def test_sweep_single_point():
    code, text = run("sweep", "--variant", "hl2", "--bases", "2,3", "--x", "10", "--R", "6", "--format", "csv")
    assert code == 0 and len(text.strip().splitlines()) == 2


def test_generate():
    assert run("generate", "--bases", "2,3", "--limit", "27")[1].split() == "1 2 3 4 6 8 9 12 16 18 24 27".split()
    assert run("generate", "--bases", "2,3,5", "--limit", "1e9", "--count", "4")[1].split() == ["1", "2", "3", "4"]


def test_numeric_failure_exit_4(monkeypatch, capsys):
    from smoothcount import analytic

    original = analytic._Guard.__init__

    def hopeless(self, digits, mp, strict):
        original(self, digits, mp, strict)
        self.warn = self.fail = mp.mpf("0.05")

    monkeypatch.setattr(analytic._Guard, "__init__", hopeless)
    code, _ = run("formula", "--variant", "hl2", "--bases", "2,3", "--x", "1e3", "--R", "26")
    assert code == 4
    assert "numeric failure" in capsys.readouterr().err


def test_console_script_and_module():
    for cmd in (["smoothcount"], [sys.executable, "-m", "smoothcount"]):
        proc = subprocess.run(cmd + ["exact", "--bases", "2,3,5", "--x", "1e100"], capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout == "1697191\n"
    proc = subprocess.run(["smoothcount", "exact", "--bases", "2,4", "--x", "9"], capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stdout == ""
