from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import sys

import jsonschema
import pytest

from riesz_forms import __version__
from riesz_forms.cli import TABLE_HEADER, SuiteConfig, main, residue_table, run_suite
from riesz_forms.errors import UsageError
from riesz_forms.riesz import family

REPORT_SCHEMA = {
    "type": "object",
    "required": ["suite", "version", "config", "cases", "summary"],
    "properties": {
        "suite": {"type": "string"},
        "version": {"type": "string"},
        "config": {"type": "object"},
        "cases": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["params", "status", "detail"],
                "properties": {
                    "params": {"type": "object"},
                    "status": {"enum": ["pass", "fail", "inapplicable"]},
                    "detail": {"type": "string"},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["pass", "fail", "inapplicable"],
            "properties": {k: {"type": "integer", "minimum": 0} for k in ("pass", "fail", "inapplicable")},
        },
    },
}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_residue_suite_all_pass(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "residues", "--n", "4", "--p", "2",
                       "--k-max", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, REPORT_SCHEMA)
    assert data["summary"]["fail"] == 0 and data["summary"]["pass"] > 0
    assert data["version"] == __version__
    assert json.loads(json.dumps(data)) == data


def test_numeric_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "numeric", "--grid-n", "64",
                       "--tolerance", "1e-9", "--family", "scalar", "--p", "0")
    assert code == 1
    assert json.loads(out)["summary"]["fail"] >= 1


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "unknown"],
    ["verify", "--suite", "residues", "--n", "3", "--p", "5"],
    ["verify", "--suite", "residues", "--n", "3", "--family", "custom"],
    ["table", "--n", "3"],
    ["verify", "--suite", "residues", "--family", "bogus"],
    ["verify", "--suite", "residues", "--lambda", "x"],
])
def test_usage_errors_exit_2(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse rejects some inputs itself
        code = exc.code
    assert code == 2


def test_suite_config_validation():
    with pytest.raises(UsageError):
        SuiteConfig(suite="residues", n=0)
    with pytest.raises(UsageError):
        SuiteConfig(suite="nope")


def test_deterministic_json(capsys):
    argv = ["verify", "--suite", "convolution", "--n", "3"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_thread_env_gives_same_report(capsys, monkeypatch):
    argv = ["verify", "--suite", "bernstein-sato", "--n", "3", "--k-max", "2"]
    monkeypatch.setenv("RIESZ_FORMS_THREADS", "1")
    _, serial, _ = run(capsys, *argv)
    monkeypatch.setenv("RIESZ_FORMS_THREADS", "2")
    _, parallel, _ = run(capsys, *argv)
    assert serial == parallel


def test_text_and_csv_reports(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "positivity", "--n", "4", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["check", "params", "status", "detail"]
    code, out, _ = run(capsys, "verify", "--suite", "positivity", "--n", "4", "--format", "text")
    assert code == 0 and "pass" in out


def test_custom_family_from_command_line(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "bernstein-sato", "--n", "3", "--k-max", "1",
                       "--family", "custom", "--A=1,2", "--B=-1,0,1")
    assert code == 0
    assert all(c["status"] == "pass" for c in json.loads(out)["cases"])


def test_table_csv_functions(capsys):
    code, out, _ = run(capsys, "table", "--n", "4", "--p", "0", "--k-max", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == TABLE_HEADER
    k1 = rows[2]
    # 2 pi^2 / (4 * 1 * G(3)) = pi^2 / 4, operator Delta = -(delta d)
    assert float(k1[2]) == pytest.approx(math.pi ** 2 / 4, rel=1e-14)
    assert (k1[3], k1[4]) == ("-1", "1")


def test_table_knapp_stein():
    n, p = 5, 2
    rows = residue_table(n, p, 3, family("knapp-stein", n, p))
    for row in rows[1:]:
        k = row["k"]
        a, b = n / 2 - p + k, n / 2 - p - k
        ratio = float(eval(row["coeff_ddelta"])) / float(eval(row["coeff_dd"]))
        assert ratio == pytest.approx(b / a)
    k0 = rows[0]
    assert k0["differential"]
    want = 2 * math.pi ** (n / 2) / math.gamma(n / 2 + 1) * (n - 2 * p) / 2
    got = k0["constant_float"] * float(eval(k0["coeff_dd"]))
    assert got == pytest.approx(want, rel=1e-13)


def test_table_json_and_out_file(tmp_path, capsys):
    target = tmp_path / "table.json"
    code, out, _ = run(capsys, "table", "--n", "3", "--p", "1", "--family", "knapp-stein",
                       "--out", str(target))
    assert code == 0 and out == ""
    data = json.loads(target.read_text())
    assert data["family"] == "knapp-stein" and len(data["rows"]) == 4


def test_numeric_csv_dump(capsys):
    code, out, _ = run(capsys, "numeric", "--grid-n", "16", "--format", "csv", "--p", "1")
    assert code == 0
    assert out.splitlines()[0].startswith("x1,x2,e1")
    assert len(out.splitlines()) == 1 + 16 * 16


def test_run_suite_api():
    rep = run_suite(SuiteConfig(suite="recurrence", n=4, k_max=2))
    statuses = {c.status for c in rep.cases}
    assert "fail" not in statuses and "inapplicable" in statuses
    assert rep.exit_code == 0


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "riesz_forms.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
