import csv
import io
import json
import subprocess
import sys

import pytest

from gammasum import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_closed_form_point(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "thm1_closed_form", "--b", "1", "--c", "2",
                       "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 1 and rows[0]["passed"] is True
    assert list(rows[0]) == list(cli.REPORT_FIELDS)


def test_verify_divergent_point(capsys):
    code, out, _ = run(capsys, "verify", "--a", "1", "--c", "1", "--identity", "thm1_series")
    assert code == 0
    assert "Divergent" in out and out.startswith("PASS")


@pytest.mark.parametrize("argv", [
    ["verify", "--c", "-3"],
    ["verify", "--identity", "nope"],
    ["verify", "--identity", "jcos", "--tol", "-1"],
    ["verify", "--identity", "jcos", "--b", "x"],
    ["verify", "--format", "xml"],
    ["verify", "--seed", "0x"],
    ["verify", "--identity", "general_s", "--s", "2"],
    ["table", "--b", ""],
    ["table", "--b", "1", "--c", "1.5"],
    ["table", "--a", "1"],
    ["sample", "--n", "10"],
    ["sample", "--a", "1", "--c", "1"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert "usage error" in err


def test_failed_report_exit_1(capsys):
    # mixture_norm carries no numerical budget, so roundoff alone exceeds 1e-30
    code, out, _ = run(capsys, "verify", "--identity", "mixture_norm", "--lambda", "0.2", "--tol", "1e-30")
    assert code == 1
    assert out.startswith("FAIL")


def test_per_identity_tolerance(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "mixture_norm", "--lambda", "0.2",
                       "--tol", "mixture_norm=1e-30", "--format", "json")
    assert code == 1 and json.loads(out)[0]["tol"] == 1e-30


def test_table_examples(capsys):
    code, out, _ = run(capsys, "table", "--b", "2", "--c", "0.1,0.5,0.9", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 3
    assert all(r["rel_err"] <= 1e-6 for r in rows)
    assert list(rows[0]) == list(cli.TABLE_FIELDS)
    code, out, _ = run(capsys, "table", "--b", "1,2,4", "--c", "0.5", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "b,c,lhs_series,rhs_closed_form,rel_err" and len(lines) == 4


def test_sample_deterministic(capsys):
    argv = ("sample", "--a", "1", "--b", "1", "--c", "2", "--n", "1000000", "--seed", "42")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2 and out1.startswith("PASS")


def test_sample_mixture(capsys):
    code, out, _ = run(capsys, "sample", "--a", "0.5", "--b", "1", "--lambda", "1.5", "--n", "100000")
    assert code == 0 and "mixture_mc" in out and "thm1_expectation" not in out


def test_json_and_csv_roundtrip(capsys):
    # includes divergent points, whose rhs and errors are infinite
    base = ["verify", "--identity", "thm1_series", "--a", "1", "--b", "1,4", "--c", "1,2,5"]
    _, js, _ = run(capsys, *base, "--format", "json")
    _, cs, _ = run(capsys, *base, "--format", "csv")
    from_json = cli.reports_from_json(js)
    from_csv = cli.reports_from_csv(cs)
    assert len(from_json) == 6
    for a, b in zip(from_json, from_csv):
        da, db = a.to_dict(), b.to_dict()
        for k in cli.REPORT_FIELDS:
            if isinstance(da[k], float) and da[k] != da[k]:
                assert db[k] != db[k]
            else:
                assert da[k] == db[k]
    # serializing again reproduces the bytes
    assert cli.to_json([r.to_dict() for r in from_json]) == js
    assert cli.to_csv([r.to_dict() for r in from_csv], cli.REPORT_FIELDS) == cs
    header = next(csv.reader(io.StringIO(cs)))
    assert header == list(cli.REPORT_FIELDS)


def test_seventeen_significant_digits():
    assert cli.fmt_num(0.1) == "0.10000000000000001"
    assert float(cli.fmt_num(1 / 3)) == 1 / 3
    assert cli.fmt_num(float("inf")) == "inf"


def test_human_matches_json_values(capsys):
    base = ["verify", "--identity", "thm2", "--b", "2", "--c", "0.5"]
    _, human, _ = run(capsys, *base)
    _, js, _ = run(capsys, *base, "--format", "json")
    row = json.loads(js)[0]
    for key in ("lhs", "rhs", "abs_err", "rel_err"):
        assert f"{key}={cli.fmt_num(row[key])}" in human


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"identity": ["jcos"], "b": [1, 2], "c": [0.5], "format": "json",
                               "seed": "0x10", "n": 5000}))
    code, out, _ = run(capsys, "verify", "--config", str(cfg))
    assert code == 0 and len(json.loads(out)) == 2
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--b", "4")
    rows = json.loads(out)
    assert [r["params"]["b"] for r in rows] == [4]


def test_config_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "verify", "--config", str(bad))[0] == 2
    bad.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "verify", "--config", str(bad))[0] == 2
    assert run(capsys, "verify", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_out_path(tmp_path, capsys):
    target = tmp_path / "reports.csv"
    code, out, _ = run(capsys, "verify", "--identity", "mixture_norm", "--lambda", "1",
                       "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("identity,params,")


def test_identity_filter_uses_default_grid(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "general_s", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 8


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gammasum", "verify", "--identity", "thm1_closed_form",
                           "--b", "1", "--c", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("PASS")
