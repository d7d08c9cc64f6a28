import csv
import io
import json
from pathlib import Path

import jsonschema
import pytest

from cjl.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, parse_config
from cjl.experiments import strip_timings


def run_json(tmp_path, *args):
    out = tmp_path / "r.json"
    code = main([*args, "--out", str(out)])
    return code, json.loads(out.read_text())


def test_rank_report(tmp_path):
    code, rep = run_json(tmp_path, "rank", "--degree", "1", "--trials", "3", "--seed", "7")
    assert code == EXIT_OK and rep["ok"]
    assert rep["schema"] == "cjl-report/1"
    g = rep["groups"][0]
    assert g["aggregates"]["passed"] == 3
    assert [r["trial"] for r in g["records"]] == [0, 1, 2]
    assert all(r["verdicts"]["rank"] == 10 for r in g["records"])


def test_seed_determinism(tmp_path):
    _, a = run_json(tmp_path, "bundle", "--degree", "1", "--trials", "2", "--seed", "3")
    _, b = run_json(tmp_path, "bundle", "--degree", "1", "--trials", "2", "--seed", "3")
    _, c = run_json(tmp_path, "bundle", "--degree", "1", "--trials", "2", "--seed", "4")
    assert strip_timings(a["groups"]) == strip_timings(b["groups"])
    assert strip_timings(a["groups"]) != strip_timings(c["groups"])


def test_identity_exits_with_failure(tmp_path):
    code, rep = run_json(tmp_path, "identity", "--degree", "1", "--trials", "3")
    assert code == EXIT_FAIL and not rep["ok"]


def test_csv_output(tmp_path, capsys):
    code = main(["fermat", "--degree", "1", "--trials", "4", "--format", "csv"])
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4 and rows[0]["experiment"] == "fermat"


@pytest.mark.parametrize("argv", [
    [],
    ["nope"],
    ["rank", "--field", "prime"],
    ["tangent", "--field", "prime", "--prime", "100"],
    ["rank", "--degree", "0"],
    ["rank", "--precision", "20"],
])
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_unwritable_output():
    assert main(["fermat", "--degree", "1", "--trials", "1", "--out", "/nonexistent/dir/x.json"]) == EXIT_USAGE


def test_parse_config_fields():
    cfg = parse_config(["tangent", "--field", "prime", "--prime", "101", "--tol-rank", "1e-6"])
    assert (cfg.field, cfg.prime, cfg.tol_rank) == ("prime", 101, 1e-6)


SCHEMA_PATH = Path(__file__).resolve().parents[1] / "docs" / "report-schema.json"


@pytest.mark.parametrize("args", [
    ["rank", "--degree", "1", "--trials", "2"],
    ["sample", "--degree", "1", "--trials", "2"],
    ["bundle", "--degree", "1", "--trials", "1", "--field", "prime"],
])
def test_report_matches_shipped_schema(tmp_path, args):
    _, rep = run_json(tmp_path, *args)
    jsonschema.validate(rep, json.loads(SCHEMA_PATH.read_text()))
