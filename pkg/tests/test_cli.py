import csv
import json
from importlib import resources

import jsonschema
import pytest

from vertexlab.cli import SuiteConfig, emit_tables, main, render, run
from vertexlab.errors import UsageError
from vertexlab.sos_weights import SosLatticeSpec
from vertexlab.vertex_lattice import VertexLatticeSpec


def schema(name):
    return json.loads(resources.files("vertexlab").joinpath("schema", name).read_text())


@pytest.fixture(scope="module")
def identities_report():
    return run(SuiteConfig("vertex-identities", seed=7))


def test_vertex_identities_pass(identities_report):
    rows = identities_report["rows"]
    assert all(r["pass"] for r in rows)
    for family in ("ybe/", "unitarity/", "crossing/"):
        assert sum(r["id"].startswith(family) for r in rows) == 100
    assert [r["id"] for r in rows] == sorted(r["id"] for r in rows)
    jsonschema.validate(identities_report, schema("report.json"))


def test_reports_are_byte_identical(identities_report):
    again = run(SuiteConfig("vertex-identities", seed=7))
    assert render(again, "json") == render(identities_report, "json")
    assert render(again, "csv") == render(identities_report, "csv")
    other = run(SuiteConfig("vertex-identities", seed=8))
    assert render(other, "json") != render(identities_report, "json")


def test_csos_spectrum_selected_pair():
    report = run(SuiteConfig("csos-spectrum", seed=1, pp=(4, 3)))
    values = {r["id"]: r.get("value") for r in report["rows"]}
    assert values["selected/h13/04-03"] == "1/2"
    assert values["selected/central-charge/04-03"] == "1/2"
    assert report["summary"]["failed"] == 0


def test_unknown_suite_is_a_usage_error(capsys):
    with pytest.raises(UsageError):
        SuiteConfig("nonsense")
    assert main(["--suite", "nonsense"]) == 2
    assert main(["--suite", "csos-spectrum", "--pp", "4,2"]) == 2
    assert main(["--suite", "vertex-conservation", "--size", "5x5"]) == 2
    assert main(["--suite", "rsos-probe", "--eta", "oops"]) == 2
    assert "unknown suite" in capsys.readouterr().err


def test_main_writes_report_and_exit_code(tmp_path):
    out = tmp_path / "r.json"
    assert main(["--suite", "rsos-probe", "--pp", "3,2", "--seed", "3", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["seed"] == 3 and report["summary"]["count"] == 1
    jsonschema.validate(report, schema("report.json"))


def test_failures_give_exit_one(tmp_path):
    # an impossible tolerance turns every non-exact check into a failure, and the report is still written
    out = tmp_path / "r.csv"
    assert main(["--suite", "vertex-identities", "--tol", "1e-300", "--format", "csv", "--out", str(out)]) == 1
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert rows and any(r["pass"] == "false" for r in rows)


def test_budget_truncation_is_reported():
    report = run(SuiteConfig("sos-identities", seed=1, budget=1e-9))
    s = report["summary"]
    assert s["truncated"] and s["skipped"] > 0 and s["count"] + s["skipped"] > 0


def test_config_file_overrides_flags(tmp_path):
    cfg = tmp_path / "c.json"
    out = tmp_path / "r.json"
    cfg.write_text(json.dumps({"seed": 11, "pp": [5, 4], "out": str(out)}))
    assert main(["--suite", "csos-spectrum", "--seed", "2", "--config", str(cfg)]) == 0
    report = json.loads(out.read_text())
    assert report["seed"] == 11 and report["config"]["pp"] == [5, 4]
    cfg.write_text(json.dumps({"colour": "red"}))
    assert main(["--suite", "csos-spectrum", "--config", str(cfg)]) == 2


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("VERTEXLAB_SEED", "1234")
    assert SuiteConfig("equivalence").seed == 1234


def test_spectrum_table_emission(tmp_path):
    path = emit_tables("spectrum", {"p": 5, "pprime": 4}, tmp_path / "s.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 26 and lines[0].startswith("p,pprime")
    first = path.read_bytes()
    emit_tables("spectrum", {"p": 5, "pprime": 4}, path)
    assert path.read_bytes() == first
    data = json.loads(emit_tables("spectrum", {"p": 4, "pprime": 3}, tmp_path / "s.json").read_text())
    assert data["kind"] == "spectrum" and len(data["rows"]) == 25


def test_weight_table_emission(tmp_path):
    assert main(["--table", "weights", "--out", str(tmp_path / "w.csv")]) == 0
    rows = list(csv.DictReader((tmp_path / "w.csv").read_text().splitlines()))
    assert len(rows) == 7 * 6  # six admissible faces per NW height
    assert {int(r["a"]) for r in rows} == set(range(-3, 4))
    with pytest.raises(UsageError):
        emit_tables("colours", {}, tmp_path / "x.csv")


def test_lattice_schema_accepts_both_models():
    s = schema("lattice.json")
    v = VertexLatticeSpec(2, 1, [0.1, 0.2], [0.3], {"top": [1, 0], "bottom": [0, -1], "left": [0], "right": [1]})
    jsonschema.validate(v.to_json(), s)
    jsonschema.validate(SosLatticeSpec(1, 1, [0.1], [0.2], [0, 1, None, 1]).to_json(), s)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"n_cols": 1}, s)
