import json

import pytest

from cli import main


def test_validate_builtin(capsys):
    assert main(["validate", "--builtin", "S2", "--format", "json"]) == 0
    payloads = json.loads(capsys.readouterr().out)
    assert [p["kind"] for p in payloads] == ["pd-cdga", "sullivan"]
    assert all(p["valid"] for p in payloads)


def test_validate_model_file(capsys, data_dir):
    assert main(["validate", f"{data_dir}/CP2.pd.json"]) == 0
    assert "CP2 (pd-cdga): valid" in capsys.readouterr().out


def test_validate_reports_violations(capsys, tmp_path):
    path = tmp_path / "circle.json"
    path.write_text(
        json.dumps({"name": "S1", "kind": "sullivan", "generators": [{"name": "t", "degree": 1}]}), encoding="utf-8"
    )
    assert main(["validate", str(path), "--format", "json"]) == 1
    payloads = json.loads(capsys.readouterr().out)
    assert len(payloads) == 1
    assert payloads[0]["violations"][0]["axiom"] == "1-connected"


def test_betti_both_pipelines(capsys):
    assert main(["betti", "--builtin", "S3", "-N", "6", "--pipeline", "both", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [r["hochschild"] for r in rows] == [1, 0, 1, 1, 1, 1, 1]
    assert all(r["match"] for r in rows)


def test_betti_csv(capsys):
    assert main(["betti", "--builtin", "S2", "-N", "3", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,hochschild,sullivan,match"
    assert lines[1] == "0,1,,"


def test_hodge_table(capsys):
    assert main(["hodge", "--builtin", "S3", "-N", "4"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("S3 through degree 4")
    assert "p=2" in out


def test_loop_tables(capsys):
    assert main(["loop", "--builtin", "S2", "-N", "4", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["dimension"] == 2
    assert payload["unit"] == {"L0#0": payload["unit"]["L0#0"]}


def test_check_suite(capsys):
    assert main(["check", "--builtin", "S2", "-N", "3"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "PASS  BV axioms for S2 through degree 3" in out


def test_degree_below_the_dimension_is_a_usage_error(capsys):
    assert main(["loop", "--builtin", "S3", "-N", "1"]) == 2
    assert "error:" in capsys.readouterr().err


def test_pipeline_needs_the_matching_model(capsys, data_dir):
    assert main(["betti", f"{data_dir}/CP2.pd.json", "--pipeline", "sullivan"]) == 2


def test_unknown_builtin_is_a_usage_error(capsys):
    assert main(["betti", "--builtin", "RP2"]) == 2


def test_unreadable_file_is_a_usage_error(capsys, tmp_path):
    assert main(["validate", str(tmp_path / "missing.json")]) == 2


def test_invalid_model_fails_with_one(capsys, tmp_path):
    path = tmp_path / "circle.json"
    path.write_text(
        json.dumps({"name": "S1", "kind": "sullivan", "generators": [{"name": "t", "degree": 1}]}), encoding="utf-8"
    )
    assert main(["hodge", str(path)]) == 1
    assert "1-connected input required" in capsys.readouterr().err


def test_bad_flags_exit_with_two():
    with pytest.raises(SystemExit) as info:
        main(["betti", "--builtin", "S2", "--format", "xml"])
    assert info.value.code == 2


def test_export_builtins(capsys, tmp_path):
    assert main(["export-builtins", str(tmp_path)]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 22
