"""Command-line behavior, exercised in process through main(argv)."""

import dataclasses
import json

import pytest

from smatvplan.cli import main
from smatvplan.compliance import full_report
from smatvplan.netio import (
    network_to_dict,
    parse_network,
    report_to_dict,
    serialize_network,
)

from tests.helpers import chain_network


@pytest.fixture()
def fixture_file(tmp_path):
    path = tmp_path / "net.json"
    assert main(["fixture", "-o", str(path)]) == 0
    return str(path)


# -- simulate ---------------------------------------------------------------


def test_simulate_reports_counts_and_levels(fixture_file, capsys):
    code = main(["simulate", fixture_file])
    out = capsys.readouterr().out
    assert code == 1  # three outlets fail, so the run is honest about it
    assert "57/60 outputs compliant" in out
    assert "levels per output" in out
    assert "out_f5a2_sat1" in out


def test_simulate_machine_format_matches_api(fixture_file, capsys, case_study):
    code = main(["simulate", fixture_file, "--format", "machine"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 1
    assert doc == report_to_dict(full_report(case_study))


def test_simulate_writes_out_file(fixture_file, tmp_path, capsys):
    target = tmp_path / "report.json"
    main(["simulate", fixture_file, "--format", "machine", "--out", str(target)])
    capsys.readouterr()
    assert json.loads(target.read_text())["compliant_count"] == 57


def test_simulate_trace_prints_hops(fixture_file, capsys):
    main(["simulate", fixture_file, "--trace", "out_f1a1_tv"])
    out = capsys.readouterr().out
    assert "trace out_f1a1_tv / TERR" in out
    assert "source" in out and "cable" in out


def test_simulate_scenario_changes_the_verdict(fixture_file, tmp_path, capsys):
    scenario = tmp_path / "scenario.json"
    scenario.write_text(json.dumps(
        {"source_trims_db": {"src_terr": {"TERR": 20.0}}}))
    main(["simulate", fixture_file, "--scenario", str(scenario),
          "--format", "machine"])
    doc = json.loads(capsys.readouterr().out)
    assert doc["compliant_count"] == 0  # every outlet carries the TERR bundle


def test_simulate_missing_file_is_an_error(capsys):
    code = main(["simulate", "/does/not/exist.json"])
    err = capsys.readouterr().err
    assert code == 2
    assert "error:" in err


def test_simulate_rejects_broken_document(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format_version": 1')
    code = main(["simulate", str(bad)])
    err = capsys.readouterr().err
    assert code == 2
    assert "line 1" in err


# -- validate ---------------------------------------------------------------


def test_validate_clean_network(fixture_file, capsys):
    code = main(["validate", fixture_file])
    out = capsys.readouterr().out
    assert code == 0
    assert "0 error(s)" in out


def test_validate_reports_errors(tmp_path, capsys):
    doc = network_to_dict(chain_network())
    doc["nodes"] = [n for n in doc["nodes"] if n["id"] != "pad"]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc))
    code = main(["validate", str(path)])
    out = capsys.readouterr().out
    assert code == 2
    assert "pad" in out
    assert "0 error(s)" not in out


# -- sweep ------------------------------------------------------------------


def test_sweep_table_has_one_row_per_level(fixture_file, capsys):
    code = main(["sweep", fixture_file, "--levels", "50:90:10"])
    out = capsys.readouterr().out
    assert code == 0
    rows = [l for l in out.splitlines() if l.strip().startswith(("5", "6", "7", "8", "9"))]
    assert len(rows) == 5
    assert "optimum:" in out


def test_sweep_machine_counts(fixture_file, capsys):
    main(["sweep", fixture_file, "--levels", "50:90:10", "--format", "machine"])
    doc = json.loads(capsys.readouterr().out)
    assert [p["compliant_count"] for p in doc["points"]] == [0, 0, 24, 57, 4]
    assert doc["optimum_interval"] == [79.0, 83.0]
    assert doc["best_level"] == 79.0


def test_sweep_single_level(fixture_file, capsys):
    main(["sweep", fixture_file, "--levels", "80", "--format", "machine"])
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["points"]) == 1
    assert doc["points"][0]["level_dbuv"] == 80.0


def test_sweep_rejects_zero_step(fixture_file, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", fixture_file, "--levels", "50:90:0"])
    capsys.readouterr()
    assert exc.value.code == 2


def test_sweep_rejects_unknown_line(fixture_file, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", fixture_file, "--line", "FM"])
    capsys.readouterr()
    assert exc.value.code == 2


# -- optimize ---------------------------------------------------------------


def test_optimize_is_deterministic(fixture_file, capsys):
    argv = ["optimize", fixture_file, "--budget", "300", "--seed", "0",
            "--format", "machine"]
    code_a = main(argv)
    first = capsys.readouterr().out
    code_b = main(argv)
    second = capsys.readouterr().out
    assert first == second
    assert code_a == code_b == 1
    doc = json.loads(first)
    assert doc["objective"][0] == 57
    assert doc["objective"][1] == pytest.approx(793.6326549545581)
    assert doc["improved"] is True


def test_optimize_apply_bakes_settings(fixture_file, tmp_path, capsys):
    baked = tmp_path / "baked.json"
    main(["optimize", fixture_file, "--budget", "300", "--seed", "0",
          "--format", "machine", "--apply", str(baked)])
    doc = json.loads(capsys.readouterr().out)
    code = main(["simulate", str(baked), "--format", "machine"])
    report = json.loads(capsys.readouterr().out)
    assert code == 1
    assert report["compliant_count"] == doc["report"]["compliant_count"]
    net = parse_network(baked.read_text())
    ms = net.node_map["ms1"]
    expected = doc["scenario"]["regulators"].get("ms1", {})
    for group, index in expected.items():
        assert ms.instance.regulator_indices[group] == index


def test_optimize_save_scenario(fixture_file, tmp_path, capsys):
    out = tmp_path / "best.json"
    main(["optimize", fixture_file, "--budget", "120", "--seed", "1",
          "--save-scenario", str(out)])
    capsys.readouterr()
    doc = json.loads(out.read_text())
    assert "regulators" in doc


def test_optimize_without_regulators_errors(tmp_path, capsys):
    net = chain_network()
    bare = dataclasses.replace(
        net,
        nodes=tuple(
            dataclasses.replace(
                n, instance=dataclasses.replace(n.instance, regulator_indices={}),
            ) if n.id == "pad" else n
            for n in net.nodes
        ),
    )
    doc = network_to_dict(bare)
    # strip the pad: source -> drop -> outlet, nothing adjustable remains
    doc["nodes"] = [n for n in doc["nodes"] if n["id"] != "pad"]
    doc["edges"] = [e for e in doc["edges"] if e["id"] != "e_drop"]
    for e in doc["edges"]:
        if e["id"] == "e_src":
            e["to"] = "wo:in"
            e["length_m"] = 20.0
    path = tmp_path / "fixed.json"
    path.write_text(json.dumps(doc))
    assert main(["validate", str(path)]) == 0
    code = main(["optimize", str(path)])
    err = capsys.readouterr().err
    assert code == 2
    assert "regulator" in err


# -- misc -------------------------------------------------------------------


def test_fixture_round_trips_through_stdout(capsys, case_study):
    assert main(["fixture"]) == 0
    out = capsys.readouterr().out
    assert out == serialize_network(case_study)
    assert serialize_network(parse_network(out)) == out


def test_version_names_the_kernel(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    out = capsys.readouterr().out
    assert exc.value.code == 0
    assert "kernel:" in out


def test_serve_needs_a_directory(tmp_path, capsys):
    code = main(["serve", "--network-dir", str(tmp_path / "missing")])
    err = capsys.readouterr().err
    assert code == 2
    assert "not a directory" in err
