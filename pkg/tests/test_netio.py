"""Document codec tests. The load-bearing property is idempotence: once a
network has been serialized, parse + serialize must reproduce the text
byte for byte, so revision hashes stay stable across round trips."""

import dataclasses
import json

import pytest

from smatvplan.compliance import check_outputs
from smatvplan.engine import propagate, power_to_level
from smatvplan.errors import DocumentSyntaxError, SchemaError
from smatvplan.model import Scenario, SignalLine
from smatvplan.netio import (
    canonical_bytes,
    export_report,
    network_from_dict,
    network_to_dict,
    parse_network,
    parse_scenario,
    report_to_dict,
    scenario_from_dict,
    scenario_to_dict,
    serialize_network,
)

from tests.helpers import assert_matches_oracle, chain_network, random_network


def roundtrip(net):
    return parse_network(serialize_network(net))


# -- idempotence ------------------------------------------------------------


def test_fixture_round_trip_is_byte_stable(case_study):
    text = serialize_network(case_study)
    again = serialize_network(parse_network(text))
    assert again == text
    assert canonical_bytes(parse_network(text)) == text.encode("utf-8")


def test_generated_documents_round_trip(rng):
    for _ in range(10):
        net = random_network(rng)
        text = serialize_network(net)
        assert serialize_network(parse_network(text)) == text


def test_round_trip_preserves_propagation(case_study):
    before = propagate(case_study)
    after = propagate(roundtrip(case_study))
    assert before.traces.keys() == after.traces.keys()
    for key, trace in before.traces.items():
        assert after.traces[key].levels_dbuv == pytest.approx(
            trace.levels_dbuv, abs=1e-12)


def test_round_trip_survives_oracle(rng):
    net = roundtrip(random_network(rng))
    assert_matches_oracle(net, None)


def test_inline_catalog_emitted_for_custom_parts():
    net = chain_network()
    pad = net.node_map["pad"]
    spec = dataclasses.replace(pad.instance.spec, id="AT520-改")
    nodes = tuple(
        dataclasses.replace(n, instance=dataclasses.replace(n.instance, spec=spec))
        if n.id == "pad" else n
        for n in net.nodes
    )
    custom = dataclasses.replace(net, nodes=nodes)
    doc = network_to_dict(custom)
    assert "inline" in doc["catalog"]
    assert "AT520-改" in [c["id"] for c in doc["catalog"]["inline"]["components"]]
    text = serialize_network(custom)
    assert serialize_network(parse_network(text)) == text


def test_builtin_catalog_referenced_not_copied(case_study):
    doc = network_to_dict(case_study)
    assert doc["catalog"] == {"builtin": True}


# -- document forms ---------------------------------------------------------


def test_grid_accepts_stepped_form(case_study):
    doc = network_to_dict(case_study)
    doc["grid"] = {
        "terrestrial": {"start_mhz": 47.0, "stop_mhz": 855.0, "step_mhz": 8.0},
        "sat_if": {"start_mhz": 950.0, "stop_mhz": 2150.0, "step_mhz": 25.0},
    }
    net = network_from_dict(doc)
    terr = net.grid.for_line(SignalLine.TERR)
    assert terr[0] == 47.0 and terr[-1] == 855.0 and len(terr) == 102
    assert len(net.grid.for_line(SignalLine.VL)) == 49


def test_spectrum_power_dbm_form(case_study):
    doc = network_to_dict(case_study)
    src = next(n for n in doc["nodes"] if n["id"] == "src_terr")
    n_ch = sum(1 for ch in src["channels"] if ch["line"] == "TERR")
    src["lines"]["TERR"] = {"power_dbm": 0.0}
    net = network_from_dict(doc)
    spectrum = net.node_map["src_terr"].spectra[SignalLine.TERR]
    assert spectrum.anchors_mhz_dbuv[0][1] == pytest.approx(
        power_to_level(0.0, n_ch))


def test_spectrum_power_dbm_needs_channels(case_study):
    doc = network_to_dict(case_study)
    src = next(n for n in doc["nodes"] if n["id"] == "src_terr")
    src["lines"]["TERR"] = {"power_dbm": 0.0}
    src.pop("channels")
    with pytest.raises(SchemaError, match="channel"):
        network_from_dict(doc)


def test_spectrum_forms_are_exclusive(case_study):
    doc = network_to_dict(case_study)
    src = next(n for n in doc["nodes"] if n["id"] == "src_terr")
    src["lines"]["TERR"] = {"level_dbuv": 80.0, "power_dbm": 0.0}
    with pytest.raises(SchemaError, match="exactly one"):
        network_from_dict(doc)


# -- diagnostics ------------------------------------------------------------


def test_syntax_error_carries_position():
    with pytest.raises(DocumentSyntaxError) as err:
        parse_network('{\n  "format_version": 1,\n  oops\n}')
    assert err.value.line == 3
    assert err.value.column == 3
    assert "line 3" in str(err.value)


def test_root_must_be_object():
    with pytest.raises(SchemaError, match=r"\$"):
        parse_network("[1, 2, 3]")


def test_unknown_format_version(case_study):
    doc = network_to_dict(case_study)
    doc["format_version"] = 99
    with pytest.raises(SchemaError) as err:
        network_from_dict(doc)
    assert err.value.path == "$.format_version"


def test_catalog_choice_is_exclusive(case_study):
    doc = network_to_dict(case_study)
    doc["catalog"] = {"builtin": True, "inline": {"components": {}, "cables": {}}}
    with pytest.raises(SchemaError, match="exactly one"):
        network_from_dict(doc)
    doc["catalog"] = {}
    with pytest.raises(SchemaError):
        network_from_dict(doc)


def test_unknown_key_is_rejected_with_path(case_study):
    doc = network_to_dict(case_study)
    doc["nodes"][0]["banana"] = 1
    with pytest.raises(SchemaError) as err:
        network_from_dict(doc)
    assert "banana" in str(err.value)
    assert "$.nodes[0]" in str(err.value)


def test_bad_port_ref(case_study):
    doc = network_to_dict(case_study)
    doc["edges"][0]["from"] = "no-colon-here"
    with pytest.raises(SchemaError, match="node:port"):
        network_from_dict(doc)


def test_cnr_for_unemitted_line(case_study):
    doc = network_to_dict(case_study)
    src = next(n for n in doc["nodes"] if n["id"] == "src_terr")
    src["cnr_db"] = {"VL": 14.0}
    with pytest.raises(SchemaError, match="does not emit"):
        network_from_dict(doc)


# -- scenarios --------------------------------------------------------------


def test_scenario_round_trip():
    scenario = Scenario(
        regulators={"ms1": {"terr": 12, "sat_vl": 1}},
        source_trims_db={"src_terr": {SignalLine.TERR: -2.5}},
    )
    doc = scenario_to_dict(scenario)
    assert doc == {
        "regulators": {"ms1": {"sat_vl": 1, "terr": 12}},
        "source_trims_db": {"src_terr": {"TERR": -2.5}},
    }
    assert scenario_from_dict(doc) == scenario
    assert parse_scenario(json.dumps(doc)) == scenario


def test_empty_scenario_serializes_to_empty_object():
    assert scenario_to_dict(Scenario()) == {}
    assert scenario_from_dict({}) == Scenario()


def test_scenario_rejects_non_integer_index():
    with pytest.raises(SchemaError, match="integer"):
        scenario_from_dict({"regulators": {"ms1": {"terr": 1.5}}})
    with pytest.raises(SchemaError, match="integer"):
        scenario_from_dict({"regulators": {"ms1": {"terr": True}}})


def test_scenario_rejects_unknown_line():
    with pytest.raises(SchemaError, match="signal line"):
        scenario_from_dict({"source_trims_db": {"s": {"FM": 1.0}}})


# -- reports ----------------------------------------------------------------


def test_report_json_matches_dict(case_study):
    report = check_outputs(propagate(case_study))
    doc = report_to_dict(report)
    assert doc["compliant_count"] == 57
    assert doc["total_outputs"] == 60
    assert not doc["compliant"]
    assert len(doc["outputs"]) == 60
    failing = [o for o in doc["outputs"] if not o["compliant"]]
    assert all(o["violations"] for o in failing)
    assert json.loads(export_report(report, "json")) == doc


def test_report_table_format(case_study):
    report = check_outputs(propagate(case_study))
    text = export_report(report)
    assert "57/60 outputs compliant" in text
    assert "network checks: clean" in text
    assert "out_f5a2_sat1" in text
    with pytest.raises(ValueError, match="format"):
        export_report(report, "yaml")
