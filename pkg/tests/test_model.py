"""Model layer: bands, grids, spectra, path resolution, validation."""

from dataclasses import replace

import numpy as np
import pytest

from smatvplan.errors import AmbiguousPath, NotReachable, RegulatorIndexOutOfRange
from smatvplan.model import (
    Band,
    DesignConstraints,
    Edge,
    FrequencyGrid,
    Network,
    OutputKind,
    PortRef,
    Scenario,
    SignalLine,
    SourceSpectrum,
    apply_scenario,
    band_of_frequency,
    line_path,
    reachable_lines,
    validate_network,
)
from smatvplan.engine import propagate

from tests.helpers import chain_network, random_network, random_scenario


def codes(net, severity=None):
    return {d.code for d in validate_network(net)
            if severity is None or d.severity == severity}


# -- bands and grids --------------------------------------------------------


def test_band_ranges():
    assert Band.TERRESTRIAL.range_mhz == (47.0, 862.0)
    assert Band.SAT_IF.range_mhz == (950.0, 2150.0)
    for line in (SignalLine.VL, SignalLine.VH, SignalLine.HL, SignalLine.HH):
        assert line.band is Band.SAT_IF
    assert SignalLine.TERR.band is Band.TERRESTRIAL


def test_band_of_frequency():
    assert band_of_frequency(47.0) is Band.TERRESTRIAL
    assert band_of_frequency(862.0) is Band.TERRESTRIAL
    assert band_of_frequency(900.0) is None
    assert band_of_frequency(950.0) is Band.SAT_IF
    assert band_of_frequency(2150.0) is Band.SAT_IF
    assert band_of_frequency(3000.0) is None


def test_default_grid_covers_bands_without_overshoot():
    grid = FrequencyGrid.default()
    terr = grid.points_mhz[SignalLine.TERR]
    assert terr[0] == 47.0 and terr[-1] == 855.0 and len(terr) == 102
    assert all(b - a == 8.0 for a, b in zip(terr, terr[1:]))
    for line in (SignalLine.VL, SignalLine.VH, SignalLine.HL, SignalLine.HH):
        sat = grid.points_mhz[line]
        assert sat[0] == 950.0 and sat[-1] == 2150.0 and len(sat) == 49


def test_grid_rejects_thin_or_disordered_points():
    with pytest.raises(ValueError):
        FrequencyGrid({SignalLine.TERR: (400.0,)})
    with pytest.raises(ValueError):
        FrequencyGrid({SignalLine.TERR: (400.0, 300.0)})
    with pytest.raises(ValueError):
        FrequencyGrid({SignalLine.TERR: (40.0, 400.0)})  # below band
    with pytest.raises(ValueError):
        FrequencyGrid({SignalLine.VL: (960.0, 2200.0)})  # above band


# -- source spectra ---------------------------------------------------------


def test_flat_spectrum_samples_constant():
    s = SourceSpectrum.flat(73.5, SignalLine.TERR)
    assert list(s.sample([47.0, 400.0, 862.0])) == [73.5, 73.5, 73.5]


def test_tilted_spectrum_interpolates_and_clamps():
    s = SourceSpectrum(((100.0, 60.0), (200.0, 70.0)))
    np.testing.assert_allclose(s.sample([100.0, 150.0, 200.0]), [60.0, 65.0, 70.0])
    # held flat beyond the anchor span
    np.testing.assert_allclose(s.sample([47.0, 800.0]), [60.0, 70.0])


def test_spectrum_anchor_validation():
    with pytest.raises(ValueError):
        SourceSpectrum(())
    with pytest.raises(ValueError):
        SourceSpectrum(((200.0, 60.0), (100.0, 70.0)))
    with pytest.raises(ValueError):
        SourceSpectrum(((0.0, 60.0),))


# -- path resolution --------------------------------------------------------


def test_line_path_hops_on_chain():
    net = chain_network()
    hops = line_path(net, "out_tv", SignalLine.TERR)
    assert [h.node_id for h in hops] == ["src_terr", "pad", "wo", "out_tv"]
    assert hops[0].entry_port is None and hops[0].edge_id == "e_src"
    assert (hops[1].entry_port, hops[1].exit_port, hops[1].edge_id) == (
        "in", "out", "e_drop")
    assert (hops[2].entry_port, hops[2].exit_port, hops[2].edge_id) == (
        "in", "tv", "e_out")
    assert hops[3] == type(hops[3])("out_tv", "in", None, None)


def test_line_path_not_reachable_for_absent_line():
    net = chain_network()
    with pytest.raises(NotReachable):
        line_path(net, "out_tv", SignalLine.VL)
    with pytest.raises(NotReachable):
        line_path(net, "nope", SignalLine.TERR)


def test_reachable_lines_on_chain():
    assert reachable_lines(chain_network(), "out_tv") == frozenset({SignalLine.TERR})


def test_line_merge_makes_path_ambiguous():
    net = chain_network()
    extra = Edge("e_dup", PortRef("pad", "out"), PortRef("wo", "in"),
                 net.edges[0].cable, 1.0, frozenset({SignalLine.TERR}))
    merged = replace(net, edges=net.edges + (extra,))
    assert "line-merge" in codes(merged, "error")
    with pytest.raises(AmbiguousPath):
        line_path(merged, "out_tv", SignalLine.TERR)


# -- validation -------------------------------------------------------------


def test_fixture_and_random_networks_validate_cleanly(case_study, rng):
    assert not [d for d in validate_network(case_study) if d.severity == "error"]
    for _ in range(5):
        net = random_network(rng)
        assert not [d for d in validate_network(net) if d.severity == "error"]


def test_duplicate_node_id():
    net = chain_network()
    broken = replace(net, nodes=net.nodes + (net.nodes[-1],))
    assert "duplicate-id" in codes(broken, "error")


def test_duplicate_edge_id_and_collision():
    net = chain_network()
    dup = replace(net, edges=net.edges + (net.edges[0],))
    assert "duplicate-id" in codes(dup, "error")
    collide = replace(net, edges=(replace(net.edges[0], id="pad"),) + net.edges[1:])
    assert "duplicate-id" in codes(collide, "error")


def test_dangling_references():
    net = chain_network()
    e = net.edges[0]
    bad_node = replace(net, edges=(replace(e, dst=PortRef("ghost", "in")),) + net.edges[1:])
    assert "dangling-node" in codes(bad_node, "error")
    bad_port = replace(net, edges=(replace(e, dst=PortRef("pad", "sideways")),) + net.edges[1:])
    assert "dangling-port" in codes(bad_port, "error")


def test_port_direction_enforced():
    net = chain_network()
    e = net.edges[1]  # pad:out -> wo:in
    flipped = replace(e, src=PortRef("wo", "in"), dst=PortRef("pad", "out"))
    broken = replace(net, edges=(net.edges[0], flipped, net.edges[2]))
    assert "port-direction" in codes(broken, "error")


def test_line_support_checked_against_ports():
    net = chain_network()
    e = net.edges[2]  # wo:tv carries TERR only
    widened = replace(e, lines=frozenset({SignalLine.TERR, SignalLine.VL}))
    broken = replace(net, edges=net.edges[:2] + (widened,))
    assert "line-support" in codes(broken, "error")


def test_empty_lines_and_negative_length():
    net = chain_network()
    e = net.edges[1]
    assert "empty-lines" in codes(
        replace(net, edges=(net.edges[0], replace(e, lines=frozenset()), net.edges[2])),
        "error")
    assert "negative-length" in codes(
        replace(net, edges=(net.edges[0], replace(e, length_m=-1.0), net.edges[2])),
        "error")


def test_source_and_output_degree_rules():
    net = chain_network()
    cable = net.edges[0].cable
    into_src = Edge("e_bad", PortRef("wo", "sat"), PortRef("src_terr", "out"),
                    cable, 1.0, frozenset({SignalLine.TERR}))
    assert "source-inbound" in codes(replace(net, edges=net.edges + (into_src,)), "error")
    out_of_output = Edge("e_bad", PortRef("out_tv", "in"), PortRef("wo", "in"),
                         cable, 1.0, frozenset({SignalLine.TERR}))
    got = codes(replace(net, edges=net.edges + (out_of_output,)), "error")
    assert "output-outbound" in got
    unfed = replace(net, edges=net.edges[:2])
    assert "output-feed" in codes(unfed, "error")


def test_cycle_detection():
    net = chain_network()
    cable = net.edges[0].cable
    back = Edge("e_loop", PortRef("wo", "sat"), PortRef("pad", "in"),
                cable, 1.0, frozenset({SignalLine.VL}))
    looped = replace(net, edges=net.edges + (back,))
    # VL flows wo -> pad -> wo: a directed cycle on that line's graph
    assert "cycle" in codes(looped, "error") or "line-merge" in codes(looped, "error")


def test_constraint_sanity_checks():
    net = chain_network()
    bad_window = DesignConstraints(
        level_windows_dbuv={Band.TERRESTRIAL: (80.0, 57.0), Band.SAT_IF: (47.0, 77.0)},
        min_cnr_db={Band.TERRESTRIAL: 30.0, Band.SAT_IF: 11.0},
    )
    assert "level-window" in codes(replace(net, constraints=bad_window), "error")
    bad_iso = DesignConstraints(
        level_windows_dbuv=DesignConstraints.default().level_windows_dbuv,
        min_cnr_db={Band.TERRESTRIAL: 30.0, Band.SAT_IF: 11.0},
        min_tap_isolation_db=-5.0,
    )
    assert "isolation-limit" in codes(replace(net, constraints=bad_iso), "error")


def test_long_drop_warns_but_does_not_fail():
    net = chain_network()
    # stretch the edge feeding the output connector past the guideline
    stretched = replace(net, edges=net.edges[:2] + (
        replace(net.edges[2], length_m=95.0),))
    assert "drop-length" in codes(stretched, "warning")
    assert not [d for d in validate_network(stretched) if d.severity == "error"]
    assert "drop-length" not in codes(net, "warning")


def test_missing_required_line_warns():
    net = chain_network()
    out = next(n for n in net.nodes if n.id == "out_tv")
    sat_kind = replace(net, nodes=tuple(
        replace(n, kind=OutputKind.SAT_RECEIVER) if n.id == "out_tv" else n
        for n in net.nodes
    ))
    assert out.kind is OutputKind.TV
    assert "missing-line" in codes(sat_kind, "warning")


# -- scenarios --------------------------------------------------------------


def test_scenario_defaults_and_merge():
    a = Scenario({"ms1": {"terr": 3}}, {"src_terr": {SignalLine.TERR: -2.0}})
    b = Scenario({"ms1": {"terr": 7}, "ms2": {"terr": 1}})
    merged = a.merged(b)
    assert merged.regulator_index("ms1", "terr") == 7
    assert merged.regulator_index("ms2", "terr") == 1
    assert merged.regulator_index("ms3", "terr") is None
    assert merged.trim_db("src_terr", SignalLine.TERR) == -2.0
    assert merged.trim_db("src_terr", SignalLine.VL) == 0.0
    assert Scenario.empty().regulator_index("x", "y") is None


def test_apply_scenario_equivalent_to_layering(rng):
    for _ in range(4):
        net = random_network(rng)
        scenario = random_scenario(rng, net)
        baked = apply_scenario(net, scenario)
        layered = propagate(net, scenario)
        direct = propagate(baked)
        assert set(layered.traces) == set(direct.traces)
        for key, trace in layered.traces.items():
            np.testing.assert_allclose(
                direct.traces[key].levels_dbuv, trace.levels_dbuv, atol=1e-12)
            if trace.cnr_db is None:
                assert direct.traces[key].cnr_db is None
            else:
                np.testing.assert_allclose(
                    direct.traces[key].cnr_db, trace.cnr_db, atol=1e-12)


def test_apply_scenario_validates_entries():
    net = chain_network()
    with pytest.raises(RegulatorIndexOutOfRange):
        apply_scenario(net, Scenario({"pad": {"nope": 0}}))
    with pytest.raises(RegulatorIndexOutOfRange):
        apply_scenario(net, Scenario({"pad": {"pad": 99}}))
    assert apply_scenario(net, None) is net
