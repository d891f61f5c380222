"""Shared builders and reference implementations for the test suite.

The oracle here recomputes levels and C/N by walking each output's path
and summing contributions hop by hop with plain numpy, independently of
the engine's compiled row/knob decomposition. Keeping the two routes
separate is the point: a bug in the kernel bookkeeping cannot cancel
out of both sides.
"""

from __future__ import annotations

import itertools

import numpy as np

from smatvplan.catalog import builtin_catalog, cable_attenuation, instantiate
from smatvplan.compliance import check_outputs
from smatvplan.engine import combine_cnr, propagate
from smatvplan.model import (
    Band,
    Channel,
    ChannelPlan,
    ComponentNode,
    DesignConstraints,
    Edge,
    FrequencyGrid,
    Network,
    OutputKind,
    OutputNode,
    PortRef,
    Scenario,
    SignalLine,
    SourceNode,
    SourceSpectrum,
    line_path,
    validate_network,
)

SAT_LINES = (SignalLine.VL, SignalLine.VH, SignalLine.HL, SignalLine.HH)
ALL_LINES = frozenset(SignalLine)


def terr_plan(n_channels: int, n_sat: int = 0) -> ChannelPlan:
    """Evenly spaced channel plan; SAT transponders repeat per line."""
    channels = [
        Channel(471.25 + 8.0 * i, 8.0, SignalLine.TERR) for i in range(n_channels)
    ]
    for line in SAT_LINES:
        channels.extend(
            Channel(970.0 + 40.0 * i, 36.0, line) for i in range(n_sat)
        )
    return ChannelPlan(tuple(channels))


def sat_plan(line: SignalLine, n: int) -> ChannelPlan:
    return ChannelPlan(tuple(Channel(970.0 + 40.0 * i, 36.0, line) for i in range(n)))


def terr_source(level_dbuv: float = 80.0, cnr_db: float | None = 65.0,
                n_channels: int = 40, node_id: str = "src_terr") -> SourceNode:
    spectrum = SourceSpectrum.flat(level_dbuv, SignalLine.TERR)
    return SourceNode(
        node_id,
        {SignalLine.TERR: spectrum},
        terr_plan(n_channels),
        {} if cnr_db is None else {SignalLine.TERR: cnr_db},
    )


def sat_source(line: SignalLine, level_dbuv: float = 67.5,
               cnr_db: float | None = 14.0, n_transponders: int = 30,
               node_id: str | None = None) -> SourceNode:
    spectrum = SourceSpectrum.flat(level_dbuv, line)
    return SourceNode(
        node_id or f"src_{line.value.lower()}",
        {line: spectrum},
        sat_plan(line, n_transponders),
        {} if cnr_db is None else {line: cnr_db},
    )


def chain_network(*, terr_level=80.0, terr_cnr=65.0, drop_m=20.0,
                  constraints=None, grid=None) -> Network:
    """Smallest interesting network: TERR source, attenuator, outlet, one output.

    With the attenuator pad at 0 dB the TV output sits at
    terr_level - cable(drop) - 1.5 dB, handy for hand checks.
    """
    cat = builtin_catalog()
    cable = cat.cable("CX-D6")
    nodes = (
        terr_source(terr_level, terr_cnr),
        ComponentNode("pad", instantiate(cat, "AT520")),
        ComponentNode("wo", instantiate(cat, "WO511")),
        OutputNode("out_tv", OutputKind.TV),
    )
    edges = (
        Edge("e_src", PortRef("src_terr", "out"), PortRef("pad", "in"),
             cable, 0.0, frozenset({SignalLine.TERR})),
        Edge("e_drop", PortRef("pad", "out"), PortRef("wo", "in"),
             cable, drop_m, frozenset({SignalLine.TERR})),
        Edge("e_out", PortRef("wo", "tv"), PortRef("out_tv", "in"),
             cable, 0.0, frozenset({SignalLine.TERR})),
    )
    net = Network(nodes, edges, grid or FrequencyGrid.default(),
                  constraints or DesignConstraints.default())
    assert not [d for d in validate_network(net) if d.severity == "error"]
    return net


def overload_rig(level_dbuv: float, n_transponders: int,
                 derating: bool = True) -> Network:
    """SAT source into the 0 dBm-rated IF amplifier; its +10 dB makes the
    output port sit at level_dbuv + 10."""
    cat = builtin_catalog()
    cable = cat.cable("CX-T11")
    constraints = DesignConstraints(
        level_windows_dbuv=DesignConstraints.default().level_windows_dbuv,
        min_cnr_db={Band.TERRESTRIAL: 30.0, Band.SAT_IF: 11.0},
        enforce_power_derating=derating,
    )
    vl = frozenset({SignalLine.VL})
    nodes = (
        sat_source(SignalLine.VL, level_dbuv, 20.0, n_transponders),
        ComponentNode("amp", instantiate(cat, "GH516")),
        ComponentNode("wo", instantiate(cat, "WO512")),
        OutputNode("out_sat", OutputKind.SAT_RECEIVER),
    )
    edges = (
        Edge("e1", PortRef("src_vl", "out"), PortRef("amp", "in"), cable, 0.0, vl),
        Edge("e2", PortRef("amp", "out"), PortRef("wo", "in"), cable, 0.0, vl),
        Edge("e3", PortRef("wo", "sat"), PortRef("out_sat", "in"), cable, 0.0, vl),
    )
    net = Network(nodes, edges, FrequencyGrid.default(), constraints)
    assert not [d for d in validate_network(net) if d.severity == "error"]
    return net


def random_network(rng: np.random.Generator, *, max_floors: int = 3,
                   coarse: bool = True) -> Network:
    """A random valid tree: headend, riser of multiswitches, outlets.

    Shapes mirror real installs (cascaded MV508s below a terminal
    switch, drops of uneven length, occasional taps and a headend
    amplifier) while staying small enough that tests run in seconds.
    """
    cat = builtin_catalog()
    trunk, drop = cat.cable("CX-T11"), cat.cable("CX-D6")
    grid = FrequencyGrid.from_steps(16.0, 50.0) if coarse else FrequencyGrid.default()
    constraints = DesignConstraints(
        level_windows_dbuv=DesignConstraints.default().level_windows_dbuv,
        min_cnr_db={Band.TERRESTRIAL: float(rng.uniform(25.0, 40.0)),
                    Band.SAT_IF: 11.0},
    )
    nodes: list = []
    edges: list[Edge] = []

    def wire(eid, src_node, src_port, dst_node, dst_port, cable, length, lines):
        edges.append(Edge(eid, PortRef(src_node, src_port), PortRef(dst_node, dst_port),
                          cable, float(length), frozenset(lines)))

    nodes.append(terr_source(float(rng.uniform(66.0, 88.0)),
                             float(rng.uniform(50.0, 70.0)),
                             int(rng.integers(8, 41))))
    sat_level = float(rng.uniform(60.0, 76.0))
    for line in SAT_LINES:
        nodes.append(sat_source(line, sat_level + float(rng.uniform(-2.0, 2.0)),
                                float(rng.uniform(12.0, 18.0)),
                                int(rng.integers(4, 31))))

    sat_feed = [(f"src_{l.value.lower()}", "out", {l}) for l in SAT_LINES]
    terr_feed = ("src_terr", "out", {SignalLine.TERR})
    if rng.random() < 0.3:
        nodes.append(ComponentNode("head_amp", instantiate(cat, "GH516")))
        for src_id, port, lines in sat_feed:
            wire(f"e_ha_{src_id}", src_id, port, "head_amp", "in",
                 trunk, rng.uniform(1, 6), lines)
        sat_feed = [("head_amp", "out", set(SAT_LINES))]
    if rng.random() < 0.3:
        idx = int(rng.integers(0, 21))
        nodes.append(ComponentNode("terr_pad", instantiate(cat, "AT520", {"pad": idx})))
        wire("e_tp", *terr_feed[:2], "terr_pad", "in", trunk, rng.uniform(1, 6),
             terr_feed[2])
        terr_feed = ("terr_pad", "out", {SignalLine.TERR})

    floors = int(rng.integers(1, max_floors + 1))
    switches = []
    for f in range(1, floors + 1):
        terminal = f == floors
        kind = "MV508T" if terminal else "MV508"
        if terminal and floors == 1 and rng.random() < 0.4:
            kind = "MR512"
        regs = {"terr": int(rng.integers(0, 16))}
        if kind != "MR512":
            regs.update({f"sat_{l.value.lower()}": int(rng.integers(0, 4))
                         for l in SAT_LINES})
        switches.append((f"ms{f}", kind))
        nodes.append(ComponentNode(f"ms{f}", instantiate(cat, kind, regs)))

    for f, (ms_id, kind) in enumerate(switches, start=1):
        if f == 1:
            for src_id, port, lines in sat_feed:
                wire(f"e_sat_in_{src_id}", src_id, port, ms_id, "sat_in",
                     trunk, rng.uniform(2, 12), lines)
            wire("e_terr_in", *terr_feed[:2], ms_id, "terr_in",
                 trunk, rng.uniform(2, 12), terr_feed[2])
        else:
            prev = switches[f - 2][0]
            riser = rng.uniform(3, 10)
            wire(f"e_sat_r{f}", prev, "sat_out", ms_id, "sat_in",
                 trunk, riser, set(SAT_LINES))
            wire(f"e_terr_r{f}", prev, "terr_out", ms_id, "terr_in",
                 trunk, riser, {SignalLine.TERR})

    n_outputs = 0
    for f, (ms_id, kind) in enumerate(switches, start=1):
        n_subs = 16 if kind == "MR512" else 8
        apartments = int(rng.integers(1, 4))
        for a in range(1, apartments + 1):
            sub = f"sub{(a - 1) * 2 + 1}"
            assert (a - 1) * 2 + 1 <= n_subs
            tag = f"f{f}a{a}"
            drop_len = rng.uniform(4.0, 45.0)
            if rng.random() < 0.25:
                tap_id = f"tap_{tag}"
                nodes.append(ComponentNode(tap_id, instantiate(
                    cat, str(rng.choice(["SD504", "SD508", "SD512", "SD515"])))))
                wire(f"e_trunk_{tag}", ms_id, sub, tap_id, "in",
                     drop, drop_len * 0.5, ALL_LINES)
                feed = (tap_id, "tap")
            else:
                feed = (ms_id, sub)
            outlet_kind = str(rng.choice(["WO511", "WO512"]))
            wo_id = f"wo_{tag}"
            nodes.append(ComponentNode(wo_id, instantiate(cat, outlet_kind)))
            wire(f"e_drop_{tag}", feed[0], feed[1], wo_id, "in",
                 drop, drop_len, ALL_LINES)
            nodes.append(OutputNode(f"out_{tag}_sat", OutputKind.SAT_RECEIVER,
                                    floor=f, apartment=str(a)))
            wire(f"e_osat_{tag}", wo_id, "sat", f"out_{tag}_sat", "in",
                 drop, 0.0, ALL_LINES)
            n_outputs += 1
            if outlet_kind == "WO511":
                nodes.append(OutputNode(f"out_{tag}_tv", OutputKind.TV,
                                        floor=f, apartment=str(a)))
                wire(f"e_otv_{tag}", wo_id, "tv", f"out_{tag}_tv", "in",
                     drop, 0.0, {SignalLine.TERR})
                n_outputs += 1
    assert n_outputs <= 60

    net = Network(tuple(nodes), tuple(edges), grid, constraints)
    bad = [d for d in validate_network(net) if d.severity == "error"]
    assert not bad, bad
    return net


def random_scenario(rng: np.random.Generator, net: Network) -> Scenario:
    """Random regulator overrides for some components plus source trims."""
    regulators: dict[str, dict[str, int]] = {}
    trims: dict[str, dict[SignalLine, float]] = {}
    for node in net.nodes:
        if isinstance(node, ComponentNode) and node.instance.spec.regulators:
            if rng.random() < 0.6:
                regulators[node.id] = {
                    group: int(rng.integers(0, len(reg.positions_db)))
                    for group, reg in node.instance.spec.regulators.items()
                    if rng.random() < 0.8
                }
        elif isinstance(node, SourceNode) and rng.random() < 0.4:
            trims[node.id] = {
                line: float(rng.uniform(-6.0, 6.0)) for line in node.lines
            }
    return Scenario(regulators, trims)


def small_knob_network(rng: np.random.Generator) -> Network:
    """Terrestrial-only chain whose full regulator space stays tiny.

    Drop lengths and the source level are randomized so the best
    reachable compliant count genuinely varies between instances; the
    C/N floor is drawn high enough to bite when pads are backed off.
    """
    cat = builtin_catalog()
    trunk, drop = cat.cable("CX-T11"), cat.cable("CX-D6")
    grid = FrequencyGrid.from_steps(80.0, 400.0)
    constraints = DesignConstraints(
        level_windows_dbuv=DesignConstraints.default().level_windows_dbuv,
        min_cnr_db={Band.TERRESTRIAL: float(rng.uniform(33.0, 50.0)),
                    Band.SAT_IF: 11.0},
    )
    level = float(rng.uniform(65.0, 100.0))
    cnr = float(rng.uniform(38.0, 58.0))
    nodes: list = [terr_source(level, cnr, int(rng.integers(8, 31)))]
    edges: list[Edge] = []
    terr = frozenset({SignalLine.TERR})

    def wire(eid, src, sp, dst, dp, cable, length):
        edges.append(Edge(eid, PortRef(src, sp), PortRef(dst, dp),
                          cable, float(length), terr))

    def outlet(tag: str, feed: tuple[str, str], drop_m: float):
        nodes.append(ComponentNode(f"wo_{tag}", instantiate(cat, "WO511")))
        wire(f"e_drop_{tag}", feed[0], feed[1], f"wo_{tag}", "in", drop, drop_m)
        nodes.append(OutputNode(f"out_{tag}", OutputKind.TV))
        wire(f"e_out_{tag}", f"wo_{tag}", "tv", f"out_{tag}", "in", drop, 0.0)

    if rng.random() < 0.5:
        # two pads in series feeding a splitter: space 21 * 21
        nodes.append(ComponentNode(
            "at1", instantiate(cat, "AT520", {"pad": int(rng.integers(0, 21))})))
        nodes.append(ComponentNode(
            "at2", instantiate(cat, "AT520", {"pad": int(rng.integers(0, 21))})))
        nodes.append(ComponentNode("sp", instantiate(cat, "SD520")))
        wire("e_src", "src_terr", "out", "at1", "in", trunk, rng.uniform(0, 6))
        wire("e_a12", "at1", "out", "at2", "in", trunk, 0.0)
        wire("e_sp", "at2", "out", "sp", "in", trunk, rng.uniform(0, 4))
        outlet("a", ("sp", "out1"), rng.uniform(1.0, 90.0))
        outlet("b", ("sp", "out2"), rng.uniform(1.0, 90.0))
    else:
        # pad into a radial switch: space 21 * 16
        nodes.append(ComponentNode(
            "at1", instantiate(cat, "AT520", {"pad": int(rng.integers(0, 21))})))
        nodes.append(ComponentNode(
            "ms", instantiate(cat, "MR512", {"terr": int(rng.integers(0, 16))})))
        wire("e_src", "src_terr", "out", "at1", "in", trunk, rng.uniform(0, 6))
        wire("e_ms", "at1", "out", "ms", "terr_in", trunk, rng.uniform(0, 8))
        for i, tag in enumerate(("a", "b", "c")):
            outlet(tag, ("ms", f"sub{2 * i + 1}"), rng.uniform(1.0, 90.0))

    net = Network(tuple(nodes), tuple(edges), grid, constraints)
    bad = [d for d in validate_network(net) if d.severity == "error"]
    assert not bad, bad
    return net


# ---------------------------------------------------------------------------
# Independent path-sum oracle
# ---------------------------------------------------------------------------


def oracle_trace(net: Network, output_id: str, line: SignalLine,
                 scenario: Scenario | None = None):
    """Levels and per-frequency C/N of one output, summed hop by hop."""
    scenario = scenario or Scenario.empty()
    hops = line_path(net, output_id, line)
    freqs = np.asarray(net.grid.points_mhz[line], dtype=float)

    source = net.node_map[hops[0].node_id]
    level = source.spectra[line].sample(freqs) + scenario.trim_db(source.id, line)
    noise = None
    if line in source.cnr_db:
        noise = np.full_like(freqs, 10.0 ** (-source.cnr_db[line] / 10.0))

    for hop in hops:
        node = net.node_map[hop.node_id]
        if isinstance(node, ComponentNode):
            spec = node.instance.spec
            entry = next(
                t for t in spec.transfers
                if t.from_port == hop.entry_port and t.to_port == hop.exit_port
                and line in t.curves
            )
            if entry.active:
                if noise is None:
                    noise = np.zeros_like(freqs)
                noise = noise + 10.0 ** (-(level - entry.noise_figure_db) / 10.0)
            level = level + node.instance.effective_gain(
                hop.entry_port, hop.exit_port, line, freqs,
                scenario.regulators.get(node.id),
            )
        if hop.edge_id is not None:
            edge = net.edge_map[hop.edge_id]
            level = level + np.array(
                [cable_attenuation(edge.cable, f, edge.length_m) for f in freqs]
            )

    cnr = None if noise is None else -10.0 * np.log10(noise)
    return level, cnr


def assert_matches_oracle(net: Network, scenario: Scenario | None = None,
                          tol: float = 1e-9) -> int:
    """Compare every trace of propagate() against the oracle."""
    result = propagate(net, scenario)
    checked = 0
    for (output_id, line), trace in result.traces.items():
        level, cnr = oracle_trace(net, output_id, line, scenario)
        np.testing.assert_allclose(trace.levels_dbuv, level, rtol=0.0, atol=tol)
        if cnr is None:
            assert trace.cnr_db is None
        else:
            np.testing.assert_allclose(trace.cnr_db, cnr, rtol=0.0, atol=tol)
        checked += 1
    return checked


# ---------------------------------------------------------------------------
# Exhaustive optimizer oracle
# ---------------------------------------------------------------------------


def regulator_space(net: Network) -> list[tuple[str, str, int]]:
    """(node, group, n_positions) for every regulator, in a fixed order."""
    dims = []
    for node in net.nodes:
        if isinstance(node, ComponentNode):
            for group, reg in sorted(node.instance.spec.regulators.items()):
                dims.append((node.id, group, len(reg.positions_db)))
    return dims


def brute_force_best_count(net: Network, base: Scenario | None = None) -> int:
    """Best compliant-output count over the full regulator space,
    found by running the trace pipeline on every combination."""
    dims = regulator_space(net)
    best = -1
    for combo in itertools.product(*(range(n) for _, _, n in dims)):
        regulators: dict[str, dict[str, int]] = {}
        for (node_id, group, _n), idx in zip(dims, combo):
            regulators.setdefault(node_id, {})[group] = idx
        scenario = Scenario(regulators)
        if base is not None:
            scenario = base.merged(scenario)
        report = check_outputs(propagate(net, scenario))
        best = max(best, report.compliant_count)
    return best
