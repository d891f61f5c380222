"""Core domain model for SMATV/CATV distribution networks.

A network is a directed acyclic graph. Source nodes inject signal onto one
or more of five trunk lines: four satellite IF lines, one per polarity and
sub-band combination (VL, VH, HL, HH, all occupying the 950-2150 MHz first
IF range), plus one terrestrial line (TERR, 47-862 MHz). Component nodes
(multiswitches, taps, splitters, amplifiers, attenuators, wall outlets)
route and reshape the lines; cable edges attenuate them. Output nodes are
the subscriber-facing connectors where compliance is judged.

The structural invariant the whole engine relies on: for every output and
every signal line reachable at it there is exactly one source-to-output
path, so levels are plain dB sums along that path. Validation enforces it
by requiring acyclicity and per-(node, line) inbound degree of at most one.

All levels are dBuV over 75 ohm, all frequencies MHz, all lengths meters.
Absence of signal is represented by absent dict entries, never by a magic
level value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import AmbiguousPath, NotReachable, RegulatorIndexOutOfRange

if TYPE_CHECKING:
    from .catalog import CableSpec, ComponentInstance

TERRESTRIAL_RANGE_MHZ = (47.0, 862.0)
SAT_IF_RANGE_MHZ = (950.0, 2150.0)
MAX_FREQUENCY_MHZ = 3000.0

# Subscriber drop runs beyond this trip a validation warning: the level
# tilt across the terrestrial band becomes hard to keep inside the outlet
# window with longer drops.
DROP_LENGTH_WARNING_M = 80.0


class Band(enum.Enum):
    """The two frequency bands a distribution line can occupy."""

    TERRESTRIAL = "terrestrial"
    SAT_IF = "sat_if"

    @property
    def range_mhz(self) -> tuple[float, float]:
        if self is Band.TERRESTRIAL:
            return TERRESTRIAL_RANGE_MHZ
        return SAT_IF_RANGE_MHZ

    @property
    def default_channel_bandwidth_mhz(self) -> float:
        return 8.0 if self is Band.TERRESTRIAL else 36.0


class SignalLine(enum.Enum):
    """One independently routed signal on the trunk bundle.

    The four SAT IF lines carry the two polarities (V/H) times the two
    sub-bands (L/H) of the satellite downlink after block conversion; a
    subscriber port selects one of them at a time. TERR carries the whole
    terrestrial multiplex.
    """

    VL = "VL"
    VH = "VH"
    HL = "HL"
    HH = "HH"
    TERR = "TERR"

    @property
    def band(self) -> Band:
        return Band.TERRESTRIAL if self is SignalLine.TERR else Band.SAT_IF


SAT_LINES = frozenset({SignalLine.VL, SignalLine.VH, SignalLine.HL, SignalLine.HH})
ALL_LINES = frozenset(SignalLine)


class OutputKind(enum.Enum):
    """What kind of receiver an output connector feeds."""

    SAT_RECEIVER = "sat_receiver"
    TV = "tv"

    @property
    def required_lines(self) -> frozenset[SignalLine]:
        """Lines that must reach this connector for it to be usable.

        A SAT receiver port must offer all four SAT IF lines because the
        subscriber can select any polarity/sub-band; a TV port needs the
        terrestrial line.
        """
        if self is OutputKind.SAT_RECEIVER:
            return SAT_LINES
        return frozenset({SignalLine.TERR})


def check_frequency_mhz(value: float) -> float:
    """Validate a frequency literal (0 < f <= 3000 MHz)."""
    f = float(value)
    if not 0.0 < f <= MAX_FREQUENCY_MHZ:
        raise ValueError(f"frequency {value!r} MHz outside (0, {MAX_FREQUENCY_MHZ}]")
    return f


def band_of_frequency(f_mhz: float) -> Band | None:
    """Return the band containing *f_mhz*, or None if between bands."""
    for band in Band:
        lo, hi = band.range_mhz
        if lo <= f_mhz <= hi:
            return band
    return None


@dataclass(frozen=True)
class Channel:
    """A single transmission channel (terrestrial mux or SAT transponder)."""

    center_mhz: float
    bandwidth_mhz: float
    line: SignalLine

    def __post_init__(self):
        check_frequency_mhz(self.center_mhz)
        if self.bandwidth_mhz <= 0:
            raise ValueError(f"channel bandwidth must be positive, got {self.bandwidth_mhz}")
        lo, hi = self.line.band.range_mhz
        if not lo <= self.center_mhz <= hi:
            raise ValueError(
                f"channel at {self.center_mhz} MHz outside the {self.line.band.value} "
                f"band [{lo}, {hi}] of line {self.line.value}"
            )


@dataclass(frozen=True)
class ChannelPlan:
    """The set of channels a headend injects, per line.

    The channel count per line drives per-channel power accounting: a
    component rated for some total output power supports a per-channel
    level that shrinks as 10*log10(N) with N carried channels.
    """

    channels: tuple[Channel, ...]

    def count_for(self, line: SignalLine) -> int:
        return sum(1 for ch in self.channels if ch.line is line)

    def lines(self) -> frozenset[SignalLine]:
        return frozenset(ch.line for ch in self.channels)


@dataclass(frozen=True)
class FrequencyGrid:
    """Evaluation frequencies per signal line.

    Levels and C/N are computed at every grid point of every line; the
    compliance verdict quantifies over all of them. Grids must hold at
    least two strictly increasing in-band points per line.
    """

    points_mhz: Mapping[SignalLine, tuple[float, ...]]

    DEFAULT_TERRESTRIAL_STEP_MHZ = 8.0
    DEFAULT_SAT_IF_STEP_MHZ = 25.0

    def __post_init__(self):
        for line, points in self.points_mhz.items():
            if len(points) < 2:
                raise ValueError(f"grid for {line.value} needs at least 2 points")
            lo, hi = line.band.range_mhz
            prev = None
            for f in points:
                check_frequency_mhz(f)
                if not lo <= f <= hi:
                    raise ValueError(
                        f"grid point {f} MHz for {line.value} outside band [{lo}, {hi}]"
                    )
                if prev is not None and f <= prev:
                    raise ValueError(f"grid for {line.value} must be strictly increasing")
                prev = f

    @classmethod
    def default(cls) -> "FrequencyGrid":
        """Every 8 MHz across 47-862 and every 25 MHz across 950-2150."""
        return cls.from_steps(cls.DEFAULT_TERRESTRIAL_STEP_MHZ, cls.DEFAULT_SAT_IF_STEP_MHZ)

    @classmethod
    def from_steps(cls, terrestrial_step_mhz: float, sat_if_step_mhz: float) -> "FrequencyGrid":
        points: dict[SignalLine, tuple[float, ...]] = {}
        for line in SignalLine:
            lo, hi = line.band.range_mhz
            step = terrestrial_step_mhz if line.band is Band.TERRESTRIAL else sat_if_step_mhz
            pts = []
            f = lo
            while f <= hi + 1e-9:
                pts.append(round(f, 6))
                f += step
            points[line] = tuple(pts)
        return cls(points)

    def for_line(self, line: SignalLine) -> tuple[float, ...]:
        return self.points_mhz[line]


@dataclass(frozen=True)
class SourceSpectrum:
    """Level of one line at its source, sampled at anchor frequencies.

    Between anchors the level is linearly interpolated; outside the anchor
    span it is held at the nearest anchor. A flat spectrum is a two-anchor
    span across the line's band.
    """

    anchors_mhz_dbuv: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.anchors_mhz_dbuv) < 1:
            raise ValueError("source spectrum needs at least one anchor")
        prev = None
        for f, _level in self.anchors_mhz_dbuv:
            check_frequency_mhz(f)
            if prev is not None and f <= prev:
                raise ValueError("spectrum anchors must be strictly increasing in frequency")
            prev = f

    @classmethod
    def flat(cls, level_dbuv: float, line: SignalLine) -> "SourceSpectrum":
        lo, hi = line.band.range_mhz
        return cls(((lo, float(level_dbuv)), (hi, float(level_dbuv))))

    def sample(self, freqs_mhz):
        import numpy as np

        freqs = np.asarray(freqs_mhz, dtype=float)
        xs = [f for f, _ in self.anchors_mhz_dbuv]
        ys = [lvl for _, lvl in self.anchors_mhz_dbuv]
        return np.interp(freqs, xs, ys)


@dataclass(frozen=True)
class SourceNode:
    """Injects signal onto one or more lines.

    cnr_db carries the carrier-to-noise ratio already present at the
    source (for instance the LNB output); lines absent from the mapping
    are treated as unconstrained, i.e. an ideal noiseless source.
    """

    id: str
    spectra: Mapping[SignalLine, SourceSpectrum]
    plan: ChannelPlan
    cnr_db: Mapping[SignalLine, float] = field(default_factory=dict)

    @property
    def lines(self) -> frozenset[SignalLine]:
        return frozenset(self.spectra)


@dataclass(frozen=True)
class ComponentNode:
    """A placed catalog component with chosen regulator settings."""

    id: str
    instance: "ComponentInstance"


@dataclass(frozen=True)
class OutputNode:
    """A subscriber-facing connector; the unit of compliance counting."""

    id: str
    kind: OutputKind
    floor: int | None = None
    apartment: str | None = None


Node = SourceNode | ComponentNode | OutputNode

OUTPUT_IN_PORT = "in"
SOURCE_OUT_PORT = "out"


@dataclass(frozen=True)
class PortRef:
    node: str
    port: str


@dataclass(frozen=True)
class Edge:
    """A cable run carrying a subset of the lines between two ports."""

    id: str
    src: PortRef
    dst: PortRef
    cable: "CableSpec"
    length_m: float
    lines: frozenset[SignalLine]


@dataclass(frozen=True)
class DesignConstraints:
    """Compliance targets an installation is checked against.

    Defaults follow common outlet-level planning practice: terrestrial
    outlets inside [57, 80] dBuV with 57 dB C/N (analog-grade), SAT IF
    outlets inside [47, 77] dBuV with an 11 dB C/N floor, and at least
    20 dB of isolation between subscriber taps (40 dB is the strict value
    used where several receivers share channels).
    """

    level_windows_dbuv: Mapping[Band, tuple[float, float]]
    min_cnr_db: Mapping[Band, float | None]
    min_tap_isolation_db: float = 20.0
    enforce_power_derating: bool = True

    STRICT_ISOLATION_DB = 40.0

    @classmethod
    def default(cls) -> "DesignConstraints":
        return cls(
            level_windows_dbuv={Band.TERRESTRIAL: (57.0, 80.0), Band.SAT_IF: (47.0, 77.0)},
            min_cnr_db={Band.TERRESTRIAL: 57.0, Band.SAT_IF: 11.0},
        )


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; severity is 'error' or 'warning'."""

    severity: str
    code: str
    message: str
    subject: str

    def __str__(self):
        return f"[{self.severity}] {self.code} @ {self.subject}: {self.message}"


@dataclass(frozen=True, eq=False)
class Network:
    """An immutable network document: nodes, edges, grid and constraints."""

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    grid: FrequencyGrid
    constraints: DesignConstraints

    @cached_property
    def node_map(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def edges_in(self) -> dict[str, tuple[Edge, ...]]:
        acc: dict[str, list[Edge]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.dst.node in acc:
                acc[e.dst.node].append(e)
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def edges_out(self) -> dict[str, tuple[Edge, ...]]:
        acc: dict[str, list[Edge]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.src.node in acc:
                acc[e.src.node].append(e)
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def outputs(self) -> tuple[OutputNode, ...]:
        return tuple(n for n in self.nodes if isinstance(n, OutputNode))

    @cached_property
    def sources(self) -> tuple[SourceNode, ...]:
        return tuple(n for n in self.nodes if isinstance(n, SourceNode))

    def ports_of(self, node: Node) -> dict[str, tuple[str, frozenset[SignalLine]]]:
        """Map port id -> (direction, supported lines) for any node kind."""
        if isinstance(node, SourceNode):
            return {SOURCE_OUT_PORT: ("out", node.lines)}
        if isinstance(node, OutputNode):
            return {OUTPUT_IN_PORT: ("in", ALL_LINES)}
        return {
            p.id: (p.direction.value, p.lines) for p in node.instance.spec.ports
        }


@dataclass(frozen=True)
class PathHop:
    """One node on a source-to-output path.

    entry_port is None for the source, exit_port and edge_id are None for
    the output; every other hop names the transfer actually traversed.
    """

    node_id: str
    entry_port: str | None
    exit_port: str | None
    edge_id: str | None


def _unique_in_edge(net: Network, node_id: str, port: str | None, line: SignalLine) -> Edge:
    """The single inbound edge carrying *line* into (node, port)."""
    hits = [
        e
        for e in net.edges_in.get(node_id, ())
        if line in e.lines and (port is None or e.dst.port == port)
    ]
    if not hits:
        raise NotReachable(f"line {line.value} does not reach node {node_id!r}")
    if len(hits) > 1:
        raise AmbiguousPath(
            f"line {line.value} enters node {node_id!r} over {len(hits)} edges"
        )
    return hits[0]


def line_path(net: Network, output_id: str, line: SignalLine) -> tuple[PathHop, ...]:
    """Resolve the unique source-to-output path of *line*.

    Walks backward from the output, selecting at every component the single
    transfer that delivers the line to the port the downstream edge leaves
    from. Raises NotReachable when the line never arrives and AmbiguousPath
    when the walk is not unique (which a valid network rules out).
    """
    node = net.node_map.get(output_id)
    if node is None or not isinstance(node, OutputNode):
        raise NotReachable(f"no output node with id {output_id!r}")

    hops_rev: list[PathHop] = [PathHop(output_id, OUTPUT_IN_PORT, None, None)]
    edge = _unique_in_edge(net, output_id, OUTPUT_IN_PORT, line)
    seen: set[str] = {output_id}

    while True:
        node = net.node_map.get(edge.src.node)
        if node is None:
            raise NotReachable(f"edge {edge.id!r} starts at unknown node {edge.src.node!r}")
        if node.id in seen:
            raise AmbiguousPath(f"cycle through node {node.id!r} on line {line.value}")
        seen.add(node.id)

        if isinstance(node, SourceNode):
            if line not in node.spectra:
                raise NotReachable(
                    f"source {node.id!r} does not emit line {line.value}"
                )
            hops_rev.append(PathHop(node.id, None, edge.src.port, edge.id))
            return tuple(reversed(hops_rev))

        if isinstance(node, OutputNode):
            raise AmbiguousPath(f"output {node.id!r} has an outbound edge {edge.id!r}")

        exit_port = edge.src.port
        transfers = [
            t
            for t in node.instance.spec.transfers
            if t.to_port == exit_port and line in t.curves
        ]
        if not transfers:
            raise NotReachable(
                f"component {node.id!r} has no transfer delivering {line.value} "
                f"to port {exit_port!r}"
            )
        if len(transfers) > 1:
            raise AmbiguousPath(
                f"component {node.id!r} has {len(transfers)} transfers delivering "
                f"{line.value} to port {exit_port!r}"
            )
        entry_port = transfers[0].from_port
        hops_rev.append(PathHop(node.id, entry_port, exit_port, edge.id))
        edge = _unique_in_edge(net, node.id, entry_port, line)


def _toposort_cycle_nodes(net: Network) -> set[str]:
    """Ids of nodes on (or downstream of) a directed cycle, empty if acyclic."""
    indeg = {n.id: 0 for n in net.nodes}
    for e in net.edges:
        if e.src.node in indeg and e.dst.node in indeg:
            indeg[e.dst.node] += 1
    queue = [nid for nid, d in indeg.items() if d == 0]
    seen = 0
    while queue:
        nid = queue.pop()
        seen += 1
        for e in net.edges_out.get(nid, ()):
            if e.dst.node in indeg:
                indeg[e.dst.node] -= 1
                if indeg[e.dst.node] == 0:
                    queue.append(e.dst.node)
    if seen == len(indeg):
        return set()
    return {nid for nid, d in indeg.items() if d > 0}


def validate_network(net: Network) -> list[Diagnostic]:
    """Structural validation; returns diagnostics instead of raising.

    Errors make the network unusable for propagation; warnings flag
    questionable but computable installations (over-long drops, SAT
    receiver ports that cannot offer all four SAT lines, ...).
    """
    out: list[Diagnostic] = []
    err = lambda code, msg, subject: out.append(Diagnostic("error", code, msg, subject))
    warn = lambda code, msg, subject: out.append(Diagnostic("warning", code, msg, subject))

    ids: set[str] = set()
    for n in net.nodes:
        if n.id in ids:
            err("duplicate-id", f"node id {n.id!r} appears more than once", n.id)
        ids.add(n.id)
    edge_ids: set[str] = set()
    for e in net.edges:
        if e.id in edge_ids:
            err("duplicate-id", f"edge id {e.id!r} appears more than once", e.id)
        edge_ids.add(e.id)
        if e.id in ids:
            err("duplicate-id", f"edge id {e.id!r} collides with a node id", e.id)

    # Edge endpoint and line-support checks.
    for e in net.edges:
        for ref, want_dir in ((e.src, "out"), (e.dst, "in")):
            node = net.node_map.get(ref.node)
            if node is None:
                err("dangling-node", f"edge {e.id!r} references unknown node {ref.node!r}", e.id)
                continue
            ports = net.ports_of(node)
            if ref.port not in ports:
                err(
                    "dangling-port",
                    f"edge {e.id!r} references unknown port {ref.port!r} of node {ref.node!r}",
                    e.id,
                )
                continue
            direction, supported = ports[ref.port]
            if direction != want_dir:
                err(
                    "port-direction",
                    f"edge {e.id!r} uses {ref.node!r}:{ref.port!r} as an {want_dir}-port "
                    f"but it is an {direction}-port",
                    e.id,
                )
            if not e.lines <= supported:
                missing = ",".join(sorted(l.value for l in e.lines - supported))
                err(
                    "line-support",
                    f"edge {e.id!r} carries [{missing}] unsupported by {ref.node!r}:{ref.port!r}",
                    e.id,
                )
        if not e.lines:
            err("empty-lines", f"edge {e.id!r} carries no lines", e.id)
        if e.length_m < 0:
            err("negative-length", f"edge {e.id!r} has negative length {e.length_m}", e.id)

    # Node degree rules.
    for n in net.nodes:
        if isinstance(n, SourceNode) and net.edges_in.get(n.id):
            err("source-inbound", f"source {n.id!r} has inbound edges", n.id)
        if isinstance(n, OutputNode):
            if net.edges_out.get(n.id):
                err("output-outbound", f"output {n.id!r} has outbound edges", n.id)
            n_in = len(net.edges_in.get(n.id, ()))
            if n_in != 1:
                err("output-feed", f"output {n.id!r} has {n_in} inbound edges, wants 1", n.id)

    # Tree-per-line: at most one inbound edge per (node, line).
    per_line: dict[tuple[str, SignalLine], int] = {}
    for e in net.edges:
        for line in e.lines:
            key = (e.dst.node, line)
            per_line[key] = per_line.get(key, 0) + 1
    for (nid, line), count in sorted(per_line.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        if count > 1:
            err(
                "line-merge",
                f"node {nid!r} receives line {line.value} over {count} edges",
                nid,
            )

    cyclic = _toposort_cycle_nodes(net)
    for nid in sorted(cyclic):
        err("cycle", f"node {nid!r} lies on or behind a directed cycle", nid)

    # Constraint sanity.
    for band, (lo, hi) in net.constraints.level_windows_dbuv.items():
        if not lo < hi:
            err(
                "level-window",
                f"{band.value} level window [{lo}, {hi}] is empty or inverted",
                band.value,
            )
    if net.constraints.min_tap_isolation_db < 0:
        err("isolation-limit", "minimum tap isolation must be >= 0 dB", "constraints")

    # Drop-length warning: subscriber-role ports and direct output feeds.
    for e in net.edges:
        src_node = net.node_map.get(e.src.node)
        dst_node = net.node_map.get(e.dst.node)
        from_subscriber = False
        if isinstance(src_node, ComponentNode):
            spec_ports = {p.id: p for p in src_node.instance.spec.ports}
            port = spec_ports.get(e.src.port)
            from_subscriber = port is not None and port.role.value == "subscriber"
        if (from_subscriber or isinstance(dst_node, OutputNode)) and e.length_m > DROP_LENGTH_WARNING_M:
            warn(
                "drop-length",
                f"drop edge {e.id!r} is {e.length_m} m, above the "
                f"{DROP_LENGTH_WARNING_M:.0f} m guideline",
                e.id,
            )

    # Required-line coverage at outputs (kind-dependent), only meaningful
    # when the graph is otherwise sound.
    if not any(d.severity == "error" for d in out):
        for o in net.outputs:
            for line in sorted(o.kind.required_lines, key=lambda l: l.value):
                try:
                    line_path(net, o.id, line)
                except NotReachable:
                    warn(
                        "missing-line",
                        f"output {o.id!r} ({o.kind.value}) is not reached by "
                        f"required line {line.value}",
                        o.id,
                    )
                except AmbiguousPath:
                    pass  # already reported as line-merge/cycle

    return out


def reachable_lines(net: Network, output_id: str) -> frozenset[SignalLine]:
    """Lines that actually arrive at an output over a unique path."""
    got = []
    for line in SignalLine:
        try:
            line_path(net, output_id, line)
        except (NotReachable, AmbiguousPath):
            continue
        got.append(line)
    return frozenset(got)


@dataclass(frozen=True)
class Scenario:
    """Adjustable state layered over a network: regulator indices per
    component and per-line trim offsets applied on top of source spectra.

    Missing entries fall back to each regulator's stored index and to a
    0 dB trim, so the empty scenario reproduces the network as stored.
    """

    regulators: Mapping[str, Mapping[str, int]] = field(default_factory=dict)
    source_trims_db: Mapping[str, Mapping[SignalLine, float]] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "Scenario":
        return cls()

    def regulator_index(self, node_id: str, group: str) -> int | None:
        return self.regulators.get(node_id, {}).get(group)

    def trim_db(self, node_id: str, line: SignalLine) -> float:
        return float(self.source_trims_db.get(node_id, {}).get(line, 0.0))

    def merged(self, other: "Scenario") -> "Scenario":
        """This scenario with *other*'s entries taking precedence."""
        regs = {k: dict(v) for k, v in self.regulators.items()}
        for node, groups in other.regulators.items():
            regs.setdefault(node, {}).update(groups)
        trims = {k: dict(v) for k, v in self.source_trims_db.items()}
        for node, lines in other.source_trims_db.items():
            trims.setdefault(node, {}).update(lines)
        return Scenario(regs, trims)


def apply_scenario(network: Network, scenario: Scenario | None) -> Network:
    """Fold a scenario into the document itself.

    Regulator choices become the stored index of each component and
    source trims are added onto the stored spectra, so the returned
    network simulates under the empty scenario exactly as the original
    did under *scenario*. Trims for lines a source does not carry are
    ignored, matching the simulator.
    """
    from dataclasses import replace

    if scenario is None:
        return network
    nodes: list[Node] = []
    for node in network.nodes:
        if isinstance(node, ComponentNode) and node.id in scenario.regulators:
            merged = dict(node.instance.regulator_indices)
            for group, index in scenario.regulators[node.id].items():
                reg = node.instance.spec.regulators.get(group)
                if reg is None:
                    raise RegulatorIndexOutOfRange(
                        f"{node.id}: component {node.instance.spec.id} has no "
                        f"regulator group {group!r}"
                    )
                if not 0 <= index < len(reg.positions_db):
                    raise RegulatorIndexOutOfRange(
                        f"{node.id}.{group}: index {index} outside 0.."
                        f"{len(reg.positions_db) - 1}"
                    )
                merged[group] = int(index)
            instance = replace(node.instance, regulator_indices=merged)
            nodes.append(replace(node, instance=instance))
        elif isinstance(node, SourceNode) and node.id in scenario.source_trims_db:
            spectra = dict(node.spectra)
            for line, trim in scenario.source_trims_db[node.id].items():
                if line in spectra and trim:
                    spectra[line] = SourceSpectrum(
                        tuple((f, lvl + float(trim))
                              for f, lvl in spectra[line].anchors_mhz_dbuv)
                    )
            nodes.append(replace(node, spectra=spectra))
        else:
            nodes.append(node)
    return replace(network, nodes=tuple(nodes))
