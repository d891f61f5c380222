"""Reading, writing and rendering network documents.

A network document is JSON: a catalog reference (the bundled one or an
inline catalog), per-band frequency grids, design constraints, nodes and
edges. Parsing is strict: unknown keys, malformed values and dangling
catalog references raise SchemaError with a JSON-path, and syntactically
broken input raises DocumentSyntaxError with line and column. Whatever
parses also serializes back to one canonical form (sorted keys, sorted
node and edge lists, two-space indent), so serialize(parse(x)) is a
fixed point usable for change detection and revision hashing.

The bundled case study is a five-floor building fed from one terrestrial
antenna run and a four-line SAT IF bundle through a riser of cascaded
multiswitches, four apartments per floor, three outlets per apartment
(two SAT receiver ports, one TV port): 60 outputs in total.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Mapping

from .catalog import (
    Catalog,
    CableSpec,
    ComponentSpec,
    catalog_from_dict,
    catalog_to_dict,
    builtin_catalog,
    instantiate,
    _lines_from_json,
    _lines_to_json,
    _require_keys,
)
from .compliance import ComplianceReport
from .engine import power_to_level
from .errors import (
    DocumentSyntaxError,
    RegulatorIndexOutOfRange,
    SchemaError,
    UnknownComponent,
)
from .model import (
    Band,
    Channel,
    ChannelPlan,
    ComponentNode,
    DesignConstraints,
    Edge,
    FrequencyGrid,
    Network,
    Node,
    OutputKind,
    OutputNode,
    PortRef,
    Scenario,
    SignalLine,
    SourceNode,
    SourceSpectrum,
)

FORMAT_VERSION = 1

_BAND_NAMES = {Band.TERRESTRIAL: "terrestrial", Band.SAT_IF: "sat_if"}


def _loads(text: str | bytes) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise SchemaError("document root must be an object", "$")
    return doc


def _float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"expected a number, got {value!r}", path)
    return float(value)


def _line(name, path: str) -> SignalLine:
    try:
        return SignalLine(name)
    except ValueError:
        raise SchemaError(f"unknown signal line {name!r}", path) from None


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _parse_grid(doc, path: str) -> FrequencyGrid:
    _require_keys(doc, {"terrestrial", "sat_if"}, set(), path)
    band_points: dict[Band, tuple[float, ...]] = {}
    for band in Band:
        key = _BAND_NAMES[band]
        item = doc[key]
        bpath = f"{path}.{key}"
        _require_keys(item, set(), {"points_mhz", "start_mhz", "stop_mhz", "step_mhz"}, bpath)
        if "points_mhz" in item:
            if len(item) != 1:
                raise SchemaError("give either points_mhz or start/stop/step", bpath)
            if not isinstance(item["points_mhz"], list):
                raise SchemaError("expected a list of frequencies", f"{bpath}.points_mhz")
            pts = tuple(_float(p, f"{bpath}.points_mhz") for p in item["points_mhz"])
        elif {"start_mhz", "stop_mhz", "step_mhz"} <= set(item):
            start = _float(item["start_mhz"], f"{bpath}.start_mhz")
            stop = _float(item["stop_mhz"], f"{bpath}.stop_mhz")
            step = _float(item["step_mhz"], f"{bpath}.step_mhz")
            if step <= 0 or stop < start:
                raise SchemaError("need step_mhz > 0 and stop_mhz >= start_mhz", bpath)
            acc = []
            f = start
            while f <= stop + 1e-9:
                acc.append(round(f, 6))
                f += step
            pts = tuple(acc)
        else:
            raise SchemaError("give either points_mhz or start/stop/step", bpath)
        band_points[band] = pts
    try:
        return FrequencyGrid(
            {line: band_points[line.band] for line in SignalLine}
        )
    except ValueError as exc:
        raise SchemaError(str(exc), path) from None


def _parse_constraints(doc, path: str) -> DesignConstraints:
    _require_keys(
        doc,
        {"level_windows_dbuv", "min_cnr_db"},
        {"min_tap_isolation_db", "enforce_power_derating"},
        path,
    )
    windows: dict[Band, tuple[float, float]] = {}
    wj = doc["level_windows_dbuv"]
    _require_keys(wj, {"terrestrial", "sat_if"}, set(), f"{path}.level_windows_dbuv")
    for band in Band:
        pair = wj[_BAND_NAMES[band]]
        ppath = f"{path}.level_windows_dbuv.{_BAND_NAMES[band]}"
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError("expected [low, high]", ppath)
        windows[band] = (_float(pair[0], ppath), _float(pair[1], ppath))
    floors: dict[Band, float | None] = {}
    cj = doc["min_cnr_db"]
    _require_keys(cj, {"terrestrial", "sat_if"}, set(), f"{path}.min_cnr_db")
    for band in Band:
        v = cj[_BAND_NAMES[band]]
        floors[band] = None if v is None else _float(v, f"{path}.min_cnr_db.{_BAND_NAMES[band]}")
    return DesignConstraints(
        level_windows_dbuv=windows,
        min_cnr_db=floors,
        min_tap_isolation_db=_float(
            doc.get("min_tap_isolation_db", 20.0), f"{path}.min_tap_isolation_db"
        ),
        enforce_power_derating=bool(doc.get("enforce_power_derating", True)),
    )


def _parse_spectrum(doc, plan: ChannelPlan, line: SignalLine, path: str) -> SourceSpectrum:
    _require_keys(doc, set(), {"level_dbuv", "anchors_mhz_dbuv", "power_dbm"}, path)
    if len(doc) != 1:
        raise SchemaError(
            "give exactly one of level_dbuv, anchors_mhz_dbuv or power_dbm", path
        )
    if "level_dbuv" in doc:
        return SourceSpectrum.flat(_float(doc["level_dbuv"], f"{path}.level_dbuv"), line)
    if "power_dbm" in doc:
        n = plan.count_for(line)
        if n < 1:
            raise SchemaError(
                f"power_dbm needs at least one channel on {line.value} in the "
                "source's channel plan",
                f"{path}.power_dbm",
            )
        level = power_to_level(_float(doc["power_dbm"], f"{path}.power_dbm"), n)
        return SourceSpectrum.flat(level, line)
    aj = doc["anchors_mhz_dbuv"]
    if not isinstance(aj, list) or not all(isinstance(p, list) and len(p) == 2 for p in aj):
        raise SchemaError("expected a list of [freq_mhz, level_dbuv] pairs", f"{path}.anchors_mhz_dbuv")
    try:
        return SourceSpectrum(tuple((_float(f, path), _float(l, path)) for f, l in aj))
    except ValueError as exc:
        raise SchemaError(str(exc), f"{path}.anchors_mhz_dbuv") from None


def _parse_source(doc, path: str) -> SourceNode:
    _require_keys(doc, {"id", "kind", "lines"}, {"cnr_db", "channels"}, path)
    channels = []
    for i, chj in enumerate(doc.get("channels", [])):
        cpath = f"{path}.channels[{i}]"
        _require_keys(chj, {"center_mhz", "bandwidth_mhz", "line"}, set(), cpath)
        try:
            channels.append(
                Channel(
                    _float(chj["center_mhz"], cpath),
                    _float(chj["bandwidth_mhz"], cpath),
                    _line(chj["line"], f"{cpath}.line"),
                )
            )
        except ValueError as exc:
            raise SchemaError(str(exc), cpath) from None
    plan = ChannelPlan(tuple(channels))
    if not isinstance(doc["lines"], dict) or not doc["lines"]:
        raise SchemaError("expected a non-empty object of line -> spectrum", f"{path}.lines")
    spectra = {}
    for lname, sj in doc["lines"].items():
        line = _line(lname, f"{path}.lines")
        spectra[line] = _parse_spectrum(sj, plan, line, f"{path}.lines.{lname}")
    cnr = {}
    for lname, v in (doc.get("cnr_db") or {}).items():
        line = _line(lname, f"{path}.cnr_db")
        if line not in spectra:
            raise SchemaError(
                f"cnr_db names line {lname!r} the source does not emit", f"{path}.cnr_db"
            )
        cnr[line] = _float(v, f"{path}.cnr_db.{lname}")
    return SourceNode(id=str(doc["id"]), spectra=spectra, plan=plan, cnr_db=cnr)


def _parse_port_ref(value, path: str) -> PortRef:
    if not isinstance(value, str) or ":" not in value:
        raise SchemaError(f"expected 'node:port', got {value!r}", path)
    node, port = value.rsplit(":", 1)
    if not node or not port:
        raise SchemaError(f"expected 'node:port', got {value!r}", path)
    return PortRef(node, port)


def network_from_dict(doc: dict) -> Network:
    """Build a Network from a parsed document; structural checks only
    (run validate_network for graph-level diagnostics)."""
    _require_keys(doc, {"format_version", "catalog", "grid", "nodes", "edges"}, {"constraints"}, "$")
    if doc["format_version"] != FORMAT_VERSION:
        raise SchemaError(
            f"unsupported format_version {doc['format_version']!r}", "$.format_version"
        )

    cj = doc["catalog"]
    _require_keys(cj, set(), {"builtin", "inline"}, "$.catalog")
    if ("builtin" in cj) == ("inline" in cj):
        raise SchemaError("give exactly one of builtin or inline", "$.catalog")
    if "builtin" in cj:
        if cj["builtin"] is not True:
            raise SchemaError("builtin must be true when present", "$.catalog.builtin")
        catalog = builtin_catalog()
    else:
        catalog = catalog_from_dict(cj["inline"])

    grid = _parse_grid(doc["grid"], "$.grid")
    constraints = (
        _parse_constraints(doc["constraints"], "$.constraints")
        if "constraints" in doc
        else DesignConstraints.default()
    )

    if not isinstance(doc["nodes"], list):
        raise SchemaError("expected a list", "$.nodes")
    nodes: list[Node] = []
    for i, nj in enumerate(doc["nodes"]):
        path = f"$.nodes[{i}]"
        if not isinstance(nj, dict) or "kind" not in nj:
            raise SchemaError("expected an object with a kind", path)
        if not isinstance(nj.get("id"), str) or not nj["id"] or ":" in nj["id"]:
            raise SchemaError("node id must be a non-empty string without ':'", f"{path}.id")
        kind = nj["kind"]
        if kind == "source":
            nodes.append(_parse_source(nj, path))
        elif kind == "component":
            _require_keys(nj, {"id", "kind", "part"}, {"regulators"}, path)
            regulators = nj.get("regulators", {})
            if not isinstance(regulators, dict):
                raise SchemaError("expected an object of group -> index", f"{path}.regulators")
            try:
                inst = instantiate(catalog, str(nj["part"]), regulators)
            except (UnknownComponent, RegulatorIndexOutOfRange) as exc:
                raise SchemaError(str(exc), path) from None
            nodes.append(ComponentNode(id=nj["id"], instance=inst))
        elif kind == "output":
            _require_keys(nj, {"id", "kind", "output_kind"}, {"floor", "apartment"}, path)
            try:
                okind = OutputKind(nj["output_kind"])
            except ValueError:
                raise SchemaError(
                    f"unknown output kind {nj['output_kind']!r}", f"{path}.output_kind"
                ) from None
            floor = nj.get("floor")
            if floor is not None and (isinstance(floor, bool) or not isinstance(floor, int)):
                raise SchemaError("floor must be an integer", f"{path}.floor")
            apartment = nj.get("apartment")
            if apartment is not None and not isinstance(apartment, str):
                raise SchemaError("apartment must be a string", f"{path}.apartment")
            nodes.append(
                OutputNode(id=nj["id"], kind=okind, floor=floor, apartment=apartment)
            )
        else:
            raise SchemaError(f"unknown node kind {kind!r}", f"{path}.kind")

    if not isinstance(doc["edges"], list):
        raise SchemaError("expected a list", "$.edges")
    edges: list[Edge] = []
    for i, ej in enumerate(doc["edges"]):
        path = f"$.edges[{i}]"
        _require_keys(ej, {"id", "from", "to", "cable", "length_m", "lines"}, set(), path)
        if not isinstance(ej.get("id"), str) or not ej["id"]:
            raise SchemaError("edge id must be a non-empty string", f"{path}.id")
        try:
            cable = catalog.cable(str(ej["cable"]))
        except UnknownComponent as exc:
            raise SchemaError(str(exc), f"{path}.cable") from None
        length = _float(ej["length_m"], f"{path}.length_m")
        edges.append(
            Edge(
                id=ej["id"],
                src=_parse_port_ref(ej["from"], f"{path}.from"),
                dst=_parse_port_ref(ej["to"], f"{path}.to"),
                cable=cable,
                length_m=length,
                lines=_lines_from_json(ej["lines"], f"{path}.lines"),
            )
        )

    return Network(nodes=tuple(nodes), edges=tuple(edges), grid=grid, constraints=constraints)


def parse_network(text: str | bytes) -> Network:
    return network_from_dict(_loads(text))


def parse_catalog(text: str | bytes) -> Catalog:
    return catalog_from_dict(_loads(text))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _spectrum_to_json(spectrum: SourceSpectrum, line: SignalLine):
    lo, hi = line.band.range_mhz
    a = spectrum.anchors_mhz_dbuv
    if len(a) == 2 and a[0][0] == lo and a[1][0] == hi and a[0][1] == a[1][1]:
        return {"level_dbuv": a[0][1]}
    return {"anchors_mhz_dbuv": [[f, l] for f, l in a]}


def _used_catalog(net: Network) -> Catalog:
    components: dict[str, ComponentSpec] = {}
    for n in net.nodes:
        if isinstance(n, ComponentNode):
            spec = n.instance.spec
            if components.get(spec.id, spec) != spec:
                raise ValueError(f"two different specs share the part id {spec.id!r}")
            components[spec.id] = spec
    cables: dict[str, CableSpec] = {}
    for e in net.edges:
        if cables.get(e.cable.id, e.cable) != e.cable:
            raise ValueError(f"two different cables share the id {e.cable.id!r}")
        cables[e.cable.id] = e.cable
    return Catalog(components=components, cables=cables)


def network_to_dict(net: Network) -> dict:
    used = _used_catalog(net)
    builtin = builtin_catalog()
    is_builtin = all(
        builtin.components.get(cid) == spec for cid, spec in used.components.items()
    ) and all(builtin.cables.get(cid) == c for cid, c in used.cables.items())
    catalog_json = {"builtin": True} if is_builtin else {"inline": catalog_to_dict(used)}

    sat_points = [tuple(net.grid.for_line(l)) for l in sorted(
        (l for l in SignalLine if l.band is Band.SAT_IF), key=lambda l: l.value
    )]
    if len(set(sat_points)) != 1:
        raise ValueError("per-line SAT grids differ; the document format stores one per band")
    grid_json = {
        "terrestrial": {"points_mhz": list(net.grid.for_line(SignalLine.TERR))},
        "sat_if": {"points_mhz": list(sat_points[0])},
    }

    cons = net.constraints
    constraints_json = {
        "level_windows_dbuv": {
            _BAND_NAMES[b]: list(cons.level_windows_dbuv[b]) for b in Band
        },
        "min_cnr_db": {_BAND_NAMES[b]: cons.min_cnr_db.get(b) for b in Band},
        "min_tap_isolation_db": cons.min_tap_isolation_db,
        "enforce_power_derating": cons.enforce_power_derating,
    }

    nodes_json = []
    for n in sorted(net.nodes, key=lambda n: n.id):
        if isinstance(n, SourceNode):
            nj: dict = {
                "id": n.id,
                "kind": "source",
                "lines": {
                    line.value: _spectrum_to_json(sp, line)
                    for line, sp in sorted(n.spectra.items(), key=lambda kv: kv[0].value)
                },
            }
            if n.cnr_db:
                nj["cnr_db"] = {
                    line.value: v
                    for line, v in sorted(n.cnr_db.items(), key=lambda kv: kv[0].value)
                }
            if n.plan.channels:
                nj["channels"] = [
                    {"center_mhz": ch.center_mhz, "bandwidth_mhz": ch.bandwidth_mhz, "line": ch.line.value}
                    for ch in sorted(n.plan.channels, key=lambda c: (c.line.value, c.center_mhz))
                ]
        elif isinstance(n, ComponentNode):
            nj = {"id": n.id, "kind": "component", "part": n.instance.spec.id}
            if n.instance.regulator_indices:
                nj["regulators"] = {
                    g: i for g, i in sorted(n.instance.regulator_indices.items())
                }
        else:
            nj = {"id": n.id, "kind": "output", "output_kind": n.kind.value}
            if n.floor is not None:
                nj["floor"] = n.floor
            if n.apartment is not None:
                nj["apartment"] = n.apartment
        nodes_json.append(nj)

    edges_json = [
        {
            "id": e.id,
            "from": f"{e.src.node}:{e.src.port}",
            "to": f"{e.dst.node}:{e.dst.port}",
            "cable": e.cable.id,
            "length_m": e.length_m,
            "lines": _lines_to_json(e.lines),
        }
        for e in sorted(net.edges, key=lambda e: e.id)
    ]

    return {
        "format_version": FORMAT_VERSION,
        "catalog": catalog_json,
        "grid": grid_json,
        "constraints": constraints_json,
        "nodes": nodes_json,
        "edges": edges_json,
    }


def serialize_network(net: Network) -> str:
    """Canonical document text: stable key order, stable node/edge order."""
    return json.dumps(network_to_dict(net), indent=2, sort_keys=True) + "\n"


def canonical_bytes(net: Network) -> bytes:
    return serialize_network(net).encode("utf-8")


def serialize_catalog(catalog: Catalog) -> str:
    return json.dumps(catalog_to_dict(catalog), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------


def scenario_from_dict(doc: dict) -> Scenario:
    _require_keys(doc, set(), {"regulators", "source_trims_db"}, "$")
    regulators: dict[str, dict[str, int]] = {}
    for node, groups in (doc.get("regulators") or {}).items():
        path = f"$.regulators.{node}"
        if not isinstance(groups, dict):
            raise SchemaError("expected an object of group -> index", path)
        regulators[str(node)] = {}
        for group, idx in groups.items():
            if isinstance(idx, bool) or not isinstance(idx, int):
                raise SchemaError(f"index must be an integer, got {idx!r}", f"{path}.{group}")
            regulators[str(node)][str(group)] = idx
    trims: dict[str, dict[SignalLine, float]] = {}
    for node, lines in (doc.get("source_trims_db") or {}).items():
        path = f"$.source_trims_db.{node}"
        if not isinstance(lines, dict):
            raise SchemaError("expected an object of line -> dB", path)
        trims[str(node)] = {
            _line(lname, path): _float(v, f"{path}.{lname}") for lname, v in lines.items()
        }
    return Scenario(regulators=regulators, source_trims_db=trims)


def scenario_to_dict(scenario: Scenario) -> dict:
    doc: dict = {}
    if scenario.regulators:
        doc["regulators"] = {
            node: {g: i for g, i in sorted(groups.items())}
            for node, groups in sorted(scenario.regulators.items())
        }
    if scenario.source_trims_db:
        doc["source_trims_db"] = {
            node: {l.value: v for l, v in sorted(lines.items(), key=lambda kv: kv[0].value)}
            for node, lines in sorted(scenario.source_trims_db.items())
        }
    return doc


def parse_scenario(text: str | bytes) -> Scenario:
    return scenario_from_dict(_loads(text))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def report_to_dict(report: ComplianceReport) -> dict:
    def violation(v):
        return {
            "kind": v.kind.value,
            "subject": v.subject,
            "line": None if v.line is None else v.line.value,
            "frequency_mhz": v.frequency_mhz,
            "measured": v.measured,
            "limit": v.limit,
            "message": v.message,
        }

    return {
        "compliant": report.compliant,
        "compliant_count": report.compliant_count,
        "total_outputs": report.total_outputs,
        "outputs": [
            {
                "id": v.output_id,
                "compliant": v.compliant,
                "margin_db": v.margin_db,
                "violations": [violation(x) for x in v.violations],
            }
            for v in report.verdicts
        ],
        "network_violations": [violation(x) for x in report.network_violations],
    }


def export_report(report: ComplianceReport, format: str = "table") -> str:
    """Render a compliance report as an aligned text table or as JSON."""
    if format == "json":
        return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
    if format != "table":
        raise ValueError(f"unknown report format {format!r}")

    rows = []
    for v in report.verdicts:
        margin = "n/a" if v.margin_db is None else f"{v.margin_db:+.2f} dB"
        notes = "; ".join(x.message for x in v.violations)
        rows.append((v.output_id, "PASS" if v.compliant else "FAIL", margin, notes))
    id_w = max([len("output")] + [len(r[0]) for r in rows])
    mg_w = max([len("margin")] + [len(r[2]) for r in rows])
    lines = [f"{'output':<{id_w}}  {'status':<6}  {'margin':>{mg_w}}  notes"]
    for rid, status, margin, notes in rows:
        lines.append(f"{rid:<{id_w}}  {status:<6}  {margin:>{mg_w}}  {notes}".rstrip())
    lines.append("")
    lines.append(f"{report.compliant_count}/{report.total_outputs} outputs compliant")
    if report.network_violations:
        lines.append("network checks:")
        for v in report.network_violations:
            lines.append(f"  [{v.kind.value}] {v.subject}: {v.message}")
    else:
        lines.append("network checks: clean")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Bundled case study
# ---------------------------------------------------------------------------


def build_case_study() -> Network:
    """The bundled five-floor reference installation.

    One terrestrial source (flat 80 dBuV, 40 channels) and four SAT IF
    sources (flat 67.5 dBuV, 30 transponders each) feed a riser of five
    cascaded multiswitches, one per floor. Each floor serves four
    apartments over two subscriber drops: one to a hybrid outlet (SAT
    receiver + TV port), one to an end outlet (second SAT receiver
    port); on the ground floor the second drop hangs off a directional
    tap. Sixty outputs overall, with deliberately uneven drop lengths so
    compliance depends on where in the building an outlet sits.
    """
    text = resources.files("smatvplan.data").joinpath("case_study.json").read_text()
    return parse_network(text)
