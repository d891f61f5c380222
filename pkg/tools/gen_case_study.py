"""Regenerate src/smatvplan/data/case_study.json.

The reference installation is built programmatically here and shipped as
a canonical document; the test suite asserts the two stay in sync. Run
from the repository root:

    python tools/gen_case_study.py
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from smatvplan import netio  # noqa: E402
from smatvplan.catalog import builtin_catalog, instantiate  # noqa: E402
from smatvplan.model import (  # noqa: E402
    ALL_LINES,
    SAT_LINES,
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
    SignalLine,
    SourceNode,
    SourceSpectrum,
    validate_network,
)

FLOORS = 5
APARTMENTS_PER_FLOOR = 4

# Per-floor regulator indices as installed: the terrestrial gain steps up
# floor by floor to offset the riser loss, the SAT gain is padded 8 dB on
# the ground floor where drops are shortest.
TERR_REG_INDEX = {1: 12, 2: 12, 3: 13, 4: 14, 5: 15}
SAT_REG_INDEX = {1: 1, 2: 3, 3: 3, 4: 3, 5: 3}

# Drop lengths in meters, per floor and apartment; outlet 1 is the hybrid
# outlet, outlet 2 the end outlet. Ground-floor outlet 2 runs over a
# directional tap with two short jumpers instead of a straight drop.
DROP_1_M = {
    1: (6, 12, 20, 30),
    2: (8, 14, 20, 26),
    3: (10, 16, 30, 40),
    4: (12, 18, 24, 30),
    5: (8, 32, 36, 40),
}
DROP_2_M = {
    2: (40, 45, 50, 55),
    3: (28, 34, 40, 45),
    4: (14, 20, 26, 32),
    5: (5, 8, 10, 12),
}
TAP_JUMPER_M = 2.0

TERR_LEVEL_DBUV = 80.0
TERR_CNR_DB = 65.0
SAT_LEVEL_DBUV = 67.5
SAT_CNR_DB = 14.0


def build() -> Network:
    cat = builtin_catalog()
    trunk = cat.cable("CX-T11")
    drop = cat.cable("CX-D6")
    nodes = []
    edges = []

    terr_plan = ChannelPlan(
        tuple(Channel(471.25 + 8.0 * k, 8.0, SignalLine.TERR) for k in range(40))
    )
    nodes.append(
        SourceNode(
            id="src_terr",
            spectra={SignalLine.TERR: SourceSpectrum.flat(TERR_LEVEL_DBUV, SignalLine.TERR)},
            plan=terr_plan,
            cnr_db={SignalLine.TERR: TERR_CNR_DB},
        )
    )
    edges.append(
        Edge(
            "e_he_terr",
            PortRef("src_terr", "out"),
            PortRef("ms1", "terr_in"),
            trunk,
            10.0,
            frozenset({SignalLine.TERR}),
        )
    )
    for line in sorted(SAT_LINES, key=lambda l: l.value):
        sid = f"src_{line.value.lower()}"
        plan = ChannelPlan(
            tuple(Channel(970.0 + 40.0 * k, 36.0, line) for k in range(30))
        )
        nodes.append(
            SourceNode(
                id=sid,
                spectra={line: SourceSpectrum.flat(SAT_LEVEL_DBUV, line)},
                plan=plan,
                cnr_db={line: SAT_CNR_DB},
            )
        )
        edges.append(
            Edge(
                f"e_he_{line.value.lower()}",
                PortRef(sid, "out"),
                PortRef("ms1", "sat_in"),
                trunk,
                10.0,
                frozenset({line}),
            )
        )

    for f in range(1, FLOORS + 1):
        part = "MV508T" if f == FLOORS else "MV508"
        regs = {"terr": TERR_REG_INDEX[f]}
        for group in ("sat_vl", "sat_vh", "sat_hl", "sat_hh"):
            regs[group] = SAT_REG_INDEX[f]
        nodes.append(ComponentNode(id=f"ms{f}", instance=instantiate(cat, part, regs)))
        if f < FLOORS:
            edges.append(
                Edge(
                    f"e_sat_r{f}",
                    PortRef(f"ms{f}", "sat_out"),
                    PortRef(f"ms{f + 1}", "sat_in"),
                    trunk,
                    5.0,
                    SAT_LINES,
                )
            )
            edges.append(
                Edge(
                    f"e_terr_r{f}",
                    PortRef(f"ms{f}", "terr_out"),
                    PortRef(f"ms{f + 1}", "terr_in"),
                    trunk,
                    5.0,
                    frozenset({SignalLine.TERR}),
                )
            )

    apartment = 0
    for f in range(1, FLOORS + 1):
        for a in range(1, APARTMENTS_PER_FLOOR + 1):
            apartment += 1
            tag = f"f{f}a{a}"

            wo1 = f"wo_{tag}_1"
            nodes.append(ComponentNode(id=wo1, instance=instantiate(cat, "WO511")))
            edges.append(
                Edge(
                    f"e_drop_{tag}_1",
                    PortRef(f"ms{f}", f"sub{2 * a - 1}"),
                    PortRef(wo1, "in"),
                    drop,
                    float(DROP_1_M[f][a - 1]),
                    ALL_LINES,
                )
            )
            sat1 = f"out_{tag}_sat1"
            nodes.append(
                OutputNode(id=sat1, kind=OutputKind.SAT_RECEIVER, floor=f, apartment=str(apartment))
            )
            edges.append(
                Edge(
                    f"e_out_{tag}_sat1",
                    PortRef(wo1, "sat"),
                    PortRef(sat1, "in"),
                    drop,
                    0.0,
                    ALL_LINES,
                )
            )
            tv = f"out_{tag}_tv"
            nodes.append(
                OutputNode(id=tv, kind=OutputKind.TV, floor=f, apartment=str(apartment))
            )
            edges.append(
                Edge(
                    f"e_out_{tag}_tv",
                    PortRef(wo1, "tv"),
                    PortRef(tv, "in"),
                    drop,
                    0.0,
                    frozenset({SignalLine.TERR}),
                )
            )

            wo2 = f"wo_{tag}_2"
            nodes.append(ComponentNode(id=wo2, instance=instantiate(cat, "WO512")))
            if f == 1:
                tap = f"tap_{tag}"
                nodes.append(ComponentNode(id=tap, instance=instantiate(cat, "SD508")))
                edges.append(
                    Edge(
                        f"e_tapin_{tag}",
                        PortRef("ms1", f"sub{2 * a}"),
                        PortRef(tap, "in"),
                        drop,
                        TAP_JUMPER_M,
                        ALL_LINES,
                    )
                )
                edges.append(
                    Edge(
                        f"e_tapout_{tag}",
                        PortRef(tap, "tap"),
                        PortRef(wo2, "in"),
                        drop,
                        TAP_JUMPER_M,
                        ALL_LINES,
                    )
                )
            else:
                edges.append(
                    Edge(
                        f"e_drop_{tag}_2",
                        PortRef(f"ms{f}", f"sub{2 * a}"),
                        PortRef(wo2, "in"),
                        drop,
                        float(DROP_2_M[f][a - 1]),
                        ALL_LINES,
                    )
                )
            sat2 = f"out_{tag}_sat2"
            nodes.append(
                OutputNode(id=sat2, kind=OutputKind.SAT_RECEIVER, floor=f, apartment=str(apartment))
            )
            edges.append(
                Edge(
                    f"e_out_{tag}_sat2",
                    PortRef(wo2, "sat"),
                    PortRef(sat2, "in"),
                    drop,
                    0.0,
                    ALL_LINES,
                )
            )

    # TV-grade C/N targets are out of reach for a fully digital
    # terrestrial plan; the installation is planned against 30 dB.
    constraints = DesignConstraints(
        level_windows_dbuv={Band.TERRESTRIAL: (57.0, 80.0), Band.SAT_IF: (47.0, 77.0)},
        min_cnr_db={Band.TERRESTRIAL: 30.0, Band.SAT_IF: 11.0},
        min_tap_isolation_db=20.0,
        enforce_power_derating=True,
    )
    return Network(
        nodes=tuple(nodes), edges=tuple(edges), grid=FrequencyGrid.default(), constraints=constraints
    )


def main():
    net = build()
    diagnostics = validate_network(net)
    errors = [d for d in diagnostics if d.severity == "error"]
    for d in diagnostics:
        print(d)
    if errors:
        raise SystemExit("refusing to write an invalid case study")
    text = netio.serialize_network(net)
    reparsed = netio.parse_network(text)
    assert netio.serialize_network(reparsed) == text, "document is not a serialization fixed point"
    out = pathlib.Path(__file__).resolve().parents[1] / "src/smatvplan/data/case_study.json"
    out.write_text(text)
    n_out = sum(1 for n in net.nodes if isinstance(n, OutputNode))
    print(f"wrote {out} ({len(net.nodes)} nodes, {len(net.edges)} edges, {n_out} outputs)")


if __name__ == "__main__":
    main()
