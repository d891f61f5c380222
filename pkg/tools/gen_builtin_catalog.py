"""Regenerate src/smatvplan/data/builtin_catalog.json.

The bundled catalog is easier to audit as code than as 1500 lines of
JSON, so it is built here and serialized through the public codec. Run
from the repository root after changing any of the part definitions:

    python tools/gen_builtin_catalog.py
"""

from __future__ import annotations

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from smatvplan.catalog import (  # noqa: E402
    CableSpec,
    Catalog,
    ComponentClass,
    ComponentSpec,
    GainCurve,
    GainRegulator,
    PortDirection,
    PortRole,
    PortSpec,
    TransferEntry,
    catalog_from_dict,
    catalog_to_dict,
)
from smatvplan.model import ALL_LINES, SAT_LINES, Band, SignalLine  # noqa: E402

IN = PortDirection.IN
OUT = PortDirection.OUT


def flat(lines, gain_db):
    return {line: GainCurve.flat(gain_db, line.band) for line in lines}


def port(pid, direction, lines, role):
    return PortSpec(pid, direction, frozenset(lines), role)


def multiswitch(part_id, *, n_sub, kind, with_trunk, tap_isolation_db, sat_regulators):
    """The MV/MR family: 4 SAT inputs + 1 TERR input fan out to n_sub
    subscriber ports; cascadable variants pass the trunk bundle through."""
    ports = [
        port("sat_in", IN, SAT_LINES, PortRole.SAT_INPUT),
        port("terr_in", IN, {SignalLine.TERR}, PortRole.TERRESTRIAL),
    ]
    transfers = []
    if with_trunk:
        ports += [
            port("sat_out", OUT, SAT_LINES, PortRole.TRUNK),
            port("terr_out", OUT, {SignalLine.TERR}, PortRole.TRUNK),
        ]
        # Trunk path is passive: SAT flat, TERR slightly tilted (higher
        # loss at the top of the band), matching measured through losses.
        transfers.append(TransferEntry("sat_in", "sat_out", flat(SAT_LINES, -2.0)))
        transfers.append(
            TransferEntry(
                "terr_in",
                "terr_out",
                {SignalLine.TERR: GainCurve(((47.0, -1.6), (862.0, -2.8)))},
            )
        )
    regulators = {"terr": GainRegulator(tuple(float(p) for p in range(-15, 1)), 15)}
    if sat_regulators:
        for group in ("sat_vl", "sat_vh", "sat_hl", "sat_hh"):
            regulators[group] = GainRegulator((-12.0, -8.0, -4.0, 0.0), 3)
    sat_group = {
        SignalLine.VL: "sat_vl",
        SignalLine.VH: "sat_vh",
        SignalLine.HL: "sat_hl",
        SignalLine.HH: "sat_hh",
    }
    for i in range(1, n_sub + 1):
        sub = f"sub{i}"
        ports.append(port(sub, OUT, ALL_LINES, PortRole.SUBSCRIBER))
        for line in sorted(SAT_LINES, key=lambda l: l.value):
            transfers.append(
                TransferEntry(
                    "sat_in",
                    sub,
                    flat([line], 2.0),
                    active=True,
                    noise_figure_db=8.0,
                    regulator=sat_group[line] if sat_regulators else None,
                )
            )
        transfers.append(
            TransferEntry(
                "terr_in",
                sub,
                flat([SignalLine.TERR], 2.0),
                active=True,
                noise_figure_db=8.0,
                regulator="terr",
            )
        )
    return ComponentSpec(
        id=part_id,
        kind=kind,
        ports=tuple(ports),
        transfers=tuple(transfers),
        regulators=regulators,
        max_output_power_dbm=0.0,
        tap_isolation_db=tap_isolation_db,
        metadata={
            "family": "multiswitch",
            "description": f"4 SAT IF + terrestrial multiswitch, {n_sub} subscriber ports",
        },
    )


def tap(part_id, tap_loss_db, through_loss_db, isolation_db):
    return ComponentSpec(
        id=part_id,
        kind=ComponentClass.TAP,
        ports=(
            port("in", IN, ALL_LINES, PortRole.TRUNK),
            port("out", OUT, ALL_LINES, PortRole.TRUNK),
            port("tap", OUT, ALL_LINES, PortRole.SUBSCRIBER),
        ),
        transfers=(
            TransferEntry("in", "out", flat(ALL_LINES, through_loss_db)),
            TransferEntry("in", "tap", flat(ALL_LINES, tap_loss_db)),
        ),
        tap_isolation_db=isolation_db,
        metadata={"family": "tap", "description": f"{-tap_loss_db:.0f} dB directional tap"},
    )


def build() -> Catalog:
    components = [
        multiswitch(
            "MV508",
            n_sub=8,
            kind=ComponentClass.MULTISWITCH_CASCADABLE,
            with_trunk=True,
            tap_isolation_db=25.0,
            sat_regulators=True,
        ),
        multiswitch(
            "MV508T",
            n_sub=8,
            kind=ComponentClass.MULTISWITCH_TERMINAL,
            with_trunk=False,
            tap_isolation_db=25.0,
            sat_regulators=True,
        ),
        multiswitch(
            "MR512",
            n_sub=16,
            kind=ComponentClass.MULTISWITCH_RADIAL,
            with_trunk=False,
            tap_isolation_db=30.0,
            sat_regulators=False,
        ),
        tap("SD504", -4.0, -1.5, 22.0),
        tap("SD508", -8.0, -1.2, 24.0),
        tap("SD512", -12.0, -1.0, 26.0),
        tap("SD515", -15.0, -0.8, 28.0),
        ComponentSpec(
            id="SD520",
            kind=ComponentClass.SPLITTER,
            ports=(
                port("in", IN, ALL_LINES, PortRole.TRUNK),
                port("out1", OUT, ALL_LINES, PortRole.TRUNK),
                port("out2", OUT, ALL_LINES, PortRole.TRUNK),
            ),
            transfers=(
                TransferEntry("in", "out1", flat(ALL_LINES, -4.0)),
                TransferEntry("in", "out2", flat(ALL_LINES, -4.0)),
            ),
            tap_isolation_db=22.0,
            metadata={"family": "splitter", "description": "two-way splitter"},
        ),
        ComponentSpec(
            id="LA520",
            kind=ComponentClass.AMPLIFIER,
            ports=(
                port("in", IN, ALL_LINES, PortRole.TRUNK),
                port("out", OUT, ALL_LINES, PortRole.TRUNK),
            ),
            transfers=(
                TransferEntry(
                    "in", "out", flat(ALL_LINES, 20.0), active=True, noise_figure_db=6.0
                ),
            ),
            max_output_power_dbm=0.0,
            metadata={"family": "amplifier", "description": "20 dB broadband line amplifier"},
        ),
        ComponentSpec(
            id="AT520",
            kind=ComponentClass.ATTENUATOR,
            ports=(
                port("in", IN, ALL_LINES, PortRole.TRUNK),
                port("out", OUT, ALL_LINES, PortRole.TRUNK),
            ),
            transfers=(
                TransferEntry("in", "out", flat(ALL_LINES, 0.0), regulator="pad"),
            ),
            regulators={"pad": GainRegulator(tuple(float(p) for p in range(-20, 1)), 20)},
            metadata={"family": "attenuator", "description": "0-20 dB step attenuator"},
        ),
        ComponentSpec(
            id="WO511",
            kind=ComponentClass.OUTLET,
            ports=(
                port("in", IN, ALL_LINES, PortRole.SUBSCRIBER),
                port("sat", OUT, ALL_LINES, PortRole.SUBSCRIBER),
                port("tv", OUT, {SignalLine.TERR}, PortRole.SUBSCRIBER),
            ),
            transfers=(
                TransferEntry("in", "sat", flat(ALL_LINES, -1.5)),
                TransferEntry("in", "tv", flat([SignalLine.TERR], -1.5)),
            ),
            tap_isolation_db=26.0,
            metadata={"family": "outlet", "description": "hybrid SAT/TV wall outlet"},
        ),
        ComponentSpec(
            id="WO512",
            kind=ComponentClass.OUTLET,
            ports=(
                port("in", IN, ALL_LINES, PortRole.SUBSCRIBER),
                port("sat", OUT, ALL_LINES, PortRole.SUBSCRIBER),
            ),
            transfers=(TransferEntry("in", "sat", flat(ALL_LINES, -1.0)),),
            metadata={"family": "outlet", "description": "end-of-line wall outlet"},
        ),
        ComponentSpec(
            id="GH516",
            kind=ComponentClass.HEADEND_IF_IF,
            ports=(
                port("in", IN, SAT_LINES, PortRole.SAT_INPUT),
                port("out", OUT, SAT_LINES, PortRole.TRUNK),
            ),
            transfers=(
                TransferEntry(
                    "in", "out", flat(SAT_LINES, 10.0), active=True, noise_figure_db=7.0
                ),
            ),
            max_output_power_dbm=0.0,
            metadata={"family": "headend", "description": "IF-IF headend launch amplifier"},
        ),
    ]
    cables = [
        CableSpec("CX-T11", ((100.0, 4.53), (2150.0, 17.62))),
        CableSpec("CX-D6", ((100.0, 7.06), (2150.0, 27.61))),
    ]
    return Catalog(
        components={c.id: c for c in components},
        cables={c.id: c for c in cables},
    )


def main():
    catalog = build()
    doc = catalog_to_dict(catalog)
    roundtrip = catalog_from_dict(json.loads(json.dumps(doc)))
    assert roundtrip == catalog, "codec round-trip changed the catalog"
    out = pathlib.Path(__file__).resolve().parents[1] / "src/smatvplan/data/builtin_catalog.json"
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} ({len(catalog.components)} components, {len(catalog.cables)} cables)")


if __name__ == "__main__":
    main()
