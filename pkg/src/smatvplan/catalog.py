"""Equipment catalog: component and cable specifications.

A component spec declares ports (direction, supported lines, role),
frequency-dependent gain transfers between ports, discrete gain
regulators, and ratings (maximum total output power, tap isolation).
Specs are immutable data; placing one in a network goes through
instantiate(), which snapshots the chosen regulator indices.

Cable attenuation follows the usual coaxial skin-effect model
A(f) = a + b*sqrt(f) in dB per 100 m, fitted through the anchor points
of the spec (least squares when more than two anchors are given).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Mapping

import numpy as np

from .errors import FrequencyOutOfRange, RegulatorIndexOutOfRange, UnknownComponent
from .model import (
    ALL_LINES,
    Band,
    SignalLine,
    band_of_frequency,
    check_frequency_mhz,
)


class PortDirection(enum.Enum):
    IN = "in"
    OUT = "out"


class PortRole(enum.Enum):
    TRUNK = "trunk"
    SUBSCRIBER = "subscriber"
    TERRESTRIAL = "terrestrial"
    SAT_INPUT = "sat_input"


class ComponentClass(enum.Enum):
    MULTISWITCH_CASCADABLE = "multiswitch_cascadable"
    MULTISWITCH_TERMINAL = "multiswitch_terminal"
    MULTISWITCH_RADIAL = "multiswitch_radial"
    TAP = "tap"
    SPLITTER = "splitter"
    AMPLIFIER = "amplifier"
    ATTENUATOR = "attenuator"
    OUTLET = "outlet"
    HEADEND_IF_IF = "headend_if_if"

MAX_RADIAL_SUBSCRIBER_PORTS = 16


@dataclass(frozen=True)
class PortSpec:
    id: str
    direction: PortDirection
    lines: frozenset[SignalLine]
    role: PortRole


@dataclass(frozen=True)
class GainCurve:
    """Piecewise-linear gain over frequency anchors, dB (loss negative)."""

    anchors_mhz_db: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.anchors_mhz_db:
            raise ValueError("gain curve needs at least one anchor")
        prev = None
        for f, _g in self.anchors_mhz_db:
            check_frequency_mhz(f)
            if prev is not None and f <= prev:
                raise ValueError("gain curve anchors must be strictly increasing")
            prev = f

    @classmethod
    def flat(cls, gain_db: float, band: Band) -> "GainCurve":
        lo, hi = band.range_mhz
        return cls(((lo, float(gain_db)), (hi, float(gain_db))))

    def sample(self, freqs_mhz) -> np.ndarray:
        freqs = np.asarray(freqs_mhz, dtype=float)
        xs = [f for f, _ in self.anchors_mhz_db]
        ys = [g for _, g in self.anchors_mhz_db]
        return np.interp(freqs, xs, ys)

    def spans(self, band: Band) -> bool:
        lo, hi = band.range_mhz
        return self.anchors_mhz_db[0][0] <= lo and self.anchors_mhz_db[-1][0] >= hi


@dataclass(frozen=True)
class GainRegulator:
    """A discrete gain control: strictly increasing dB positions."""

    positions_db: tuple[float, ...]
    current_index: int

    def __post_init__(self):
        if not self.positions_db:
            raise ValueError("regulator needs at least one position")
        prev = None
        for p in self.positions_db:
            if prev is not None and p <= prev:
                raise ValueError("regulator positions must be strictly increasing")
            prev = p
        if not 0 <= self.current_index < len(self.positions_db):
            raise RegulatorIndexOutOfRange(
                f"index {self.current_index} outside 0..{len(self.positions_db) - 1}"
            )

    def offset_db(self, index: int | None = None) -> float:
        i = self.current_index if index is None else index
        if not 0 <= i < len(self.positions_db):
            raise RegulatorIndexOutOfRange(
                f"index {i} outside 0..{len(self.positions_db) - 1}"
            )
        return self.positions_db[i]


@dataclass(frozen=True)
class TransferEntry:
    """Gain from one in-port to one out-port for a set of lines.

    Active transfers amplify and therefore add noise; they must carry a
    noise figure. A transfer may name one of the component's regulators,
    whose position offset is added flat across frequency on top of the
    base curves.
    """

    from_port: str
    to_port: str
    curves: Mapping[SignalLine, GainCurve]
    active: bool = False
    noise_figure_db: float | None = None
    regulator: str | None = None

    def __post_init__(self):
        if not self.curves:
            raise ValueError("transfer carries no lines")
        if self.active and self.noise_figure_db is None:
            raise ValueError("active transfer needs a noise figure")
        if self.noise_figure_db is not None and self.noise_figure_db < 0:
            raise ValueError("noise figure must be >= 0 dB")


@dataclass(frozen=True)
class ComponentSpec:
    id: str
    kind: ComponentClass
    ports: tuple[PortSpec, ...]
    transfers: tuple[TransferEntry, ...]
    regulators: Mapping[str, GainRegulator] = field(default_factory=dict)
    max_output_power_dbm: float | None = None
    tap_isolation_db: float | None = None
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        ports = {}
        for p in self.ports:
            if p.id in ports:
                raise ValueError(f"{self.id}: duplicate port id {p.id!r}")
            ports[p.id] = p
        for t in self.transfers:
            src = ports.get(t.from_port)
            dst = ports.get(t.to_port)
            if src is None or dst is None:
                raise ValueError(
                    f"{self.id}: transfer references unknown port "
                    f"{t.from_port!r} or {t.to_port!r}"
                )
            if src.direction is not PortDirection.IN or dst.direction is not PortDirection.OUT:
                raise ValueError(
                    f"{self.id}: transfer must run from an in-port to an out-port"
                )
            for line, curve in t.curves.items():
                if line not in src.lines or line not in dst.lines:
                    raise ValueError(
                        f"{self.id}: transfer carries {line.value} unsupported by its ports"
                    )
                if not curve.spans(line.band):
                    raise ValueError(
                        f"{self.id}: curve for {line.value} does not span the "
                        f"{line.band.value} band"
                    )
            if t.regulator is not None and t.regulator not in self.regulators:
                raise ValueError(f"{self.id}: unknown regulator {t.regulator!r}")

        if self.kind is ComponentClass.MULTISWITCH_CASCADABLE:
            lines_in = frozenset().union(
                *(p.lines for p in self.ports if p.direction is PortDirection.IN)
            )
            trunk_out = frozenset().union(
                *(
                    p.lines
                    for p in self.ports
                    if p.direction is PortDirection.OUT and p.role is PortRole.TRUNK
                ),
                frozenset(),
            )
            if lines_in != trunk_out:
                raise ValueError(
                    f"{self.id}: cascadable multiswitch must pass every input line "
                    "through to its trunk outputs"
                )
        if self.kind is ComponentClass.MULTISWITCH_TERMINAL:
            if any(
                p.direction is PortDirection.OUT and p.role is PortRole.TRUNK
                for p in self.ports
            ):
                raise ValueError(f"{self.id}: terminal multiswitch has a trunk output")
        if self.kind is ComponentClass.MULTISWITCH_RADIAL:
            n_sub = sum(
                1
                for p in self.ports
                if p.direction is PortDirection.OUT and p.role is PortRole.SUBSCRIBER
            )
            if n_sub > MAX_RADIAL_SUBSCRIBER_PORTS:
                raise ValueError(
                    f"{self.id}: radial multiswitch limited to "
                    f"{MAX_RADIAL_SUBSCRIBER_PORTS} subscriber ports, has {n_sub}"
                )

    def port(self, port_id: str) -> PortSpec:
        for p in self.ports:
            if p.id == port_id:
                return p
        raise KeyError(port_id)


@dataclass(frozen=True)
class CableSpec:
    """Coaxial cable attenuation spec, anchors in dB/100 m.

    Two anchors determine the a + b*sqrt(f) model exactly; more are fitted
    by least squares. Attenuation must come out positive and non-decreasing
    over frequency (b >= 0).
    """

    id: str
    anchors_mhz_db_per_100m: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.anchors_mhz_db_per_100m) < 2:
            raise ValueError(f"cable {self.id}: need at least two anchors")
        prev = None
        for f, a in self.anchors_mhz_db_per_100m:
            check_frequency_mhz(f)
            if a <= 0:
                raise ValueError(f"cable {self.id}: attenuation must be positive")
            if prev is not None and f <= prev:
                raise ValueError(f"cable {self.id}: anchors must be strictly increasing")
            prev = f
        a, b = self.model_coefficients
        if b < 0:
            raise ValueError(f"cable {self.id}: attenuation must be non-decreasing over f")
        for f in (1.0, 47.0, 2150.0, 3000.0):
            if a + b * np.sqrt(f) <= 0:
                raise ValueError(f"cable {self.id}: model non-positive at {f} MHz")

    @cached_property
    def model_coefficients(self) -> tuple[float, float]:
        """(a, b) of A(f) = a + b*sqrt(f), least-squares over the anchors."""
        fs = np.array([f for f, _ in self.anchors_mhz_db_per_100m], dtype=float)
        ys = np.array([a for _, a in self.anchors_mhz_db_per_100m], dtype=float)
        design = np.column_stack([np.ones_like(fs), np.sqrt(fs)])
        coeff, *_ = np.linalg.lstsq(design, ys, rcond=None)
        return float(coeff[0]), float(coeff[1])

    def db_per_100m(self, freqs_mhz) -> np.ndarray:
        a, b = self.model_coefficients
        freqs = np.asarray(freqs_mhz, dtype=float)
        return a + b * np.sqrt(freqs)


def cable_attenuation(cable: CableSpec, f_mhz: float, length_m: float) -> float:
    """Gain (<= 0 dB) of *length_m* meters of cable at *f_mhz*."""
    if band_of_frequency(f_mhz) is None:
        raise FrequencyOutOfRange(f"{f_mhz} MHz lies outside every supported band")
    if length_m < 0:
        raise ValueError("cable length must be >= 0")
    return -length_m / 100.0 * float(cable.db_per_100m(f_mhz))


@dataclass(frozen=True)
class Catalog:
    components: Mapping[str, ComponentSpec]
    cables: Mapping[str, CableSpec]

    def component(self, component_id: str) -> ComponentSpec:
        try:
            return self.components[component_id]
        except KeyError:
            raise UnknownComponent(f"no component {component_id!r} in catalog") from None

    def cable(self, cable_id: str) -> CableSpec:
        try:
            return self.cables[cable_id]
        except KeyError:
            raise UnknownComponent(f"no cable {cable_id!r} in catalog") from None


@dataclass(frozen=True)
class ComponentInstance:
    """A spec plus the regulator indices chosen for one placement."""

    spec: ComponentSpec
    regulator_indices: Mapping[str, int]

    def regulator_offset_db(self, group: str, index: int | None = None) -> float:
        reg = self.spec.regulators[group]
        return reg.offset_db(self.regulator_indices[group] if index is None else index)

    def effective_gain(
        self,
        from_port: str,
        to_port: str,
        line: SignalLine,
        freqs_mhz,
        regulator_indices: Mapping[str, int] | None = None,
    ) -> np.ndarray:
        """Sampled gain of a transfer with the regulator offset applied."""
        for t in self.spec.transfers:
            if t.from_port == from_port and t.to_port == to_port and line in t.curves:
                gains = t.curves[line].sample(freqs_mhz)
                if t.regulator is not None:
                    idx = None
                    if regulator_indices is not None and t.regulator in regulator_indices:
                        idx = regulator_indices[t.regulator]
                    gains = gains + self.regulator_offset_db(t.regulator, idx)
                return gains
        raise KeyError(f"no transfer {from_port!r}->{to_port!r} for line {line.value}")


def instantiate(
    catalog: Catalog,
    component_id: str,
    regulator_indices: Mapping[str, int] | None = None,
) -> ComponentInstance:
    """Place a catalog component, validating the chosen regulator indices.

    Indices omitted from *regulator_indices* keep the spec defaults.
    """
    spec = catalog.component(component_id)
    chosen: dict[str, int] = {}
    given = dict(regulator_indices or {})
    for group, reg in spec.regulators.items():
        idx = given.pop(group, reg.current_index)
        if not isinstance(idx, int) or not 0 <= idx < len(reg.positions_db):
            raise RegulatorIndexOutOfRange(
                f"{component_id}.{group}: index {idx!r} outside "
                f"0..{len(reg.positions_db) - 1}"
            )
        chosen[group] = idx
    if given:
        raise RegulatorIndexOutOfRange(
            f"{component_id}: unknown regulator group(s) {sorted(given)}"
        )
    return ComponentInstance(spec=spec, regulator_indices=chosen)


# ---------------------------------------------------------------------------
# Catalog <-> plain-dict codec (shared by the file format in smatvplan.netio)
# ---------------------------------------------------------------------------

_LINE_SET_ALL = "all"
_LINE_SET_SAT = "sat"


def _lines_to_json(lines: frozenset[SignalLine]):
    if lines == ALL_LINES:
        return _LINE_SET_ALL
    from .model import SAT_LINES

    if lines == SAT_LINES:
        return _LINE_SET_SAT
    return sorted(l.value for l in lines)


def _lines_from_json(value, path: str) -> frozenset[SignalLine]:
    from .errors import SchemaError
    from .model import SAT_LINES

    if value == _LINE_SET_ALL:
        return ALL_LINES
    if value == _LINE_SET_SAT:
        return SAT_LINES
    if not isinstance(value, list):
        raise SchemaError("expected 'all', 'sat' or a list of line names", path)
    out = set()
    for i, name in enumerate(value):
        try:
            out.add(SignalLine(name))
        except ValueError:
            raise SchemaError(f"unknown signal line {name!r}", f"{path}[{i}]") from None
    return frozenset(out)


def _curve_to_json(curve: GainCurve):
    return [[f, g] for f, g in curve.anchors_mhz_db]


def _require_keys(obj: dict, required: set, optional: set, path: str):
    from .errors import SchemaError

    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    unknown = set(obj) - required - optional
    if unknown:
        raise SchemaError(f"unknown key(s) {sorted(unknown)}", path)
    missing = required - set(obj)
    if missing:
        raise SchemaError(f"missing required key(s) {sorted(missing)}", path)


def catalog_to_dict(catalog: Catalog) -> dict:
    components = []
    for spec in sorted(catalog.components.values(), key=lambda s: s.id):
        entry: dict = {
            "id": spec.id,
            "class": spec.kind.value,
            "ports": [
                {
                    "id": p.id,
                    "direction": p.direction.value,
                    "lines": _lines_to_json(p.lines),
                    "role": p.role.value,
                }
                for p in spec.ports
            ],
            "transfers": [],
        }
        for t in spec.transfers:
            tj: dict = {
                "from": t.from_port,
                "to": t.to_port,
                "gain_db": {
                    line.value: _curve_to_json(curve)
                    for line, curve in sorted(t.curves.items(), key=lambda kv: kv[0].value)
                },
                "active": t.active,
            }
            if t.noise_figure_db is not None:
                tj["noise_figure_db"] = t.noise_figure_db
            if t.regulator is not None:
                tj["regulator"] = t.regulator
            entry["transfers"].append(tj)
        if spec.regulators:
            entry["regulators"] = {
                group: {"positions_db": list(reg.positions_db), "index": reg.current_index}
                for group, reg in sorted(spec.regulators.items())
            }
        if spec.max_output_power_dbm is not None:
            entry["max_output_power_dbm"] = spec.max_output_power_dbm
        if spec.tap_isolation_db is not None:
            entry["tap_isolation_db"] = spec.tap_isolation_db
        if spec.metadata:
            entry["metadata"] = dict(spec.metadata)
        components.append(entry)
    cables = [
        {"id": c.id, "attenuation_db_per_100m": [[f, a] for f, a in c.anchors_mhz_db_per_100m]}
        for c in sorted(catalog.cables.values(), key=lambda c: c.id)
    ]
    return {"format_version": 1, "components": components, "cables": cables}


def _parse_curve(value, path: str) -> GainCurve:
    from .errors import SchemaError

    if not isinstance(value, list) or not all(
        isinstance(p, list) and len(p) == 2 for p in value
    ):
        raise SchemaError("expected a list of [freq_mhz, gain_db] pairs", path)
    try:
        return GainCurve(tuple((float(f), float(g)) for f, g in value))
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc), path) from None


def catalog_from_dict(doc: dict) -> Catalog:
    from .errors import SchemaError

    _require_keys(doc, {"format_version", "components", "cables"}, set(), "$")
    if doc["format_version"] != 1:
        raise SchemaError(f"unsupported format_version {doc['format_version']!r}", "$.format_version")

    components: dict[str, ComponentSpec] = {}
    if not isinstance(doc["components"], list):
        raise SchemaError("expected a list", "$.components")
    for ci, cj in enumerate(doc["components"]):
        path = f"$.components[{ci}]"
        _require_keys(
            cj,
            {"id", "class", "ports", "transfers"},
            {"regulators", "max_output_power_dbm", "tap_isolation_db", "metadata"},
            path,
        )
        try:
            kind = ComponentClass(cj["class"])
        except ValueError:
            raise SchemaError(f"unknown component class {cj['class']!r}", f"{path}.class") from None
        ports = []
        for pi, pj in enumerate(cj["ports"]):
            ppath = f"{path}.ports[{pi}]"
            _require_keys(pj, {"id", "direction", "lines", "role"}, set(), ppath)
            try:
                direction = PortDirection(pj["direction"])
                role = PortRole(pj["role"])
            except ValueError as exc:
                raise SchemaError(str(exc), ppath) from None
            ports.append(
                PortSpec(str(pj["id"]), direction, _lines_from_json(pj["lines"], f"{ppath}.lines"), role)
            )
        transfers = []
        for ti, tj in enumerate(cj["transfers"]):
            tpath = f"{path}.transfers[{ti}]"
            _require_keys(
                tj,
                {"from", "to", "gain_db"},
                {"active", "noise_figure_db", "regulator"},
                tpath,
            )
            curves = {}
            if not isinstance(tj["gain_db"], dict):
                raise SchemaError("expected an object of line -> anchors", f"{tpath}.gain_db")
            for lname, cv in tj["gain_db"].items():
                try:
                    line = SignalLine(lname)
                except ValueError:
                    raise SchemaError(f"unknown signal line {lname!r}", f"{tpath}.gain_db") from None
                curves[line] = _parse_curve(cv, f"{tpath}.gain_db.{lname}")
            try:
                transfers.append(
                    TransferEntry(
                        from_port=str(tj["from"]),
                        to_port=str(tj["to"]),
                        curves=curves,
                        active=bool(tj.get("active", False)),
                        noise_figure_db=(
                            float(tj["noise_figure_db"]) if "noise_figure_db" in tj else None
                        ),
                        regulator=tj.get("regulator"),
                    )
                )
            except ValueError as exc:
                raise SchemaError(str(exc), tpath) from None
        regulators = {}
        for group, rj in (cj.get("regulators") or {}).items():
            rpath = f"{path}.regulators.{group}"
            _require_keys(rj, {"positions_db", "index"}, set(), rpath)
            try:
                regulators[group] = GainRegulator(
                    tuple(float(p) for p in rj["positions_db"]), int(rj["index"])
                )
            except (ValueError, RegulatorIndexOutOfRange) as exc:
                raise SchemaError(str(exc), rpath) from None
        try:
            spec = ComponentSpec(
                id=str(cj["id"]),
                kind=kind,
                ports=tuple(ports),
                transfers=tuple(transfers),
                regulators=regulators,
                max_output_power_dbm=(
                    float(cj["max_output_power_dbm"]) if "max_output_power_dbm" in cj else None
                ),
                tap_isolation_db=(
                    float(cj["tap_isolation_db"]) if "tap_isolation_db" in cj else None
                ),
                metadata=cj.get("metadata", {}),
            )
        except ValueError as exc:
            raise SchemaError(str(exc), path) from None
        if spec.id in components:
            raise SchemaError(f"duplicate component id {spec.id!r}", path)
        components[spec.id] = spec

    cables: dict[str, CableSpec] = {}
    if not isinstance(doc["cables"], list):
        raise SchemaError("expected a list", "$.cables")
    for ci, cj in enumerate(doc["cables"]):
        path = f"$.cables[{ci}]"
        _require_keys(cj, {"id", "attenuation_db_per_100m"}, set(), path)
        aj = cj["attenuation_db_per_100m"]
        if not isinstance(aj, list) or not all(isinstance(p, list) and len(p) == 2 for p in aj):
            raise SchemaError(
                "expected a list of [freq_mhz, db_per_100m] pairs",
                f"{path}.attenuation_db_per_100m",
            )
        try:
            cable = CableSpec(str(cj["id"]), tuple((float(f), float(a)) for f, a in aj))
        except ValueError as exc:
            raise SchemaError(str(exc), path) from None
        if cable.id in cables:
            raise SchemaError(f"duplicate cable id {cable.id!r}", path)
        cables[cable.id] = cable

    return Catalog(components=components, cables=cables)


_BUILTIN: Catalog | None = None


def builtin_catalog() -> Catalog:
    """The bundled catalog of representative parts (loaded once)."""
    global _BUILTIN
    if _BUILTIN is None:
        text = resources.files("smatvplan.data").joinpath("builtin_catalog.json").read_text()
        _BUILTIN = catalog_from_dict(json.loads(text))
    return _BUILTIN
