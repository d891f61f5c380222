"""Signal-level and carrier-to-noise propagation.

Levels are plain dB sums along the unique source-to-output path of each
line, evaluated on the network's frequency grid. Two evaluation routes
share one compiled form of the network:

* propagate() walks every path hop by hop and keeps the full trace
  (level after every cable and transfer), which costs little once per
  network and is what reports and the HTTP trace endpoint show.
* compile_network() flattens the same paths into arrays where regulator
  positions and source trims enter as flat additive knobs. Sweeps and
  the gain optimizer re-evaluate those arrays thousands of times through
  a small kernel (compiled extension when built, numpy fallback
  otherwise) without touching the graph again.

Carrier-to-noise is tracked per (output, line): the source C/N combines
with one contribution per active stage on the path, each worth its input
level minus its noise figure, all summed as noise powers. A line whose
source declares no C/N stays unconstrained.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .catalog import ComponentInstance
from .errors import AmbiguousPath, InvalidNetwork, NotReachable, RegulatorIndexOutOfRange
from .model import (
    ComponentNode,
    Network,
    PathHop,
    Scenario,
    SignalLine,
    SourceNode,
    line_path,
    validate_network,
)

if os.environ.get("SMATVPLAN_PURE_PYTHON"):
    from . import _kernel_py as _kernel_mod

    KERNEL_BACKEND = "python"
else:
    try:
        from . import _kernel as _kernel_mod  # type: ignore[attr-defined]

        KERNEL_BACKEND = "cython"
    except ImportError:
        from . import _kernel_py as _kernel_mod

        KERNEL_BACKEND = "python"


def kernel_backend() -> str:
    """Which kernel evaluates compiled networks: 'cython' or 'python'."""
    return KERNEL_BACKEND


# 0 dBm across 75 ohm corresponds to 108.75 dBuV (1 mW -> 273.86 mV).
DBM_TO_DBUV_75_OHM = 108.75


def power_to_level(power_dbm: float, n_channels: int = 1) -> float:
    """Per-channel level (dBuV) when *n_channels* share *power_dbm* total.

    The rated output power of an amplifier is a total across everything it
    carries, so the allowed per-channel level drops by 10*log10(N).
    """
    if not isinstance(n_channels, int) or n_channels < 1:
        raise ValueError(f"channel count must be a positive integer, got {n_channels!r}")
    return float(power_dbm) + DBM_TO_DBUV_75_OHM - 10.0 * math.log10(n_channels)


def level_to_power(level_dbuv: float, n_channels: int = 1) -> float:
    """Total power (dBm) of *n_channels* all at *level_dbuv*. Inverse of
    power_to_level."""
    if not isinstance(n_channels, int) or n_channels < 1:
        raise ValueError(f"channel count must be a positive integer, got {n_channels!r}")
    return float(level_dbuv) - DBM_TO_DBUV_75_OHM + 10.0 * math.log10(n_channels)


def sum_channel_power_dbm(levels_dbuv: Iterable[float]) -> float:
    """Total power (dBm) of channels at the given individual levels."""
    acc = 0.0
    n = 0
    for u in levels_dbuv:
        acc += 10.0 ** ((float(u) - DBM_TO_DBUV_75_OHM) / 10.0)
        n += 1
    if n == 0:
        raise ValueError("need at least one channel level")
    return 10.0 * math.log10(acc)


def cascade_cnr(
    cn_in_db: float,
    n_amplifiers: int,
    u_out_dbuv: float,
    k_dbuv: float,
    noise_figure_db: float,
) -> float:
    """C/N after *n_amplifiers* identical stages, each delivering
    *u_out_dbuv* per channel with noise figure *noise_figure_db*, against
    the noise floor reference *k_dbuv*.

    The incoming carrier-to-noise cn_in_db and the cascade's own
    contribution (u_out - k - f, shared equally so reduced by
    10*log10(n)) add as noise powers.
    """
    if not isinstance(n_amplifiers, int) or n_amplifiers < 0:
        raise ValueError(f"amplifier count must be a non-negative integer, got {n_amplifiers!r}")
    if n_amplifiers == 0:
        return float(cn_in_db)
    cascade_cn = u_out_dbuv - k_dbuv - noise_figure_db - 10.0 * math.log10(n_amplifiers)
    return -10.0 * math.log10(
        10.0 ** (-cn_in_db / 10.0) + 10.0 ** (-cascade_cn / 10.0)
    )


def combine_cnr(values_db: Iterable[float | None]) -> float | None:
    """Combine independent C/N contributions by noise-power addition.

    None entries are unconstrained contributions (no noise) and are
    skipped; if every entry is None the result is None as well.
    """
    acc = 0.0
    seen = False
    for v in values_db:
        if v is None:
            continue
        acc += 10.0 ** (-float(v) / 10.0)
        seen = True
    if not seen:
        return None
    return -10.0 * math.log10(acc)


# ---------------------------------------------------------------------------
# Knobs: everything a scenario can change, as flat additive dB offsets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegulatorKnob:
    node_id: str
    group: str
    positions_db: tuple[float, ...]
    default_index: int


@dataclass(frozen=True)
class TrimKnob:
    source_id: str
    line: SignalLine


def _resolve_regulator_index(knob: RegulatorKnob, scenario: Scenario | None) -> int:
    idx = knob.default_index
    if scenario is not None:
        override = scenario.regulator_index(knob.node_id, knob.group)
        if override is not None:
            idx = override
    if not 0 <= idx < len(knob.positions_db):
        raise RegulatorIndexOutOfRange(
            f"{knob.node_id}.{knob.group}: index {idx} outside 0..{len(knob.positions_db) - 1}"
        )
    return idx


# ---------------------------------------------------------------------------
# Compiled form
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CompiledNetwork:
    """Flattened per-(output, line) arrays for kernel evaluation.

    Row j covers one (output, line) pair on that line's frequency grid:
    level = src (or a sweep override) + base + sum of its knob values.
    Stages are the active transfers (deduplicated per port and line)
    whose input levels feed the C/N noise sum of the rows behind them.
    """

    network: Network
    output_ids: tuple[str, ...]
    output_missing_required: np.ndarray  # bool per output
    knobs: tuple[RegulatorKnob | TrimKnob, ...]

    row_output: np.ndarray  # int64, index into output_ids
    row_lines: tuple[SignalLine, ...]
    row_is_terr: np.ndarray  # bool
    row_ptr: np.ndarray  # int64, len n_rows + 1
    base: np.ndarray  # float64, flattened over rows
    src: np.ndarray  # float64, flattened over rows
    kptr: np.ndarray  # int64, len n_rows + 1
    kidx: np.ndarray  # int64
    has_cnr: np.ndarray  # uint8 per row
    src_cn_pow: np.ndarray  # float64 per row

    rs_ptr: np.ndarray  # int64, len n_rows + 1
    rs_idx: np.ndarray  # int64, stage index per (row, stage) pair
    stage_lines: tuple[SignalLine, ...]
    stage_ptr: np.ndarray  # int64, len n_stages + 1
    stage_base: np.ndarray  # float64, flattened over stages
    stage_src: np.ndarray  # float64
    skptr: np.ndarray  # int64, len n_stages + 1
    skidx: np.ndarray  # int64
    stage_nf: np.ndarray  # float64 per stage

    @property
    def n_rows(self) -> int:
        return len(self.row_lines)

    @property
    def n_stages(self) -> int:
        return len(self.stage_lines)

    @cached_property
    def regulator_knobs(self) -> tuple[tuple[int, RegulatorKnob], ...]:
        return tuple(
            (i, k) for i, k in enumerate(self.knobs) if isinstance(k, RegulatorKnob)
        )

    @cached_property
    def _row_line_mask(self) -> Mapping[SignalLine, np.ndarray]:
        return {
            line: np.array([l is line for l in self.row_lines], dtype=bool)
            for line in SignalLine
        }

    @cached_property
    def _stage_line_mask(self) -> Mapping[SignalLine, np.ndarray]:
        return {
            line: np.array([l is line for l in self.stage_lines], dtype=bool)
            for line in SignalLine
        }

    def knob_values(
        self, scenario: Scenario | None, *, zero_trim_line: SignalLine | None = None
    ) -> np.ndarray:
        """Knob vector for a scenario; regulator values are the absolute
        position offsets, trims the scenario's dB trims (forced to zero
        for *zero_trim_line*, which level sweeps use)."""
        vals = np.zeros(len(self.knobs), dtype=np.float64)
        for i, knob in enumerate(self.knobs):
            if isinstance(knob, RegulatorKnob):
                vals[i] = knob.positions_db[_resolve_regulator_index(knob, scenario)]
            else:
                if zero_trim_line is not None and knob.line is zero_trim_line:
                    vals[i] = 0.0
                elif scenario is not None:
                    vals[i] = scenario.trim_db(knob.source_id, knob.line)
        return vals

    def evaluate(
        self,
        knob_values: np.ndarray,
        *,
        override_line: SignalLine | None = None,
        override_level_dbuv: float = math.nan,
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-row (min level, max level, min C/N) for a knob vector.

        With *override_line* set, every source spectrum on that line is
        replaced by a flat *override_level_dbuv*. Rows without a C/N
        constraint report +inf.
        """
        n = self.n_rows
        row_override = np.full(n, math.nan, dtype=np.float64)
        stage_override = np.full(self.n_stages, math.nan, dtype=np.float64)
        if override_line is not None:
            row_override[self._row_line_mask[override_line]] = override_level_dbuv
            stage_override[self._stage_line_mask[override_line]] = override_level_dbuv
        out_min = np.empty(n, dtype=np.float64)
        out_max = np.empty(n, dtype=np.float64)
        out_cnr = np.empty(n, dtype=np.float64)
        _kernel_mod.evaluate(
            self.row_ptr,
            self.base,
            self.src,
            self.kptr,
            self.kidx,
            self.has_cnr,
            self.src_cn_pow,
            self.rs_ptr,
            self.rs_idx,
            self.stage_ptr,
            self.stage_base,
            self.stage_src,
            self.skptr,
            self.skidx,
            self.stage_nf,
            np.asarray(knob_values, dtype=np.float64),
            row_override,
            stage_override,
            out_min,
            out_max,
            out_cnr,
        )
        return out_min, out_max, out_cnr


def _raise_on_errors(net: Network) -> None:
    diagnostics = validate_network(net)
    errors = tuple(d for d in diagnostics if d.severity == "error")
    if errors:
        raise InvalidNetwork(
            f"network failed validation with {len(errors)} error(s)", errors
        )


def compile_network(net: Network) -> CompiledNetwork:
    """Flatten a validated network into kernel arrays (see CompiledNetwork)."""
    _raise_on_errors(net)

    knobs: list[RegulatorKnob | TrimKnob] = []
    knob_index: dict[object, int] = {}
    for n in net.nodes:
        if isinstance(n, ComponentNode):
            for group in sorted(n.instance.spec.regulators):
                reg = n.instance.spec.regulators[group]
                knob = RegulatorKnob(
                    n.id, group, reg.positions_db, n.instance.regulator_indices[group]
                )
                knob_index[("reg", n.id, group)] = len(knobs)
                knobs.append(knob)
        elif isinstance(n, SourceNode):
            for line in sorted(n.lines, key=lambda l: l.value):
                knob_index[("trim", n.id, line)] = len(knobs)
                knobs.append(TrimKnob(n.id, line))

    output_ids: list[str] = []
    missing_required: list[bool] = []
    row_output: list[int] = []
    row_lines: list[SignalLine] = []
    row_is_terr: list[bool] = []
    row_ptr = [0]
    base_parts: list[np.ndarray] = []
    src_parts: list[np.ndarray] = []
    kptr = [0]
    kidx: list[int] = []
    has_cnr: list[int] = []
    src_cn_pow: list[float] = []
    rs_ptr = [0]
    rs_idx: list[int] = []

    stage_key_index: dict[tuple[str, str, str, SignalLine], int] = {}
    stage_lines: list[SignalLine] = []
    stage_ptr = [0]
    stage_base_parts: list[np.ndarray] = []
    stage_src_parts: list[np.ndarray] = []
    skptr = [0]
    skidx: list[int] = []
    stage_nf: list[float] = []

    for out_node in net.outputs:
        oi = len(output_ids)
        output_ids.append(out_node.id)
        reachable: list[tuple[SignalLine, tuple[PathHop, ...]]] = []
        for line in sorted(SignalLine, key=lambda l: l.value):
            try:
                reachable.append((line, line_path(net, out_node.id, line)))
            except (NotReachable, AmbiguousPath):
                continue
        present = {line for line, _ in reachable}
        missing_required.append(not out_node.kind.required_lines <= present)

        for line, hops in reachable:
            freqs = np.asarray(net.grid.for_line(line), dtype=np.float64)
            source = net.node_map[hops[0].node_id]
            assert isinstance(source, SourceNode)
            src_arr = np.asarray(source.spectra[line].sample(freqs), dtype=np.float64)
            base_arr = np.zeros_like(freqs)
            row_knobs: list[int] = [knob_index[("trim", source.id, line)]]
            row_stages: list[int] = []
            cnr = source.cnr_db.get(line)

            for hi, hop in enumerate(hops[:-1]):
                node = net.node_map[hop.node_id]
                if isinstance(node, ComponentNode):
                    inst = node.instance
                    transfer = _find_transfer(inst, hop.entry_port, hop.exit_port, line)
                    if transfer.active:
                        key = (node.id, hop.entry_port, hop.exit_port, line)
                        si = stage_key_index.get(key)
                        if si is None:
                            si = len(stage_lines)
                            stage_key_index[key] = si
                            stage_lines.append(line)
                            stage_base_parts.append(base_arr.copy())
                            stage_src_parts.append(src_arr)
                            stage_ptr.append(stage_ptr[-1] + freqs.size)
                            skidx.extend(row_knobs)
                            skptr.append(len(skidx))
                            stage_nf.append(float(transfer.noise_figure_db))
                        row_stages.append(si)
                    base_arr = base_arr + transfer.curves[line].sample(freqs)
                    if transfer.regulator is not None:
                        row_knobs.append(knob_index[("reg", node.id, transfer.regulator)])
                edge = net.edge_map[hop.edge_id]
                base_arr = base_arr - edge.length_m / 100.0 * edge.cable.db_per_100m(freqs)

            row_output.append(oi)
            row_lines.append(line)
            row_is_terr.append(line is SignalLine.TERR)
            row_ptr.append(row_ptr[-1] + freqs.size)
            base_parts.append(base_arr)
            src_parts.append(src_arr)
            kidx.extend(row_knobs)
            kptr.append(len(kidx))
            has_cnr.append(0 if cnr is None else 1)
            src_cn_pow.append(0.0 if cnr is None else 10.0 ** (-float(cnr) / 10.0))
            rs_idx.extend(row_stages)
            rs_ptr.append(len(rs_idx))

    def cat(parts: list[np.ndarray]) -> np.ndarray:
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.float64)

    return CompiledNetwork(
        network=net,
        output_ids=tuple(output_ids),
        output_missing_required=np.asarray(missing_required, dtype=bool),
        knobs=tuple(knobs),
        row_output=np.asarray(row_output, dtype=np.int64),
        row_lines=tuple(row_lines),
        row_is_terr=np.asarray(row_is_terr, dtype=bool),
        row_ptr=np.asarray(row_ptr, dtype=np.int64),
        base=cat(base_parts),
        src=cat(src_parts),
        kptr=np.asarray(kptr, dtype=np.int64),
        kidx=np.asarray(kidx, dtype=np.int64),
        has_cnr=np.asarray(has_cnr, dtype=np.uint8),
        src_cn_pow=np.asarray(src_cn_pow, dtype=np.float64),
        rs_ptr=np.asarray(rs_ptr, dtype=np.int64),
        rs_idx=np.asarray(rs_idx, dtype=np.int64),
        stage_lines=tuple(stage_lines),
        stage_ptr=np.asarray(stage_ptr, dtype=np.int64),
        stage_base=cat(stage_base_parts),
        stage_src=cat(stage_src_parts),
        skptr=np.asarray(skptr, dtype=np.int64),
        skidx=np.asarray(skidx, dtype=np.int64),
        stage_nf=np.asarray(stage_nf, dtype=np.float64),
    )


def _find_transfer(inst: ComponentInstance, from_port: str, to_port: str, line: SignalLine):
    for t in inst.spec.transfers:
        if t.from_port == from_port and t.to_port == to_port and line in t.curves:
            return t
    raise KeyError(f"no transfer {from_port!r}->{to_port!r} for {line.value}")


# ---------------------------------------------------------------------------
# Full propagation with traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    """One hop of a line trace: the level array after applying the hop."""

    kind: str  # 'source' | 'transfer' | 'cable'
    subject: str  # node or edge id
    detail: str
    gain_db: np.ndarray | None
    level_dbuv: np.ndarray


@dataclass(frozen=True)
class LineTrace:
    output_id: str
    line: SignalLine
    freqs_mhz: np.ndarray
    levels_dbuv: np.ndarray
    cnr_db: np.ndarray | None
    steps: tuple[TraceStep, ...]

    @property
    def min_level(self) -> float:
        return float(self.levels_dbuv.min())

    @property
    def max_level(self) -> float:
        return float(self.levels_dbuv.max())

    @property
    def min_cnr(self) -> float | None:
        return None if self.cnr_db is None else float(self.cnr_db.min())


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Levels, C/N and traces of one propagation run."""

    network: Network
    scenario: Scenario
    traces: Mapping[tuple[str, SignalLine], LineTrace]
    port_levels: Mapping[tuple[str, str, SignalLine], np.ndarray]
    port_sources: Mapping[tuple[str, str, SignalLine], str]

    def lines_at(self, output_id: str) -> tuple[SignalLine, ...]:
        return tuple(
            line
            for (oid, line) in sorted(self.traces, key=lambda k: (k[0], k[1].value))
            if oid == output_id
        )

    def trace(self, output_id: str, line: SignalLine) -> LineTrace:
        return self.traces[(output_id, line)]

    def channel_levels_at(self, node_id: str, port_id: str):
        """Per-channel levels present at a component output port, as
        (channel, level_dbuv) pairs. Drives total-power accounting."""
        out = []
        for (nid, pid, line), levels in self.port_levels.items():
            if nid != node_id or pid != port_id:
                continue
            source = self.network.node_map[self.port_sources[(nid, pid, line)]]
            assert isinstance(source, SourceNode)
            freqs = np.asarray(self.network.grid.for_line(line), dtype=np.float64)
            for ch in source.plan.channels:
                if ch.line is line:
                    out.append((ch, float(np.interp(ch.center_mhz, freqs, levels))))
        out.sort(key=lambda pair: (pair[0].line.value, pair[0].center_mhz))
        return out


def propagate(net: Network, scenario: Scenario | None = None) -> SimulationResult:
    """Hop-by-hop propagation of every line to every output.

    Raises InvalidNetwork when structural validation reports errors.
    Regulator index overrides from the scenario are range-checked here.
    """
    _raise_on_errors(net)
    scenario = scenario or Scenario.empty()

    traces: dict[tuple[str, SignalLine], LineTrace] = {}
    port_levels: dict[tuple[str, str, SignalLine], np.ndarray] = {}
    port_sources: dict[tuple[str, str, SignalLine], str] = {}

    for out_node in net.outputs:
        for line in sorted(SignalLine, key=lambda l: l.value):
            try:
                hops = line_path(net, out_node.id, line)
            except (NotReachable, AmbiguousPath):
                continue
            freqs = np.asarray(net.grid.for_line(line), dtype=np.float64)
            source = net.node_map[hops[0].node_id]
            assert isinstance(source, SourceNode)
            trim = scenario.trim_db(source.id, line)
            levels = np.asarray(source.spectra[line].sample(freqs), dtype=np.float64) + trim
            steps = [
                TraceStep(
                    "source",
                    source.id,
                    f"port {hops[0].exit_port}, trim {trim:+.2f} dB",
                    None,
                    levels.copy(),
                )
            ]
            port_levels.setdefault((source.id, hops[0].exit_port, line), levels.copy())
            port_sources.setdefault((source.id, hops[0].exit_port, line), source.id)
            cnr = source.cnr_db.get(line)
            noise_pow = None if cnr is None else np.full_like(
                freqs, 10.0 ** (-float(cnr) / 10.0)
            )

            for hop in hops[:-1]:
                node = net.node_map[hop.node_id]
                if isinstance(node, ComponentNode):
                    inst = node.instance
                    transfer = _find_transfer(inst, hop.entry_port, hop.exit_port, line)
                    if transfer.active and noise_pow is not None:
                        # Stage noise rides the level at the amplifier
                        # input; the transfer's own regulator pads after
                        # amplification and does not change it.
                        noise_pow = noise_pow + 10.0 ** (
                            -(levels - transfer.noise_figure_db) / 10.0
                        )
                    overrides = dict(scenario.regulators.get(node.id, {}))
                    for group, idx in overrides.items():
                        if group not in inst.spec.regulators:
                            raise RegulatorIndexOutOfRange(
                                f"{node.id}: unknown regulator group {group!r}"
                            )
                        n_pos = len(inst.spec.regulators[group].positions_db)
                        if not isinstance(idx, int) or not 0 <= idx < n_pos:
                            raise RegulatorIndexOutOfRange(
                                f"{node.id}.{group}: index {idx!r} outside 0..{n_pos - 1}"
                            )
                    gain = inst.effective_gain(
                        hop.entry_port, hop.exit_port, line, freqs, overrides or None
                    )
                    levels = levels + gain
                    steps.append(
                        TraceStep(
                            "transfer",
                            node.id,
                            f"{hop.entry_port} -> {hop.exit_port}",
                            gain,
                            levels.copy(),
                        )
                    )
                    port_levels.setdefault((node.id, hop.exit_port, line), levels.copy())
                    port_sources.setdefault((node.id, hop.exit_port, line), source.id)
                edge = net.edge_map[hop.edge_id]
                gain = -edge.length_m / 100.0 * edge.cable.db_per_100m(freqs)
                levels = levels + gain
                steps.append(
                    TraceStep(
                        "cable",
                        edge.id,
                        f"{edge.cable.id}, {edge.length_m:g} m",
                        gain,
                        levels.copy(),
                    )
                )

            cnr_arr = None if noise_pow is None else -10.0 * np.log10(noise_pow)
            traces[(out_node.id, line)] = LineTrace(
                out_node.id, line, freqs, levels, cnr_arr, tuple(steps)
            )

    return SimulationResult(
        network=net,
        scenario=scenario,
        traces=traces,
        port_levels=port_levels,
        port_sources=port_sources,
    )
