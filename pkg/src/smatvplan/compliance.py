"""Compliance checking of propagation results against design constraints.

An output is compliant when, for every line that reaches it, the level
stays inside its band's window at every grid frequency and the C/N stays
above the band's floor (where tracked). An output missing one of its
kind's required lines can never be compliant.

Overload (total power at rated component outputs) and tap isolation are
installation-level checks kept separate from the per-output verdicts:
level sweeps and the gain optimizer count compliant outputs only, which
is also how acceptance tables for an installation are usually quoted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .engine import (
    SimulationResult,
    power_to_level,
    propagate,
    sum_channel_power_dbm,
)
from .model import (
    ComponentNode,
    DesignConstraints,
    Network,
    Scenario,
    SignalLine,
)


class ViolationKind(enum.Enum):
    LEVEL_LOW = "level_low"
    LEVEL_HIGH = "level_high"
    CNR_LOW = "cnr_low"
    OVERLOAD = "overload"
    ISOLATION = "isolation"


@dataclass(frozen=True)
class Violation:
    """One constraint breach. measured is None when the quantity does not
    exist at all (a required line that never arrives)."""

    kind: ViolationKind
    subject: str
    line: SignalLine | None
    frequency_mhz: float | None
    measured: float | None
    limit: float
    message: str

    def __str__(self):
        return f"{self.kind.value} @ {self.subject}: {self.message}"


@dataclass(frozen=True)
class OutputVerdict:
    output_id: str
    compliant: bool
    violations: tuple[Violation, ...]
    margin_db: float | None

    def __str__(self):
        state = "PASS" if self.compliant else "FAIL"
        margin = "n/a" if self.margin_db is None else f"{self.margin_db:+.2f} dB"
        return f"{self.output_id}: {state} (margin {margin})"


@dataclass(frozen=True)
class ComplianceReport:
    verdicts: tuple[OutputVerdict, ...]
    network_violations: tuple[Violation, ...] = ()

    @property
    def compliant_count(self) -> int:
        return sum(1 for v in self.verdicts if v.compliant)

    @property
    def total_outputs(self) -> int:
        return len(self.verdicts)

    @property
    def compliant(self) -> bool:
        return self.compliant_count == self.total_outputs and not self.network_violations

    @property
    def all_violations(self) -> tuple[Violation, ...]:
        out: list[Violation] = []
        for v in self.verdicts:
            out.extend(v.violations)
        out.extend(self.network_violations)
        return tuple(out)

    def verdict_for(self, output_id: str) -> OutputVerdict:
        for v in self.verdicts:
            if v.output_id == output_id:
                return v
        raise KeyError(output_id)


def check_outputs(
    result: SimulationResult, constraints: DesignConstraints | None = None
) -> ComplianceReport:
    """Per-output verdicts for a propagation result.

    The margin of an output is the smallest slack over all its lines,
    frequencies and constraint edges; negative once violated.
    """
    net = result.network
    cons = constraints or net.constraints
    verdicts: list[OutputVerdict] = []

    for out_node in net.outputs:
        violations: list[Violation] = []
        margin: float | None = None
        present: set[SignalLine] = set()

        for line in sorted(SignalLine, key=lambda l: l.value):
            trace = result.traces.get((out_node.id, line))
            if trace is None:
                continue
            present.add(line)
            lo, hi = cons.level_windows_dbuv[line.band]
            floor = cons.min_cnr_db.get(line.band)
            levels = trace.levels_dbuv
            freqs = trace.freqs_mhz

            i_min = int(np.argmin(levels))
            i_max = int(np.argmax(levels))
            slack = min(float(levels[i_min]) - lo, hi - float(levels[i_max]))
            if levels[i_min] < lo:
                violations.append(
                    Violation(
                        ViolationKind.LEVEL_LOW,
                        out_node.id,
                        line,
                        float(freqs[i_min]),
                        float(levels[i_min]),
                        lo,
                        f"{line.value} level {levels[i_min]:.2f} dBuV at "
                        f"{freqs[i_min]:.0f} MHz below {lo:.2f} dBuV",
                    )
                )
            if levels[i_max] > hi:
                violations.append(
                    Violation(
                        ViolationKind.LEVEL_HIGH,
                        out_node.id,
                        line,
                        float(freqs[i_max]),
                        float(levels[i_max]),
                        hi,
                        f"{line.value} level {levels[i_max]:.2f} dBuV at "
                        f"{freqs[i_max]:.0f} MHz above {hi:.2f} dBuV",
                    )
                )
            if floor is not None and trace.cnr_db is not None:
                i_cn = int(np.argmin(trace.cnr_db))
                cn = float(trace.cnr_db[i_cn])
                slack = min(slack, cn - floor)
                if cn < floor:
                    violations.append(
                        Violation(
                            ViolationKind.CNR_LOW,
                            out_node.id,
                            line,
                            float(freqs[i_cn]),
                            cn,
                            floor,
                            f"{line.value} C/N {cn:.2f} dB at {freqs[i_cn]:.0f} MHz "
                            f"below {floor:.2f} dB",
                        )
                    )
            margin = slack if margin is None else min(margin, slack)

        for line in sorted(out_node.kind.required_lines - present, key=lambda l: l.value):
            lo, _hi = cons.level_windows_dbuv[line.band]
            violations.append(
                Violation(
                    ViolationKind.LEVEL_LOW,
                    out_node.id,
                    line,
                    None,
                    None,
                    lo,
                    f"required line {line.value} does not reach this output",
                )
            )

        verdicts.append(
            OutputVerdict(
                output_id=out_node.id,
                compliant=not violations,
                violations=tuple(violations),
                margin_db=margin,
            )
        )

    return ComplianceReport(verdicts=tuple(verdicts))


def check_overload(
    result: SimulationResult, constraints: DesignConstraints | None = None
) -> tuple[Violation, ...]:
    """Total-power check at the outputs of rated components.

    Every channel of the headend plan present at a rated component's
    output port contributes its power; the sum must stay under the
    component's rating. With power derating disabled the check relaxes
    to each single channel staying under the rating by itself.
    """
    net = result.network
    cons = constraints or net.constraints
    violations: list[Violation] = []

    for node in net.nodes:
        if not isinstance(node, ComponentNode):
            continue
        rating = node.instance.spec.max_output_power_dbm
        if rating is None:
            continue
        ports = sorted({pid for (nid, pid, _l) in result.port_levels if nid == node.id})
        for port in ports:
            pairs = result.channel_levels_at(node.id, port)
            if not pairs:
                continue
            if cons.enforce_power_derating:
                total = sum_channel_power_dbm(level for _ch, level in pairs)
                if total > rating:
                    violations.append(
                        Violation(
                            ViolationKind.OVERLOAD,
                            f"{node.id}:{port}",
                            None,
                            None,
                            total,
                            rating,
                            f"total output power {total:.2f} dBm across {len(pairs)} "
                            f"channels exceeds the {rating:.2f} dBm rating",
                        )
                    )
            else:
                ch, level = max(pairs, key=lambda p: p[1])
                limit = power_to_level(rating, 1)
                if level > limit:
                    violations.append(
                        Violation(
                            ViolationKind.OVERLOAD,
                            f"{node.id}:{port}",
                            ch.line,
                            ch.center_mhz,
                            level,
                            limit,
                            f"channel at {ch.center_mhz:.2f} MHz reaches {level:.2f} "
                            f"dBuV, above the single-channel limit {limit:.2f} dBuV",
                        )
                    )
    return tuple(violations)


def check_isolation(
    net: Network,
    constraints: DesignConstraints | None = None,
    *,
    strict: bool = False,
) -> tuple[Violation, ...]:
    """Rated tap isolation of every multi-output component against the
    required minimum (the strict figure guards installations where
    several receivers share channels)."""
    cons = constraints or net.constraints
    limit = DesignConstraints.STRICT_ISOLATION_DB if strict else cons.min_tap_isolation_db
    violations: list[Violation] = []
    for node in net.nodes:
        if not isinstance(node, ComponentNode):
            continue
        spec = node.instance.spec
        if spec.tap_isolation_db is None:
            continue
        n_out = sum(1 for p in spec.ports if p.direction.value == "out")
        if n_out < 2:
            continue
        if spec.tap_isolation_db < limit:
            violations.append(
                Violation(
                    ViolationKind.ISOLATION,
                    node.id,
                    None,
                    None,
                    spec.tap_isolation_db,
                    limit,
                    f"{spec.id} provides {spec.tap_isolation_db:.0f} dB isolation, "
                    f"below the required {limit:.0f} dB",
                )
            )
    return tuple(violations)


def full_report(
    net: Network,
    scenario: Scenario | None = None,
    *,
    constraints: DesignConstraints | None = None,
    strict_isolation: bool = False,
    result: SimulationResult | None = None,
) -> ComplianceReport:
    """Propagate (unless a result is supplied) and run every check."""
    if result is None:
        result = propagate(net, scenario)
    outputs = check_outputs(result, constraints)
    network_violations = check_overload(result, constraints) + check_isolation(
        net, constraints, strict=strict_isolation
    )
    return ComplianceReport(
        verdicts=outputs.verdicts, network_violations=network_violations
    )
