"""Input-level sweeps and discrete gain optimization.

Both work on the compiled form of the network, so one compilation pays
for thousands of evaluations. The optimization objective is the pair
(compliant output count, total margin): margin is the sum over all
(output, line) rows of each row's smallest slack against its level
window and C/N floor, so among settings that pass the same number of
outputs the one sitting most comfortably inside the windows wins.

The search itself is deliberately simple. The knob space is a product of
small discrete regulator ranges: exhaustive enumeration when that space
fits the evaluation budget, otherwise coordinate descent (locally
optimal per knob, repeated to a fixed point) with seeded random restarts
until the budget runs out. Results are deterministic for a given seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .compliance import ComplianceReport, check_outputs
from .engine import CompiledNetwork, RegulatorKnob, compile_network, propagate
from .errors import NoRegulators
from .model import DesignConstraints, Network, Scenario, SignalLine

__all__ = [
    "Scenario",
    "SweepPoint",
    "SweepResult",
    "OptimizeResult",
    "KnobSensitivity",
    "sweep_input_level",
    "optimize_gains",
    "sensitivity",
]


def _row_limits(compiled: CompiledNetwork, cons: DesignConstraints):
    """Per-row (lo, hi, cnr_floor) arrays; floor is NaN when unconstrained."""
    from .model import Band

    lo_t, hi_t = cons.level_windows_dbuv[Band.TERRESTRIAL]
    lo_s, hi_s = cons.level_windows_dbuv[Band.SAT_IF]
    fl_t = cons.min_cnr_db.get(Band.TERRESTRIAL)
    fl_s = cons.min_cnr_db.get(Band.SAT_IF)
    is_terr = compiled.row_is_terr
    lo = np.where(is_terr, lo_t, lo_s)
    hi = np.where(is_terr, hi_t, hi_s)
    floor = np.where(
        is_terr,
        math.nan if fl_t is None else fl_t,
        math.nan if fl_s is None else fl_s,
    )
    return lo, hi, floor


def _objective(
    compiled: CompiledNetwork,
    limits,
    min_level: np.ndarray,
    max_level: np.ndarray,
    min_cnr: np.ndarray,
) -> tuple[int, float]:
    """(compliant output count, total margin) from per-row aggregates."""
    lo, hi, floor = limits
    slack = np.minimum(min_level - lo, hi - max_level)
    cn_slack = min_cnr - floor  # NaN floor -> NaN -> ignored below
    constrained = ~np.isnan(cn_slack) & ~np.isinf(cn_slack)
    slack = np.where(constrained, np.minimum(slack, cn_slack), slack)
    row_pass = slack >= 0.0

    n_out = len(compiled.output_ids)
    output_pass = np.ones(n_out, dtype=bool)
    np.logical_and.at(output_pass, compiled.row_output, row_pass)
    output_pass &= ~compiled.output_missing_required
    return int(output_pass.sum()), float(slack.sum())


@dataclass(frozen=True)
class SweepPoint:
    level_dbuv: float
    compliant_count: int
    total_margin_db: float


@dataclass(frozen=True)
class SweepResult:
    """Compliant-output counts over swept source levels of one line.

    points holds the requested levels; fine_points the 1 dB (by default)
    scan across the same span that locates the optimum. optimum_interval
    is the contiguous fine-scan interval achieving the best count,
    best_level its point of largest margin.
    """

    line: SignalLine
    points: tuple[SweepPoint, ...]
    fine_points: tuple[SweepPoint, ...]
    optimum_interval: tuple[float, float] | None
    best_level: float | None

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(p.compliant_count for p in self.points)


def sweep_input_level(
    net: Network,
    line: SignalLine,
    levels_dbuv: Sequence[float],
    scenario: Scenario | None = None,
    *,
    fine_step_db: float = 1.0,
    constraints: DesignConstraints | None = None,
    compiled: CompiledNetwork | None = None,
) -> SweepResult:
    """Replace every source spectrum on *line* with a flat swept level and
    count compliant outputs at each point.

    Source trims on the swept line are forced to zero so the swept level
    is exact; everything else follows the scenario.
    """
    if not levels_dbuv:
        raise ValueError("need at least one sweep level")
    compiled = compiled or compile_network(net)
    limits = _row_limits(compiled, constraints or net.constraints)
    knobs = compiled.knob_values(scenario, zero_trim_line=line)

    def point(u: float) -> SweepPoint:
        count, margin = _objective(
            compiled,
            limits,
            *compiled.evaluate(knobs, override_line=line, override_level_dbuv=float(u)),
        )
        return SweepPoint(float(u), count, margin)

    points = tuple(point(u) for u in levels_dbuv)

    lo, hi = min(levels_dbuv), max(levels_dbuv)
    if fine_step_db > 0 and hi > lo:
        n = int(round((hi - lo) / fine_step_db))
        fine_levels = [lo + k * fine_step_db for k in range(n + 1)]
    else:
        fine_levels = [lo]
    fine_points = tuple(point(u) for u in fine_levels)

    best_i = max(
        range(len(fine_points)),
        key=lambda i: (fine_points[i].compliant_count, fine_points[i].total_margin_db),
    )
    best_count = fine_points[best_i].compliant_count
    left = best_i
    while left > 0 and fine_points[left - 1].compliant_count == best_count:
        left -= 1
    right = best_i
    while right + 1 < len(fine_points) and fine_points[right + 1].compliant_count == best_count:
        right += 1
    return SweepResult(
        line=line,
        points=points,
        fine_points=fine_points,
        optimum_interval=(fine_points[left].level_dbuv, fine_points[right].level_dbuv),
        best_level=fine_points[best_i].level_dbuv,
    )


@dataclass(frozen=True)
class OptimizeResult:
    """Outcome of a regulator search.

    scenario carries an explicit index for every regulator in the
    network (merged over the input scenario's trims); objective is the
    kernel's (count, total margin) at those settings and report the
    authoritative re-check through full propagation.
    """

    scenario: Scenario
    report: ComplianceReport
    objective: tuple[int, float]
    start_objective: tuple[int, float]
    evaluations: int
    improved: bool
    history: tuple[tuple[int, int, float], ...] = ()


@dataclass(frozen=True)
class KnobSensitivity:
    """Objective change from stepping one regulator one position."""

    node_id: str
    group: str
    index: int
    step_up: tuple[int, float] | None
    step_down: tuple[int, float] | None


EXHAUSTIVE_SPACE_CAP = 10**6


def optimize_gains(
    net: Network,
    scenario: Scenario | None = None,
    *,
    budget: int = 20000,
    seed: int = 0,
    keep_trace: bool = False,
    constraints: DesignConstraints | None = None,
    compiled: CompiledNetwork | None = None,
) -> OptimizeResult:
    """Search regulator settings maximizing (compliant count, margin).

    Exhaustive when the whole setting space fits within min(budget, 1e6)
    evaluations, otherwise coordinate descent from the starting scenario
    plus seeded random restarts. Source trims are left untouched. The
    returned evaluation count includes the starting point.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    compiled = compiled or compile_network(net)
    limits = _row_limits(compiled, constraints or net.constraints)
    knob_entries = sorted(
        compiled.regulator_knobs, key=lambda pair: (pair[1].node_id, pair[1].group)
    )
    if not knob_entries:
        raise NoRegulators("network has no gain regulators to optimize")
    vec_idx = [pair[0] for pair in knob_entries]
    knobs: list[RegulatorKnob] = [pair[1] for pair in knob_entries]
    n_knobs = len(knobs)

    base_vals = compiled.knob_values(scenario)
    work = base_vals.copy()
    evaluations = 0
    history: list[tuple[int, int, float]] = []

    def evaluate(indices: Sequence[int]) -> tuple[int, float]:
        nonlocal evaluations
        for k in range(n_knobs):
            work[vec_idx[k]] = knobs[k].positions_db[indices[k]]
        evaluations += 1
        return _objective(compiled, limits, *compiled.evaluate(work))

    def resolve_start() -> tuple[int, ...]:
        out = []
        for k in knobs:
            idx = None
            if scenario is not None:
                idx = scenario.regulator_index(k.node_id, k.group)
            out.append(k.default_index if idx is None else idx)
        return tuple(out)

    start = resolve_start()
    start_obj = evaluate(start)
    best, best_obj = start, start_obj
    if keep_trace:
        history.append((evaluations, *start_obj))

    fully_compliant = start_obj[0] == len(compiled.output_ids)
    space = 1
    for k in knobs:
        space *= len(k.positions_db)
        if space > EXHAUSTIVE_SPACE_CAP:
            break

    if not fully_compliant and space <= min(budget, EXHAUSTIVE_SPACE_CAP):
        for candidate in itertools.product(*(range(len(k.positions_db)) for k in knobs)):
            obj = evaluate(candidate)
            if obj > best_obj:
                best, best_obj = candidate, obj
                if keep_trace:
                    history.append((evaluations, *obj))
    elif not fully_compliant:
        rng = np.random.default_rng(seed)

        def descend(indices: tuple[int, ...], obj: tuple[int, float]):
            nonlocal best, best_obj
            current = list(indices)
            current_obj = obj
            changed = True
            while changed and evaluations < budget:
                changed = False
                for k in range(n_knobs):
                    if evaluations >= budget:
                        break
                    best_k, best_k_obj = current[k], current_obj
                    for pos in range(len(knobs[k].positions_db)):
                        if pos == current[k]:
                            continue
                        if evaluations >= budget:
                            break
                        trial = current.copy()
                        trial[k] = pos
                        trial_obj = evaluate(trial)
                        if trial_obj > best_k_obj:
                            best_k, best_k_obj = pos, trial_obj
                    if best_k != current[k]:
                        current[k] = best_k
                        current_obj = best_k_obj
                        changed = True
                        if current_obj > best_obj:
                            best, best_obj = tuple(current), current_obj
                            if keep_trace:
                                history.append((evaluations, *current_obj))
            return tuple(current), current_obj

        descend(start, start_obj)
        while evaluations < budget and best_obj[0] < len(compiled.output_ids):
            restart = tuple(
                int(rng.integers(len(k.positions_db))) for k in knobs
            )
            obj = evaluate(restart)
            if obj > best_obj:
                best, best_obj = restart, obj
                if keep_trace:
                    history.append((evaluations, *obj))
            descend(restart, obj)

    regulators: dict[str, dict[str, int]] = {}
    for k, knob in enumerate(knobs):
        regulators.setdefault(knob.node_id, {})[knob.group] = best[k]
    trims = {}
    if scenario is not None:
        trims = {node: dict(lines) for node, lines in scenario.source_trims_db.items()}
    best_scenario = Scenario(regulators=regulators, source_trims_db=trims)

    report = check_outputs(propagate(net, best_scenario), constraints)
    return OptimizeResult(
        scenario=best_scenario,
        report=report,
        objective=best_obj,
        start_objective=start_obj,
        evaluations=evaluations,
        improved=best_obj > start_obj,
        history=tuple(history),
    )


def sensitivity(
    net: Network,
    scenario: Scenario | None = None,
    *,
    constraints: DesignConstraints | None = None,
    compiled: CompiledNetwork | None = None,
) -> tuple[KnobSensitivity, ...]:
    """Objective delta of a one-position step of each regulator, both
    directions, everything else held at the scenario's settings."""
    compiled = compiled or compile_network(net)
    limits = _row_limits(compiled, constraints or net.constraints)
    base_vals = compiled.knob_values(scenario)
    ref = _objective(compiled, limits, *compiled.evaluate(base_vals))

    out: list[KnobSensitivity] = []
    for vec_i, knob in sorted(
        compiled.regulator_knobs, key=lambda pair: (pair[1].node_id, pair[1].group)
    ):
        idx = None
        if scenario is not None:
            idx = scenario.regulator_index(knob.node_id, knob.group)
        if idx is None:
            idx = knob.default_index

        def probe(new_idx: int) -> tuple[int, float] | None:
            if not 0 <= new_idx < len(knob.positions_db):
                return None
            vals = base_vals.copy()
            vals[vec_i] = knob.positions_db[new_idx]
            count, margin = _objective(compiled, limits, *compiled.evaluate(vals))
            return count - ref[0], margin - ref[1]

        out.append(
            KnobSensitivity(
                node_id=knob.node_id,
                group=knob.group,
                index=idx,
                step_up=probe(idx + 1),
                step_down=probe(idx - 1),
            )
        )
    return tuple(out)
