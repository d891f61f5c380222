"""Exercise the bundled case study end to end and print what the test
suite will pin: compliance counts, sweep table, optimum interval,
kernel/trace agreement. Run from the repository root after changing the
engine or the fixture:

    python tools/check_case_study.py
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np  # noqa: E402

from smatvplan import netio  # noqa: E402
from smatvplan.compliance import check_outputs, full_report  # noqa: E402
from smatvplan.engine import compile_network, kernel_backend, propagate  # noqa: E402
from smatvplan.model import SignalLine, validate_network  # noqa: E402
from smatvplan.optimize import optimize_gains, sweep_input_level  # noqa: E402


def main():
    net = netio.build_case_study()
    print(f"kernel backend: {kernel_backend()}")
    diagnostics = validate_network(net)
    print(f"validation: {len(diagnostics)} diagnostic(s)")
    for d in diagnostics:
        print(f"  {d}")

    result = propagate(net)
    report = full_report(net, result=result)
    print(f"\nas installed: {report.compliant_count}/{report.total_outputs} compliant, "
          f"network violations: {len(report.network_violations)}")
    for v in report.verdicts:
        if not v.compliant:
            print(f"  FAIL {v.output_id}  margin {v.margin_db:+.2f} dB")
            for x in v.violations:
                print(f"       {x.message}")
    margins = sorted(v.margin_db for v in report.verdicts if v.compliant)
    print(f"  tightest passing margins: {[f'{m:+.2f}' for m in margins[:5]]}")

    compiled = compile_network(net)
    print(f"\ncompiled: {compiled.n_rows} rows, {compiled.n_stages} stages, "
          f"{len(compiled.knobs)} knobs")

    # Kernel vs trace agreement at the stored settings.
    mn, mx, cn = compiled.evaluate(compiled.knob_values(None))
    worst = 0.0
    for r in range(compiled.n_rows):
        trace = result.traces[(compiled.output_ids[compiled.row_output[r]], compiled.row_lines[r])]
        worst = max(worst, abs(trace.min_level - mn[r]), abs(trace.max_level - mx[r]))
        if trace.cnr_db is not None:
            worst = max(worst, abs(trace.min_cnr - cn[r]))
    print(f"kernel vs trace, worst abs diff: {worst:.2e}")

    sweep = sweep_input_level(net, SignalLine.TERR, [50.0, 60.0, 70.0, 80.0, 90.0])
    print("\nterrestrial input level sweep:")
    for p in sweep.points:
        print(f"  {p.level_dbuv:5.1f} dBuV -> {p.compliant_count:2d}/60  "
              f"(margin sum {p.total_margin_db:+9.2f} dB)")
    print(f"  optimum interval: {sweep.optimum_interval}, best {sweep.best_level}")

    run57 = [p.level_dbuv for p in sweep.fine_points if p.compliant_count == max(
        q.compliant_count for q in sweep.fine_points)]
    print(f"  fine levels at max count: {run57}")

    opt = optimize_gains(net, budget=2000, seed=0)
    print(f"\noptimize (budget 2000): start {opt.start_objective} -> {opt.objective}, "
          f"evaluations {opt.evaluations}, improved {opt.improved}")
    print(f"  report: {opt.report.compliant_count}/{opt.report.total_outputs}")


if __name__ == "__main__":
    main()
