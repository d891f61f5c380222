"""Command line interface.

Exit codes follow the usual check-tool convention: 0 when the run
succeeded and the report is clean, 1 when the run succeeded but
violations remain, 2 when no report could be produced (unreadable
files, schema errors, invalid networks, bad arguments).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .compliance import full_report
from .engine import kernel_backend, propagate
from .errors import PlanError
from .model import Scenario, SignalLine, apply_scenario, validate_network
from .netio import (
    build_case_study,
    export_report,
    parse_network,
    parse_scenario,
    report_to_dict,
    scenario_to_dict,
    serialize_network,
)
from .optimize import optimize_gains, sweep_input_level

EXIT_OK = 0
EXIT_NONCOMPLIANT = 1
EXIT_ERROR = 2

DEFAULT_PORT = 8032
NETWORK_FILE = "network.json"


def _load_network(path: str):
    return parse_network(Path(path).read_text())


def _load_scenario(path: str | None) -> Scenario | None:
    if path is None:
        return None
    return parse_scenario(Path(path).read_text())


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _parse_line(name: str) -> SignalLine:
    try:
        return SignalLine(name.upper())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown line {name!r}; pick one of "
            + ", ".join(l.value for l in SignalLine)
        ) from None


def _parse_levels(spec: str) -> list[float]:
    """Sweep levels: 'start:stop:step' or a comma-separated list."""
    try:
        if ":" in spec:
            parts = [float(p) for p in spec.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise ValueError
            start, stop, step = parts
            out = []
            u = start
            while u <= stop + 1e-9:
                out.append(round(u, 6))
                u += step
            return out
        levels = [float(p) for p in spec.split(",") if p.strip()]
        if not levels:
            raise ValueError
        return levels
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad level spec {spec!r}; use start:stop:step or a comma list"
        ) from None


def _levels_section(result) -> str:
    keys = sorted(result.traces, key=lambda k: (k[0], k[1].value))
    id_w = max(len("output"), max(len(k[0]) for k in keys))
    lines = ["levels per output (dBuV, worst C/N in dB):",
             f"  {'output':<{id_w}}  line    min     max     C/N"]
    for out_id, line in keys:
        tr = result.traces[(out_id, line)]
        cnr = "   n/a" if tr.cnr_db is None else f"{tr.min_cnr:6.1f}"
        lines.append(f"  {out_id:<{id_w}}  {line.value:<4}  {tr.min_level:6.1f}"
                     f"  {tr.max_level:6.1f}  {cnr}")
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    net = _load_network(args.network)
    scenario = _load_scenario(args.scenario)
    result = propagate(net, scenario)
    report = full_report(net, scenario, strict_isolation=args.strict_isolation,
                         result=result)
    if args.format == "machine":
        _emit(export_report(report, "json"), args.out)
    else:
        _emit(export_report(report) + "\n" + _levels_section(result), args.out)
    if args.trace:
        for line in sorted(SignalLine, key=lambda l: l.value):
            trace = result.traces.get((args.trace, line))
            if trace is None:
                continue
            print(f"\ntrace {args.trace} / {line.value} "
                  f"({trace.freqs_mhz[0]:.0f}..{trace.freqs_mhz[-1]:.0f} MHz)")
            for i, step in enumerate(trace.steps, start=1):
                lo, hi = float(step.level_dbuv.min()), float(step.level_dbuv.max())
                print(f"  {i:2d}  {step.kind:<8s} {step.subject:<16s} "
                      f"{step.detail:<28s} {lo:7.2f} .. {hi:7.2f} dBuV")
            if trace.cnr_db is not None:
                print(f"      C/N {trace.min_cnr:.2f} dB worst case")
    return EXIT_OK if report.compliant else EXIT_NONCOMPLIANT


def cmd_validate(args) -> int:
    net = _load_network(args.network)
    diagnostics = validate_network(net)
    for d in diagnostics:
        print(d)
    errors = sum(1 for d in diagnostics if d.severity == "error")
    print(f"{errors} error(s), {len(diagnostics) - errors} warning(s)")
    return EXIT_ERROR if errors else EXIT_OK


def cmd_sweep(args) -> int:
    net = _load_network(args.network)
    scenario = _load_scenario(args.scenario)
    sweep = sweep_input_level(
        net, args.line, args.levels, scenario, fine_step_db=args.fine_step
    )
    if args.format == "machine":
        doc = {
            "line": sweep.line.value,
            "points": [
                {"level_dbuv": p.level_dbuv, "compliant_count": p.compliant_count,
                 "total_margin_db": p.total_margin_db}
                for p in sweep.points
            ],
            "optimum_interval": list(sweep.optimum_interval) if sweep.optimum_interval else None,
            "best_level": sweep.best_level,
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    else:
        total = len(net.outputs)
        lines = [f"sweep of {sweep.line.value} source level",
                 "  level_dbuv  compliant  margin_sum_db"]
        for p in sweep.points:
            lines.append(f"  {p.level_dbuv:10.1f}  {p.compliant_count:4d}/{total:<4d}"
                         f"{p.total_margin_db:13.2f}")
        if sweep.optimum_interval:
            lo, hi = sweep.optimum_interval
            lines.append(f"  optimum: {lo:.1f} .. {hi:.1f} dBuV "
                         f"(best {sweep.best_level:.1f})")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    net = _load_network(args.network)
    scenario = _load_scenario(args.scenario)
    result = optimize_gains(net, scenario, budget=args.budget, seed=args.seed)
    if args.format == "machine":
        doc = {
            "scenario": scenario_to_dict(result.scenario),
            "objective": list(result.objective),
            "start_objective": list(result.start_objective),
            "evaluations": result.evaluations,
            "improved": result.improved,
            "report": report_to_dict(result.report),
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    else:
        count, margin = result.objective
        start_count, start_margin = result.start_objective
        lines = [
            f"start:  {start_count} compliant, margin sum {start_margin:+.2f} dB",
            f"best:   {count} compliant, margin sum {margin:+.2f} dB "
            f"({result.evaluations} evaluations)",
            f"verify: {result.report.compliant_count}/{result.report.total_outputs}"
            " compliant after full propagation",
        ]
        _emit("\n".join(lines) + "\n", args.out)
    if args.apply:
        baked = apply_scenario(net, result.scenario)
        Path(args.apply).write_text(serialize_network(baked))
        if args.format != "machine":
            print(f"network with applied settings written to {args.apply}")
    if args.save_scenario:
        Path(args.save_scenario).write_text(
            json.dumps(scenario_to_dict(result.scenario), indent=2, sort_keys=True) + "\n"
        )
        if args.format != "machine":
            print(f"scenario written to {args.save_scenario}")
    full = result.report.compliant_count == result.report.total_outputs
    return EXIT_OK if full else EXIT_NONCOMPLIANT


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    network_dir = Path(args.network_dir)
    if not network_dir.is_dir():
        print(f"error: {network_dir} is not a directory", file=sys.stderr)
        return EXIT_ERROR
    doc = network_dir / NETWORK_FILE
    if not doc.exists():
        doc.write_text(serialize_network(build_case_study()))
        print(f"seeded {doc} with the bundled case study")
    app = create_app(network_dir, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def cmd_fixture(args) -> int:
    text = serialize_network(build_case_study())
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smatvplan",
        description="Plan and verify SMATV/CATV distribution networks.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} (kernel: {kernel_backend()})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="propagate levels and check compliance")
    p.add_argument("network", help="network document (JSON)")
    p.add_argument("--scenario", help="scenario document (JSON)")
    p.add_argument("--out", metavar="FILE", help="write the report to FILE")
    p.add_argument("--format", choices=("table", "machine"), default="table")
    p.add_argument("--strict-isolation", action="store_true",
                   help="require the strict 40 dB tap isolation")
    p.add_argument("--trace", metavar="OUTPUT_ID",
                   help="print per-hop level traces for one output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="run structural validation only")
    p.add_argument("network")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="sweep a source level and count compliant outputs")
    p.add_argument("network")
    p.add_argument("--line", type=_parse_line, default=SignalLine.TERR,
                   help="signal line to sweep (default TERR)")
    p.add_argument("--levels", type=_parse_levels, default=_parse_levels("50:90:10"),
                   help="levels as start:stop:step or a comma list (default 50:90:10)")
    p.add_argument("--fine-step", type=float, default=1.0,
                   help="fine scan step locating the optimum (default 1 dB)")
    p.add_argument("--scenario")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--format", choices=("table", "machine"), default="table")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="search regulator settings")
    p.add_argument("network")
    p.add_argument("--scenario", help="starting scenario (JSON)")
    p.add_argument("--budget", type=int, default=20000,
                   help="evaluation budget (default 20000)")
    p.add_argument("--seed", type=int, default=0, help="restart seed (default 0)")
    p.add_argument("--apply", metavar="FILE",
                   help="write the network with the best settings baked in")
    p.add_argument("--save-scenario", metavar="FILE",
                   help="write the best scenario to FILE")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--format", choices=("table", "machine"), default="table")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("serve", help="serve the HTTP API (and UI, if built)")
    p.add_argument("--network-dir", default=".",
                   help=f"directory holding {NETWORK_FILE} (default: cwd; "
                        "seeded with the case study when missing)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("SMATVPLAN_PORT", DEFAULT_PORT)))
    p.add_argument("--ui", metavar="DIR", help="directory with built UI assets")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fixture", help="write the bundled case-study network")
    p.add_argument("-o", "--out", help="target file (default: stdout)")
    p.set_defaults(func=cmd_fixture)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
