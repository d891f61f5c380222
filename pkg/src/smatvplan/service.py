"""HTTP service backing the browser UI.

One network document lives under the service at a time, held as an
immutable snapshot. Reads never block; PUT validates the candidate,
swaps the snapshot atomically under a revision token and persists the
canonical text next to where it was loaded from, so two concurrent
editors cannot silently clobber each other (the loser gets a 409 and
re-fetches). Optimizer runs happen off the request path: POST returns
a job id to poll.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles

from . import __version__
from .catalog import builtin_catalog, catalog_to_dict
from .compliance import full_report
from .engine import kernel_backend, propagate
from .errors import DocumentSyntaxError, PlanError, SchemaError
from .model import Network, Scenario, SignalLine, validate_network
from .netio import (
    network_from_dict,
    network_to_dict,
    parse_network,
    report_to_dict,
    scenario_from_dict,
    scenario_to_dict,
    serialize_network,
)
from .optimize import optimize_gains, sweep_input_level

NETWORK_FILE = "network.json"


@dataclass(frozen=True)
class Snapshot:
    network: Network
    canonical: str
    revision: str


def _revision_of(canonical: str) -> str:
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _snapshot(network: Network) -> Snapshot:
    canonical = serialize_network(network)
    return Snapshot(network, canonical, _revision_of(canonical))


def _bad_request(message: str, diagnostics: list[str] | None = None) -> HTTPException:
    return HTTPException(
        status_code=400,
        detail={"message": message, "diagnostics": diagnostics or []},
    )


def _scenario_from(payload: dict, key: str = "scenario") -> Scenario | None:
    raw = payload.get(key)
    if raw is None:
        return None
    try:
        return scenario_from_dict(raw)
    except (SchemaError, ValueError) as exc:
        raise _bad_request(f"invalid scenario: {exc}") from exc


def _line_from(raw: Any) -> SignalLine:
    try:
        return SignalLine(str(raw).upper())
    except ValueError:
        raise _bad_request(
            f"unknown line {raw!r}; pick one of "
            + ", ".join(l.value for l in SignalLine)
        ) from None


def create_app(network_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    """Build the application serving the document in *network_dir*."""
    network_dir = Path(network_dir)
    doc_path = network_dir / NETWORK_FILE
    app = FastAPI(title="smatvplan", version=__version__)

    state: dict[str, Any] = {
        "snap": _snapshot(parse_network(doc_path.read_text())),
        "lock": threading.Lock(),
        "jobs": {},
        "job_seq": itertools.count(1),
    }

    def snap() -> Snapshot:
        return state["snap"]

    def persist(canonical: str) -> None:
        # atomic replace so a crashed write never truncates the document
        fd, tmp = tempfile.mkstemp(dir=network_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(canonical)
            os.replace(tmp, doc_path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "version": __version__,
            "kernel": kernel_backend(),
            "revision": snap().revision,
        }

    @app.get("/api/network")
    def get_network():
        s = snap()
        return {"revision": s.revision, "document": network_to_dict(s.network)}

    @app.put("/api/network")
    def put_network(payload: dict = Body(...)):
        document = payload.get("document")
        if not isinstance(document, dict):
            raise _bad_request("body must carry a 'document' object")
        try:
            network = network_from_dict(document)
        except (SchemaError, DocumentSyntaxError) as exc:
            raise _bad_request("document rejected", [str(exc)]) from exc
        diagnostics = validate_network(network)
        errors = [str(d) for d in diagnostics if d.severity == "error"]
        if errors:
            raise _bad_request("network is invalid", errors)
        with state["lock"]:
            current = snap()
            if payload.get("revision") != current.revision:
                raise HTTPException(
                    status_code=409,
                    detail={
                        "message": "revision conflict: document changed underneath you",
                        "revision": current.revision,
                    },
                )
            fresh = _snapshot(network)
            persist(fresh.canonical)
            state["snap"] = fresh
        return {
            "revision": fresh.revision,
            "warnings": [str(d) for d in diagnostics if d.severity == "warning"],
        }

    @app.get("/api/catalog")
    def get_catalog():
        return catalog_to_dict(builtin_catalog())

    @app.post("/api/validate")
    def post_validate(payload: dict = Body(...)):
        """Dry-run check of a candidate document without swapping it in."""
        document = payload.get("document")
        if not isinstance(document, dict):
            raise _bad_request("body must carry a 'document' object")
        try:
            network = network_from_dict(document)
        except (SchemaError, DocumentSyntaxError) as exc:
            return {"ok": False, "diagnostics": [str(exc)]}
        diagnostics = validate_network(network)
        return {
            "ok": not any(d.severity == "error" for d in diagnostics),
            "diagnostics": [str(d) for d in diagnostics],
        }

    @app.post("/api/simulate")
    def post_simulate(payload: dict = Body(default={})):
        s = snap()
        scenario = _scenario_from(payload)
        strict = bool(payload.get("strict_isolation", False))
        try:
            result = propagate(s.network, scenario)
            report = full_report(s.network, scenario, strict_isolation=strict,
                                 result=result)
        except PlanError as exc:
            raise _bad_request(str(exc)) from exc
        outputs = [
            {
                "id": out_id,
                "line": line.value,
                "min_level_dbuv": trace.min_level,
                "max_level_dbuv": trace.max_level,
                "min_cnr_db": None if trace.cnr_db is None else trace.min_cnr,
            }
            for (out_id, line), trace in sorted(
                result.traces.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
            )
        ]
        return {
            "revision": s.revision,
            "report": report_to_dict(report),
            "outputs": outputs,
        }

    @app.post("/api/sweep")
    def post_sweep(payload: dict = Body(default={})):
        s = snap()
        line = _line_from(payload.get("line", SignalLine.TERR.value))
        levels = payload.get("levels") or [50.0, 60.0, 70.0, 80.0, 90.0]
        if not isinstance(levels, list) or not all(
            isinstance(u, (int, float)) for u in levels
        ):
            raise _bad_request("'levels' must be a list of numbers")
        fine = float(payload.get("fine_step_db", 1.0))
        scenario = _scenario_from(payload)
        try:
            sweep = sweep_input_level(
                s.network, line, [float(u) for u in levels], scenario,
                fine_step_db=fine,
            )
        except PlanError as exc:
            raise _bad_request(str(exc)) from exc
        def points(seq):
            return [
                {
                    "level_dbuv": p.level_dbuv,
                    "compliant_count": p.compliant_count,
                    "total_margin_db": p.total_margin_db,
                }
                for p in seq
            ]
        return {
            "revision": s.revision,
            "line": sweep.line.value,
            "total_outputs": len(s.network.outputs),
            "points": points(sweep.points),
            "fine_points": points(sweep.fine_points),
            "optimum_interval": list(sweep.optimum_interval)
            if sweep.optimum_interval else None,
            "best_level": sweep.best_level,
        }

    @app.post("/api/optimize", status_code=202)
    def post_optimize(payload: dict = Body(default={})):
        s = snap()
        scenario = _scenario_from(payload)
        budget = payload.get("budget", 20000)
        seed = payload.get("seed", 0)
        if not isinstance(budget, int) or budget < 1:
            raise _bad_request("'budget' must be a positive integer")
        if not isinstance(seed, int):
            raise _bad_request("'seed' must be an integer")
        job_id = f"job-{next(state['job_seq'])}"
        job = {"id": job_id, "status": "running", "revision": s.revision}
        state["jobs"][job_id] = job

        def run():
            try:
                result = optimize_gains(s.network, scenario, budget=budget, seed=seed)
                job["result"] = {
                    "scenario": scenario_to_dict(result.scenario),
                    "objective": list(result.objective),
                    "start_objective": list(result.start_objective),
                    "evaluations": result.evaluations,
                    "improved": result.improved,
                    "report": report_to_dict(result.report),
                }
                job["status"] = "done"
            except Exception as exc:  # surfaced via the job, not the log
                job["error"] = str(exc)
                job["status"] = "failed"

        threading.Thread(target=run, name=job_id, daemon=True).start()
        return {"job_id": job_id, "status": "running"}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        job = state["jobs"].get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"no such job {job_id!r}")
        body = {"job_id": job["id"], "status": job["status"],
                "revision": job["revision"]}
        if job["status"] == "done":
            body["result"] = job["result"]
        elif job["status"] == "failed":
            body["error"] = job["error"]
        return body

    @app.get("/api/outputs/{output_id}/trace")
    def get_trace(
        output_id: str,
        line: str | None = Query(default=None),
        scenario: str | None = Query(default=None),
    ):
        s = snap()
        if not any(o.id == output_id for o in s.network.outputs):
            raise HTTPException(status_code=404, detail=f"no such output {output_id!r}")
        parsed_scenario = None
        if scenario:
            try:
                parsed_scenario = scenario_from_dict(json.loads(scenario))
            except (json.JSONDecodeError, SchemaError, ValueError) as exc:
                raise _bad_request(f"invalid scenario: {exc}") from exc
        wanted = _line_from(line) if line is not None else None
        try:
            result = propagate(s.network, parsed_scenario)
        except PlanError as exc:
            raise _bad_request(str(exc)) from exc
        series = []
        for ln in sorted(SignalLine, key=lambda l: l.value):
            if wanted is not None and ln is not wanted:
                continue
            trace = result.traces.get((output_id, ln))
            if trace is None:
                continue
            series.append({
                "line": ln.value,
                "band": ln.band.value,
                "freqs_mhz": [float(f) for f in trace.freqs_mhz],
                "levels_dbuv": [float(v) for v in trace.levels_dbuv],
                "cnr_db": None if trace.cnr_db is None
                else [float(v) for v in trace.cnr_db],
                "min_level_dbuv": trace.min_level,
                "max_level_dbuv": trace.max_level,
                "min_cnr_db": None if trace.cnr_db is None else trace.min_cnr,
            })
        if wanted is not None and not series:
            raise _bad_request(f"line {wanted.value} does not reach {output_id!r}")
        constraints = s.network.constraints
        limits = {
            band.value: {
                "min_level_dbuv": window[0],
                "max_level_dbuv": window[1],
                "min_cnr_db": constraints.min_cnr_db.get(band),
            }
            for band, window in constraints.level_windows_dbuv.items()
        }
        return {
            "revision": s.revision,
            "output_id": output_id,
            "series": series,
            "limits": limits,
        }

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return {
                "service": "smatvplan",
                "version": __version__,
                "endpoints": sorted(
                    r.path for r in app.routes if r.path.startswith("/api/")
                ),
            }

    return app
