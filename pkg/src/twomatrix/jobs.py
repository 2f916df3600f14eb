"""Job runner: JSON job files in, JSON result documents out.

A job is

    {"curve": <curve name | inline x, y | potentials + T + kappa>,
     "backend": "exact" | "float(256)",
     "requests": [{"type": "w", "h": 0, "k": 3, "points": ["2", "3", "5"]},
                  {"type": "w_mixed", "h": 0, "k": 2},
                  {"type": "free_energy", "h": 2, "route": "operator"},
                  {"type": "diagrams", "h": 1, "k": 1},
                  {"type": "verify", "checks": ["free1"], "h": 2}]}

Golden corpora are directories of ``NAME.job.json`` files next to
``NAME.expected.json`` files.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path

from . import serialize as S
from .diagrams import DiagramEvaluator, count_unrolled_terms, enumerate_diagrams
from .errors import EngineError
from .free_energy import (check_free1, check_h_sum, check_hx_b, check_xy_symmetry,
                          free_energy, free_energy_f0)
from .identities import kernel_finiteness, verify_loop_identities
from .mixed import compute_w_k1, w_11_0
from .recursion import RecursionEngine, w3_closed_form

log = logging.getLogger("twomatrix")

REQUEST_TYPES = ("w", "w_mixed", "free_energy", "diagrams", "verify")


class JobContext:
    def __init__(self, curve, scale=1, max_order=2000):
        self.curve = curve
        self.scale = scale
        self.engine = RecursionEngine(curve, scale=scale, max_order=max_order)
        self._diag = None

    @property
    def diagrams(self):
        if self._diag is None:
            self._diag = DiagramEvaluator(self.curve, self.engine)
        return self._diag


def _int(req, key, where, default=None):
    v = req.get(key, default)
    if v is None:
        raise S.ParseError(f"{where}.{key}", "missing")
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise S.ParseError(f"{where}.{key}", f"expected a non-negative integer, got {v!r}")
    return v


# ---------------------------------------------------------------------------
# verification checks; each returns (passed, details)

def _v_hx_b(ctx, req):
    ok, lhs, rhs = check_hx_b(ctx.curve)
    return ok, {}


def _v_w3(ctx, req):
    a = ctx.engine.compute_w(0, 3).data
    b = w3_closed_form(ctx.curve).data
    f = ctx.curve.field
    keys = set(a) | set(b)
    return all(f.eq(a.get(k, f.zero), b.get(k, f.zero)) for k in keys), {}


def _v_free1(ctx, req):
    ok, _, _ = check_free1(ctx.curve, _int(req, "h", "verify", 1), ctx.engine)
    return ok, {}


def _v_routes(ctx, req):
    h = _int(req, "h", "verify", 2)
    a = free_energy(ctx.curve, h, "operator", ctx.engine).value
    b = free_energy(ctx.curve, h, "vertex", ctx.engine).value
    f = ctx.curve.field
    return f.eq(a, b), {"operator": f.to_str(a), "vertex": f.to_str(b)}


def _v_identities(ctx, req):
    h = _int(req, "h", "verify", 1)
    order = _int(req, "order", "verify", 20) * ctx.scale
    report, _ = verify_loop_identities(ctx.curve, h, order, ctx.engine)
    return all(report.values()), {k: bool(v) for k, v in sorted(report.items())}


def _v_kernel(ctx, req):
    return kernel_finiteness(ctx.curve, ctx.engine), {}


def _v_diagrams(ctx, req):
    h, k = _int(req, "h", "verify"), _int(req, "k", "verify")
    f = ctx.curve.field
    a = ctx.diagrams.sum(h, k)
    b = ctx.engine.w(h, k + 1)
    keys = set(a) | set(b)
    return all(f.eq(a.get(x, f.zero), b.get(x, f.zero)) for x in keys), {}


def _v_xy(ctx, req):
    from .curve import swap_xy
    sw = RecursionEngine(swap_xy(ctx.curve), scale=ctx.scale, max_order=ctx.engine.max_order)
    ok, *_ = check_xy_symmetry(ctx.curve, _int(req, "h", "verify", 2), ctx.engine, sw)
    return ok, {}


def _v_h_sum(ctx, req):
    h = _int(req, "h", "verify", 1)
    ok, _, _ = check_h_sum(ctx.curve, ctx.engine.w(h, 1))
    return ok, {}


def _v_w21(ctx, req):
    pts = [S.parse_scalar(ctx.curve.field, p, "verify.points") for p in req.get("points", ["2", "3", "5"])]
    from .mixed import w_21_0
    a, b = w_21_0(ctx.curve, *pts, engine=ctx.engine)
    return ctx.curve.field.eq(a, b), {"value": ctx.curve.field.to_str(a)}


CHECKS = {
    "hx_b": _v_hx_b,
    "w3_closed_form": _v_w3,
    "free1": _v_free1,
    "routes": _v_routes,
    "identities": _v_identities,
    "kernel_finiteness": _v_kernel,
    "diagrams": _v_diagrams,
    "xy_symmetry": _v_xy,
    "h_sum": _v_h_sum,
    "w21": _v_w21,
}


# ---------------------------------------------------------------------------
# requests

def _r_w(ctx, req, where):
    h, k = _int(req, "h", where), _int(req, "k", where)
    if k < 1:
        raise S.ParseError(f"{where}.k", "k >= 1 required")
    corr = ctx.engine.compute_w(h, k)
    doc = S.correlator_json(corr)
    if "points" in req:
        f = ctx.curve.field
        pts = req["points"]
        if not isinstance(pts, list) or len(pts) != k:
            raise S.ParseError(f"{where}.points", f"expected {k} point strings")
        pts = [S.parse_scalar(f, p, f"{where}.points[{i}]") for i, p in enumerate(pts)]
        doc["value"] = f.to_str(corr.evaluate(*pts))
    return doc


def _r_w_mixed(ctx, req, where):
    h, k = _int(req, "h", where), _int(req, "k", where)
    if (h, k) == (0, 1):
        mc = w_11_0(ctx.curve)
    else:
        mc = compute_w_k1(ctx.curve, h, k, ctx.engine)
    doc = S.mixed_json(mc)
    if "moments" in req:
        deg = _int(req, "moments", where)
        f = ctx.curve.field
        doc["moments"] = [{"powers": list(e), "value": f.to_str(c)} for e, c in sorted(mc.moments(deg).items())]
    return doc


def _r_free_energy(ctx, req, where):
    h = _int(req, "h", where)
    if h == 0:
        v = free_energy_f0(ctx.curve)
        return {"h": 0, "value": S.scalar(ctx.curve.field, v), "route": "closed-form",
                "sign_convention": "minus-log-Z"}
    route = req.get("route", "operator")
    if route not in ("operator", "vertex"):
        raise S.ParseError(f"{where}.route", f"unknown route {route!r}")
    return S.free_energy_json(free_energy(ctx.curve, h, route, ctx.engine))


def _r_diagrams(ctx, req, where):
    h, k = _int(req, "h", where), _int(req, "k", where)
    ds = enumerate_diagrams(h, k)
    return {"h": h, "k": k, "count": len(ds), "unrolled_terms": count_unrolled_terms(h, k),
            "diagrams": [{"tree": d.string, "multiplicity": d.multiplicity} for d in ds]}


def _r_verify(ctx, req, where):
    checks = req.get("checks")
    if not isinstance(checks, list) or not checks:
        raise S.ParseError(f"{where}.checks", "expected a non-empty list of check names")
    out = []
    for name in checks:
        fn = CHECKS.get(name)
        if fn is None:
            raise S.ParseError(f"{where}.checks", f"unknown check {name!r}")
        ok, details = fn(ctx, req)
        log.info("verify %s: %s", name, "pass" if ok else "fail")
        out.append({"check": name, "result": "pass" if ok else "fail", "details": details})
    return {"checks": out}


HANDLERS = {"w": _r_w, "w_mixed": _r_w_mixed, "free_energy": _r_free_energy,
            "diagrams": _r_diagrams, "verify": _r_verify}


def parse_job(text):
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as e:
        raise S.ParseError(f"line {e.lineno} column {e.colno}", e.msg) from None
    if not isinstance(spec, dict):
        raise S.ParseError("job", "expected a JSON object")
    for key in ("curve", "requests"):
        if key not in spec:
            raise S.ParseError(key, "missing")
    if not isinstance(spec["requests"], list):
        raise S.ParseError("requests", "expected a list")
    return spec


def run_job(spec, backend=None, precision=None, max_order=2000, scale=1):
    """Execute every request in order; returns (document, all_verifications_passed)."""
    b = backend or spec.get("backend", "exact")
    field = S.make_field(b, precision or spec.get("precision", 256))
    curve = S.parse_curve(spec["curve"], field)
    ctx = JobContext(curve, scale, max_order)
    results, passed = [], True
    for i, req in enumerate(spec["requests"]):
        where = f"requests[{i}]"
        if not isinstance(req, dict) or req.get("type") not in HANDLERS:
            raise S.ParseError(f"{where}.type", f"expected one of {', '.join(REQUEST_TYPES)}")
        log.info("%s: %s", where, req["type"])
        try:
            res = HANDLERS[req["type"]](ctx, req, where)
        except S.ParseError:
            raise
        except (EngineError, ValueError) as e:
            res = {"error": type(e).__name__, "message": str(e)}
            if req["type"] == "verify":
                passed = False
        if req["type"] == "verify" and "checks" in res:
            passed = passed and all(c["result"] == "pass" for c in res["checks"])
        results.append({"request": req, "result": res})
    doc = {"curve": S.curve_json(curve), "backend": getattr(field, "name", "exact"),
           "results": results}
    return doc, passed


def run_corpus(directory, scale=1, max_order=2000):
    """Run every ``*.job.json`` and compare with its ``*.expected.json``.

    Returns a list of {job, status, detail}; status is pass, fail, error or
    missing-golden.
    """
    summary = []
    for job in sorted(Path(directory).glob("*.job.json")):
        name = job.name[:-len(".job.json")]
        golden = job.with_name(name + ".expected.json")
        try:
            doc, ok = run_job(parse_job(job.read_text()), max_order=max_order, scale=scale)
        except (S.ParseError, EngineError) as e:
            summary.append({"job": name, "status": "error", "detail": str(e)})
            continue
        text = S.dumps(doc)
        if not golden.exists():
            summary.append({"job": name, "status": "missing-golden", "detail": ""})
        elif golden.read_text() != text:
            summary.append({"job": name, "status": "fail", "detail": "output differs from golden"})
        elif not ok:
            summary.append({"job": name, "status": "fail", "detail": "verification failed"})
        else:
            summary.append({"job": name, "status": "pass", "detail": ""})
    return summary
