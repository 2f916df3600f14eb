"""JSON documents for curves, correlators and free energies.

All numbers are strings: "p/q" in exact mode, "digitsEexp@precision" in
float mode, so documents round-trip without loss.
"""
from __future__ import annotations

import json

from .curve import SpectralCurve, build_curve_from_potentials
from .free_energy import LogSum
from .polynomial import Polynomial, RationalFunction
from .scalars import ExactField, FloatField


class ParseError(ValueError):
    """Malformed job or curve document; ``field`` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


def make_field(backend="exact", precision=256):
    if backend == "exact":
        return ExactField()
    if backend == "float":
        return FloatField(int(precision))
    if isinstance(backend, str) and backend.startswith("float(") and backend.endswith(")"):
        return FloatField(int(backend[6:-1]))
    raise ParseError("backend", f"unknown backend {backend!r}")


def scalar(field, v):
    if isinstance(v, LogSum):
        return v.to_str()
    return field.to_str(v)


def parse_scalar(field, text, where):
    if not isinstance(text, str):
        raise ParseError(where, f"numbers must be strings, got {type(text).__name__}")
    try:
        return field.from_str(text) if "@" in text else field.convert(_exact(text))
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(where, f"bad scalar {text!r} ({e})") from None


def _exact(text):
    from gmpy2 import mpq
    return mpq(text.strip())


def poly_json(field, p):
    return [field.to_str(c) for c in p.coeffs]


def parse_poly(field, lst, var, where):
    if not isinstance(lst, list) or not lst:
        raise ParseError(where, "expected a non-empty list of coefficient strings")
    return Polynomial(field, [parse_scalar(field, c, f"{where}[{i}]") for i, c in enumerate(lst)], var)


def rf_json(field, r):
    return {"num": poly_json(field, r.num), "den": poly_json(field, r.den)}


def parse_rf(field, doc, where):
    if not isinstance(doc, dict) or "num" not in doc or "den" not in doc:
        raise ParseError(where, "expected {'num': [...], 'den': [...]}")
    num = parse_poly(field, doc["num"], "z", f"{where}.num")
    den = parse_poly(field, doc["den"], "z", f"{where}.den")
    if den.is_zero():
        raise ParseError(f"{where}.den", "zero denominator")
    return RationalFunction(num, den)


def curve_json(curve):
    f = curve.field
    doc = {"x": rf_json(f, curve.x), "y": rf_json(f, curve.y),
           "T": f.to_str(curve.T), "kappa": f.to_str(curve.kappa)}
    if curve.has_potentials():
        doc["potentials"] = {"V1": poly_json(f, curve.V1), "V2": poly_json(f, curve.V2)}
    return doc


def parse_curve(doc, field, where="curve"):
    """Curve from inline x(z), y(z) (+ T, kappa) or from potentials + T + kappa."""
    from . import catalog
    from .curve import potentials_from_curve
    if isinstance(doc, str):
        if doc not in catalog.NAMED:
            raise ParseError(where, f"unknown named curve {doc!r}")
        return catalog.NAMED[doc](field=field)
    if not isinstance(doc, dict):
        raise ParseError(where, "expected an object or a curve name")
    kappa = parse_scalar(field, doc.get("kappa", "1"), f"{where}.kappa")
    if "x" in doc or "y" in doc:
        for key in ("x", "y"):
            if key not in doc:
                raise ParseError(f"{where}.{key}", "missing")
        x = parse_rf(field, doc["x"], f"{where}.x")
        y = parse_rf(field, doc["y"], f"{where}.y")
        try:
            V1, V2, T = potentials_from_curve(x, y, field)
        except ValueError as e:
            raise ParseError(where, f"not a genus-zero two-matrix curve ({e})") from None
        V1, V2, T = V1 * kappa, V2 * kappa, T * kappa
        if "T" in doc:
            Tg = parse_scalar(field, doc["T"], f"{where}.T")
            if not field.eq(Tg, T):
                raise ParseError(f"{where}.T", f"inconsistent with the curve (curve gives {field.to_str(T)})")
        return SpectralCurve(x, y, T, kappa, V1, V2, field, name=doc.get("name"))
    if "potentials" in doc:
        pots = doc["potentials"]
        if not isinstance(pots, dict) or "V1" not in pots or "V2" not in pots:
            raise ParseError(f"{where}.potentials", "expected {'V1': [...], 'V2': [...]}")
        if "T" not in doc:
            raise ParseError(f"{where}.T", "missing")
        V1 = parse_poly(field, pots["V1"], "x", f"{where}.potentials.V1")
        V2 = parse_poly(field, pots["V2"], "y", f"{where}.potentials.V2")
        T = parse_scalar(field, doc["T"], f"{where}.T")
        return build_curve_from_potentials(V1, V2, T, kappa, field, name=doc.get("name"))
    raise ParseError(where, "needs either x and y or potentials")


def tensor_json(field, data):
    """Pole tensor {((b, d), ...): c} as a sorted list of {poles, coeff}."""
    return [{"poles": [list(bd) for bd in key], "coeff": field.to_str(c)}
            for key, c in sorted(data.items())]


def correlator_json(corr):
    f = corr.field
    doc = {"h": corr.h, "k": corr.k, "l": corr.l,
           "branch_points": [f.to_str(a) for a in corr.curve.branch_points]}
    if corr.kind == "bergmann":
        doc["bergmann"] = "dz1 dz2 / (z1 - z2)^2"
        doc["poles"] = []
    else:
        doc["poles"] = tensor_json(f, corr.data)
        doc["tables"] = [{str(b): ds for b, ds in t.items()} for t in corr.partial_fractions()]
    return doc


def mixed_json(mc):
    f = mc.field
    terms = []
    for key, r in sorted(mc.terms.items(), key=lambda kv: repr(kv[0])):
        slots = [["xi", e[1], e[2]] if e[0] == "xi" else ["link", e[1]] for e in key]
        terms.append({"slots": slots, "q": rf_json(f, r)})
    return {"h": mc.h, "k": mc.k, "l": 1,
            "branch_points": [f.to_str(a) for a in mc.curve.branch_points], "terms": terms}


def free_energy_json(res):
    return {"h": res.h, "value": scalar(res.curve.field, res.value), "route": res.route,
            "sign_convention": "calibrated-gaussian"}


def dumps(doc):
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"
