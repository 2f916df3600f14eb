"""H_x / H_y operators, free energies F^(h) (h >= 2) and F^(0).

On a genus-zero curve with oo_x at z = oo and oo_y at z = 0,

    H_x phi = Res_{oo_x} V1(x) phi - Res_{oo_y} (V2(y) - x y) phi + T int_{oo_x}^{oo_y} phi

with the kappa = 1 potentials.  On a pole-basis element xi_{b,d} every term
is an exact rational number, so H_x acts on correlator tensors as a linear
functional in one slot.
"""
from __future__ import annotations

from collections import defaultdict
from math import comb

import mpmath
import sympy
from gmpy2 import mpq

from .curve import swap_xy
from .errors import TruncationInsufficient, UnsupportedOrder
from .polynomial import RationalFunction
from .recursion import RecursionEngine, drop_constant, residue_of_product
from .scalars import ExactField

# one-time calibration: the operator formula gives the free energy with this
# sign relative to the coefficient of hbar^(2h-2) in log Z.  Fixed by the GUE
# genus-two value -1/240 (see tests/test_free_energy.py).
SIGN = -1


def _laurent_dict(rf):
    low, cs = rf.laurent_coeffs()
    return {low + i: c for i, c in enumerate(cs) if c != 0}


def _compose_poly(poly, rf):
    """poly(rf(z)) as a rational function (``poly`` over the same field)."""
    acc = RationalFunction.zero(rf.field)
    for c in reversed(poly.coeffs):
        acc = acc * rf + c
    return acc


class HOperator:
    """Linear functional phi -> H phi on the pole basis of one curve.

    ``which='x'`` is H_x; ``which='y'`` is H_y written on the same
    parametrization (residue at oo_y with V2, at oo_x with V1 - x y, and the
    path from oo_y to oo_x).
    """

    def __init__(self, curve, which="x"):
        if not curve.has_potentials():
            raise ValueError("H operators need the potentials")
        self.curve = curve
        self.which = which
        self.field = curve.field
        xy = curve.x * curve.y
        v1x = _compose_poly(curve.V1n, curve.x)
        v2y = _compose_poly(curve.V2n, curve.y)
        if which == "x":
            self.at_inf = _laurent_dict(v1x)           # weight at z = oo
            self.at_zero = _laurent_dict(v2y - xy)     # weight at z = 0 (enters with minus)
        else:
            self.at_zero = _laurent_dict(v2y)          # weight at z = 0
            self.at_inf = _laurent_dict(v1x - xy)      # weight at z = oo (enters with minus)
        self._cache = {}

    def on_basis(self, b, d):
        """H applied to xi_{b,d} = dz/(z - a_b)^d."""
        key = (b, d)
        v = self._cache.get(key)
        if v is None:
            a = self.curve.branch_points[b]
            v = self.on_pole(a, d)
            self._cache[key] = v
        return v

    def on_pole(self, a, d):
        f = self.field
        r_inf = _res_pole(f, self.at_inf, a, d, "inf")
        r0 = _res_pole(f, self.at_zero, a, d, "zero")
        # int_oo^0 dz/(z-a)^d
        integral = -f.one / ((d - 1) * (-a) ** (d - 1))
        if self.which == "x":
            return r_inf - r0 + self.curve.Tn * integral
        return r0 - r_inf - self.curve.Tn * integral

    def apply(self, data, slot=0):
        """Apply H in variable ``slot`` of a pole tensor; returns the reduced tensor."""
        out = defaultdict(lambda: self.field.zero)
        for key, c in data.items():
            b, d = key[slot]
            rest = key[:slot] + key[slot + 1:]
            out[rest] = out[rest] + c * self.on_basis(b, d)
        return {k: v for k, v in out.items() if not (v == 0)}

    def apply_scalar(self, data):
        return self.apply(data).get((), self.field.zero)

    def on_bergmann(self):
        """H_x B(., q) as a Laurent polynomial in q: {exponent: coefficient of q^e dq}."""
        if self.which != "x":
            raise NotImplementedError
        f = self.field
        out = defaultdict(lambda: f.zero)
        # Res_{z=oo} V1(x) dz/(z-q)^2 = -sum_j (j+1) q^j [z^(j+1)] V1(x)
        for e, c in self.at_inf.items():
            j = e - 1
            if j >= 0:
                out[j] = out[j] - c * (j + 1)
        # - Res_{z=0} G dz/(z-q)^2 = - sum_j (j+1) q^(-j-2) [z^(-j-1)] G
        for e, c in self.at_zero.items():
            j = -1 - e
            if j >= 0:
                out[-j - 2] = out[-j - 2] - c * (j + 1)
        # T int_oo^0 dz/(z-q)^2 = T/q
        out[-1] = out[-1] + self.curve.Tn
        return {k: v for k, v in out.items() if not (v == 0)}


def minus_y_dx(curve):
    """-y(q) x'(q) as {exponent: coefficient}."""
    prod = curve.y * curve.dx
    d = _laurent_dict(prod)
    return {k: -v for k, v in d.items()}


def check_hx_b(curve):
    """True when H_x B(., q) = -y(q) dx(q) exactly."""
    H = HOperator(curve, "x")
    lhs = H.on_bergmann()
    rhs = minus_y_dx(curve)
    f = curve.field
    keys = set(lhs) | set(rhs)
    return all(f.eq(lhs.get(k, f.zero), rhs.get(k, f.zero)) for k in keys), lhs, rhs


# ---------------------------------------------------------------------------

class FreeEnergyResult:
    def __init__(self, h, value, route, curve):
        self.h = h
        self.value = value
        self.route = route
        self.curve = curve

    def __repr__(self):
        return f"FreeEnergyResult(h={self.h}, value={self.value}, route={self.route!r})"


def kappa_factor(curve, h):
    f = curve.field
    return curve.kappa ** (2 - 2 * h) if h != 1 else f.one


def free_energy(curve, h, route="operator", engine=None):
    """F^(h) for h >= 2 by the operator route or the bivalent-vertex route."""
    if h < 2:
        raise UnsupportedOrder(f"F^({h}) is not produced by this construction (h >= 2 required)")
    engine = engine or RecursionEngine(curve)
    if route == "operator":
        H = HOperator(curve, "x")
        raw = H.apply_scalar(engine.w(h, 1)) / (2 * h - 2)
    elif route == "vertex":
        raw = _vertex_route(engine, h) / (2 - 2 * h)
    else:
        raise ValueError(f"unknown route {route!r}")
    return FreeEnergyResult(h, SIGN * raw * kappa_factor(curve, h), route, curve)


def _vertex_route(engine, h):
    """sum_alpha Res K_F(q) [W_2^(h-1)(q, qbar) + sum' W W] with
    K_F = -1/2 int_{qbar}^q y dx / ((y(q) - y(qbar)) dx(q))."""
    f = engine.field
    curve = engine.curve
    N = engine.order_for(h, 1)
    while True:
        try:
            total = f.zero
            for alpha in range(len(curve.branch_points)):
                loc = engine.local(alpha, N)
                ser = engine._bracket(h, 0, (), loc).get(())
                if ser is None:
                    continue
                G = (loc.y_loc * curve.dx.series_at(loc.a, loc.L)).truncate(loc.L).integral()
                K = (drop_constant(G - G.compose(loc.sigma)).mul(loc.D, loc.N) * (-loc.half)).truncate(loc.N)
                total = total + residue_of_product(K, ser)
            return total
        except TruncationInsufficient:
            N *= 2
            if N > engine.max_order:
                raise


# ---------------------------------------------------------------------------
# F^(0)

class LogSum:
    """Exact number ``rational + sum c_p log p`` over primes p."""

    def __init__(self, rational, logs=None):
        self.rational = mpq(rational)
        self.logs = {int(p): mpq(c) for p, c in (logs or {}).items() if c != 0}

    @classmethod
    def log_of(cls, r):
        r = mpq(r)
        if r <= 0:
            raise ValueError("log of a non-positive rational")
        logs = defaultdict(lambda: mpq(0))
        for p, e in sympy.factorint(int(r.numerator)).items():
            logs[p] += e
        for p, e in sympy.factorint(int(r.denominator)).items():
            logs[p] -= e
        return cls(0, logs)

    def __add__(self, other):
        if not isinstance(other, LogSum):
            other = LogSum(other)
        logs = defaultdict(lambda: mpq(0), self.logs)
        for p, c in other.logs.items():
            logs[p] += c
        return LogSum(self.rational + other.rational, logs)

    __radd__ = __add__

    def __neg__(self):
        return LogSum(-self.rational, {p: -c for p, c in self.logs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, LogSum) else LogSum(-mpq(other)))

    def __mul__(self, k):
        k = mpq(k)
        return LogSum(self.rational * k, {p: c * k for p, c in self.logs.items()})

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / mpq(k))

    def __eq__(self, other):
        if not isinstance(other, LogSum):
            other = LogSum(other)
        return self.rational == other.rational and self.logs == other.logs

    def __float__(self):
        return float(self.rational) + sum(float(c) * float(mpmath.log(p)) for p, c in self.logs.items())

    def to_str(self):
        parts = [ExactField().to_str(self.rational)]
        parts += [f"{ExactField().to_str(c)}*log({p})" for p, c in sorted(self.logs.items())]
        return " + ".join(parts)

    def __repr__(self):
        return f"LogSum({self.to_str()})"


def _log(field, r):
    if isinstance(field, ExactField):
        return LogSum.log_of(r)
    return field.ctx.log(r)


def regularized_integral(curve):
    """reg int_{oo_x}^{oo_y} y dx = [z^0](V1(x) + V2(y) - x y) - T log(g * gt),

    g, gt being the leading coefficients of x at z = oo and of y at z = 0.
    """
    f = curve.field
    v1x = _compose_poly(curve.V1n, curve.x)
    v2y = _compose_poly(curve.V2n, curve.y)
    const = _laurent_dict(v1x + v2y - curve.x * curve.y).get(0, f.zero)
    lx, cx = curve.x.laurent_coeffs()
    ly, cy = curve.y.laurent_coeffs()
    g = cx[-1]
    gt = cy[0] if ly == -1 else None
    if gt is None:
        raise ValueError("y must have a simple pole at z = 0")
    return const, g * gt


def free_energy_f0(curve):
    """F^(0) from 2 F^(0) = H_x(y dx) with the regularized path integral.

    Returns a :class:`LogSum` in exact mode, a float otherwise.
    """
    f = curve.field
    T = curve.Tn
    ydx = _laurent_dict(curve.y * curve.dx)
    v1x = _laurent_dict(_compose_poly(curve.V1n, curve.x))
    g0 = _laurent_dict(_compose_poly(curve.V2n, curve.y) - curve.x * curve.y)
    # Res_{z=oo} A dz = -[z^-1] A ; Res_{z=0} A dz = [z^-1] A
    res_inf = -sum((c * ydx.get(-1 - e, f.zero) for e, c in v1x.items()), f.zero)
    res_0 = sum((c * ydx.get(-1 - e, f.zero) for e, c in g0.items()), f.zero)
    const, gg = regularized_integral(curve)
    rational = (res_inf - res_0 + T * const) / 2
    scale = curve.kappa ** 2
    if isinstance(f, ExactField):
        return (LogSum(rational) + LogSum.log_of(gg) * (-T * T / 2)) * scale
    return (rational - T * T * f.ctx.log(gg) / 2) * scale


# ---------------------------------------------------------------------------
# checks

def check_free1(curve, h, engine=None):
    """(1 - 2h) W_1^(h) = H_x W_2^(h) (second slot integrated)."""
    engine = engine or RecursionEngine(curve)
    H = HOperator(curve, "x")
    lhs = {k: v * (1 - 2 * h) for k, v in engine.w(h, 1).items()}
    rhs = H.apply(engine.w(h, 2), slot=1)
    f = curve.field
    keys = set(lhs) | set(rhs)
    ok = all(f.eq(lhs.get(k, f.zero), rhs.get(k, f.zero)) for k in keys)
    return ok, lhs, rhs


def check_homogeneity(build, params, h, lam):
    """Rebuild from lambda * (couplings, T, kappa) and compare F^(h) * lambda^(2h-2).

    ``build(params)`` must return a curve; ``params`` is a dict with keys
    'V1', 'V2', 'T', 'kappa' (polynomials and scalars).
    """
    c1 = build(params)
    scaled = {"V1": params["V1"] * lam, "V2": params["V2"] * lam,
              "T": params["T"] * lam, "kappa": params["kappa"] * lam}
    c2 = build(scaled)
    F1 = free_energy(c1, h).value
    F2 = free_energy(c2, h).value
    expected = F1 * mpq(lam) ** (2 - 2 * h) if isinstance(c1.field, ExactField) else F1 * c1.field.convert(lam) ** (2 - 2 * h)
    return c1.field.eq(F2, expected), F1, F2


def path_integral_of_tensor(curve, data, slot):
    """int_{oo_x}^{oo_y} in variable ``slot`` of a pole tensor (z from oo to 0)."""
    f = curve.field
    bps = curve.branch_points
    out = defaultdict(lambda: f.zero)
    for key, c in data.items():
        b, d = key[slot]
        a = bps[b]
        val = -f.one / ((d - 1) * (-a) ** (d - 1))
        rest = key[:slot] + key[slot + 1:]
        out[rest] = out[rest] + c * val
    return dict(out)


def check_h_sum(curve, data):
    """(H_x + H_y) phi = Res_{oo_x} x y phi + Res_{oo_y} x y phi for a one-variable tensor."""
    f = curve.field
    Hx, Hy = HOperator(curve, "x"), HOperator(curve, "y")
    lhs = Hx.apply_scalar(data) + Hy.apply_scalar(data)
    xy = _laurent_dict(curve.x * curve.y)
    rhs = f.zero
    for key, c in data.items():
        (b, d), = key
        a = curve.branch_points[b]
        rhs = rhs + c * (_res_pole(f, xy, a, d, "inf") + _res_pole(f, xy, a, d, "zero"))
    return f.eq(lhs, rhs), lhs, rhs


def _res_pole(f, weight, a, d, where):
    """Res of weight(z) dz/(z-a)^d at z = oo or z = 0, weight a Laurent dict."""
    acc = f.zero
    for e, c in weight.items():
        j = e + 1 - d if where == "inf" else -1 - e
        if j < 0:
            continue
        if where == "inf":
            acc = acc - c * comb(j + d - 1, d - 1) * a ** j
        else:
            acc = acc + c * comb(j + d - 1, d - 1) * (-1) ** d / a ** (d + j)
    return acc


def check_xy_symmetry(curve, h, engine=None, engine_swapped=None):
    """H_x W_1^(h) on the curve against the same quantity on the swapped curve."""
    sw = swap_xy(curve)
    e1 = engine or RecursionEngine(curve)
    e2 = engine_swapped or RecursionEngine(sw)
    a = HOperator(curve, "x").apply_scalar(e1.w(h, 1))
    b = HOperator(sw, "x").apply_scalar(e2.w(h, 1))
    return curve.field.eq(a, b), a, b


def _physical_point(curve, x0, iters=200):
    """z on the physical x-sheet (near z = oo) with x(z) = x0, by Newton."""
    f = curve.field
    x, dx = curve.x, curve.dx
    gamma = x.num.lc() / x.den.lc()
    z = f.convert(x0) / gamma
    for _ in range(iters):
        step = (x(z) - x0) / dx(z)
        z = z - step
        if abs(step) <= f.tol * max(1, abs(z)):
            break
    return z


def _eval_one(curve, data, z):
    bps = curve.branch_points
    total = curve.field.zero
    for key, c in data.items():
        (b, d), = key
        total = total + c / (z - bps[b]) ** d
    return total


def t_derivative_sides(build, params, h, delta, x0):
    """(central difference in T of W_1^(h)/dx at fixed x = x0, int_{oo_x}^{oo_y} W_2^(h)(p, .)/dx(p)).

    ``build(params)`` returns a float-backend curve; ``params['T']`` is varied.
    """
    def w1_at(T):
        c = build(dict(params, T=T))
        z = _physical_point(c, x0)
        return _eval_one(c, RecursionEngine(c).w(h, 1), z) / c.dx(z)
    c0 = build(params)
    f = c0.field
    T = f.convert(params["T"])
    delta = f.convert(delta)
    fd = (w1_at(T + delta) - w1_at(T - delta)) / (2 * delta)
    z = _physical_point(c0, x0)
    rhs = _eval_one(c0, path_integral_of_tensor(c0, RecursionEngine(c0).w(h, 2), 1), z) / c0.dx(z)
    return fd, rhs


def check_t_derivative(build, params, h, deltas=("1e-4", "1e-5", "1e-6"), x0=5):
    """Errors of the finite difference against the path integral, and the observed order.

    The convergence order is the mean of log10(e_i / e_{i+1}) over successive
    decades of delta (2 for a central difference).
    """
    errors, values = [], []
    for d in deltas:
        fd, rhs = t_derivative_sides(build, params, h, d, x0)
        errors.append(abs(fd - rhs))
        values.append((fd, rhs))
    slopes = [mpmath.log10(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]
    order = sum(slopes) / len(slopes)
    rel = errors[-1] / max(abs(values[-1][1]), mpmath.mpf(10) ** -30)
    return {"h": h, "deltas": list(deltas), "errors": errors, "order": order,
            "relative_error": rel, "values": values}
