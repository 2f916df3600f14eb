"""Sheet-sum identities checked as Laurent series near x = oo.

With x = t^(-d2) the d2 + 1 preimages of x are Laurent series in t: one on
the physical sheet (z -> oo) and d2 near oo_y (z -> 0).  Every identity is
then a statement about finitely many coefficients in t.
"""
from __future__ import annotations

import sympy
from gmpy2 import mpq

from .polynomial import Polynomial, RationalFunction
from .recursion import RecursionEngine
from .scalars import ExactField
from .series import LaurentSeries


class Sheet:
    """One preimage z(t) of x = t^(-d2)."""

    def __init__(self, where, param):
        self.where = where      # "inf": param is w = 1/z ; "zero": param is z
        self.param = param

    def function(self, rf, order):
        """Series in t of rf(z(t))."""
        if self.where == "inf":
            ser = rf.series_at_infinity(order)
        else:
            ser = rf.series_at(rf.field.zero, order)
        return ser.compose(self.param)

    def dz_dt(self):
        if self.where == "zero":
            return self.param.derivative()
        w = self.param
        return -(w.derivative() * (w * w).inverse())


def _root(field, c, k):
    """A k-th root of c in the field (k = 1, 2)."""
    if k == 1:
        return c
    if isinstance(field, ExactField):
        r = sympy.sqrt(sympy.Rational(int(c.numerator), int(c.denominator)))
        if not r.is_Rational or r <= 0:
            raise ValueError(f"{c} has no rational square root; sheets are not defined over the field")
        return mpq(int(r.p), int(r.q))
    if c <= 0:
        raise ValueError("negative leading coefficient: sheets are complex")
    return field.ctx.sqrt(c)


def sheets(curve, order):
    """The d2 + 1 sheets over x = t^(-d2), each known to t^order (d2 = 1 or 2)."""
    f = curve.field
    x = curve.x
    lx, cx = x.laurent_coeffs()
    d2 = -lx
    if d2 not in (1, 2):
        raise ValueError("series sheets are implemented for d2 = 1, 2")
    n = order + 4 * d2 + 8
    out = []
    # physical sheet: u = 1/x as a series in w = 1/z, reverted, then u = t^d2
    u_w = x.series_at_infinity(n).inverse()
    w_u = u_w.reversion()
    tpow = LaurentSeries.monomial(f, f.one, d2, n)
    out.append(Sheet("inf", w_u.compose(tpow).truncate(n)))
    # sheets near z = 0: x = z^-d2 h(z), t = omega z h(z)^(-1/d2)
    h = LaurentSeries.from_coeffs(f, cx, 0, n)
    h0 = cx[0]
    r0 = _root(f, h0, d2)
    hn = h * (f.one / h0)
    root = hn if d2 == 1 else hn.sqrt()
    base = LaurentSeries.variable(f, n) * (root.inverse(0) * (f.one / r0))
    for omega in ([f.one] if d2 == 1 else [f.one, -f.one]):
        t_of_z = (base * omega).truncate(n)
        out.append(Sheet("zero", t_of_z.reversion()))
    return d2, out


def _poles_rf(curve, data):
    """Sum of c / (z - a_b)^d over a one-variable tensor, as a rational function."""
    return _tensor_rf(curve, list(data.items()))


def _diag_rf(curve, data):
    """W(z, z) for a two-variable tensor."""
    return _tensor_rf(curve, list(data.items()))


def _tensor_rf(curve, items):
    """sum c prod_j 1/(z - a_bj)^dj over a common denominator, without gcds."""
    f = curve.field
    bps = curve.branch_points
    lins = [Polynomial(f, [-a, f.one]) for a in bps]
    top = [0] * len(bps)
    exps = []
    for key, _ in items:
        e = [0] * len(bps)
        for b, d in key:
            e[b] += d
        exps.append(e)
        top = [max(u, v) for u, v in zip(top, e)]
    pw = {}

    def lp(b, k):
        if (b, k) not in pw:
            pw[(b, k)] = lins[b] ** k
        return pw[(b, k)]

    num = Polynomial(f, [])
    for (key, c), e in zip(items, exps):
        term = Polynomial(f, [c])
        for b in range(len(bps)):
            if top[b] > e[b]:
                term = term * lp(b, top[b] - e[b])
        num = num + term
    den = Polynomial(f, [f.one])
    for b in range(len(bps)):
        if top[b]:
            den = den * lp(b, top[b])
    return RationalFunction(num, den, reduce=False)


def _sum_over(sheets_, rf, order, form=False):
    acc = None
    for sh in sheets_:
        s = sh.function(rf, order + 12)
        if form:
            s = s * sh.dz_dt()
        acc = s if acc is None else acc + s
    return acc


def _vanishes(ser, lo, hi, skip=lambda j: False):
    bad = []
    for j in range(lo, hi + 1):
        if skip(j):
            continue
        c = ser.coeff(j)
        if not ser.field.is_zero(c):
            bad.append((j, c))
    return bad


def schwarzian(x):
    """{x; z} = x'''/x' - 3/2 (x''/x')^2 as a rational function."""
    d1 = x.derivative()
    d2 = d1.derivative()
    d3 = d2.derivative()
    r = d2 / d1
    return d3 / d1 - r * r * (x.field.one * 3 / 2)


def verify_loop_identities(curve, h, order=20, engine=None, q=None):
    """Check the four sheet-sum identities up to genus h; returns {name: bool} and details."""
    f = curve.field
    engine = engine or RecursionEngine(curve)
    d2, shs = sheets(curve, order + 30)
    report = {}
    details = {}
    # x as a series: t^-d2 exactly
    X = LaurentSeries.monomial(f, f.one, -d2, order + 30)
    xcheck = _sum_over(shs[:1], curve.x, order)
    assert not _vanishes(xcheck - X, -d2, order)

    # (i) sum_i y = V1'(x) - tt_{d2}/tt_{d2+1}  (plus x/tt_2 when d2 = 1)
    sy = _sum_over(shs, curve.y, order)
    V2 = curve.V2n
    tt = lambda k: V2.coeff(k) * k
    const = tt(d2) / tt(d2 + 1)
    dv1 = curve.V1n.derivative()
    rhs = LaurentSeries.zero(f, order + 30)
    for c in reversed(dv1.coeffs):
        rhs = rhs * X + c
    if d2 == 1:
        # the single non-physical sheet solves V2'(y) = x exactly
        rhs = rhs + X * (f.one / tt(2))
    bad = _vanishes(sy - rhs + const, -d2 * dv1.degree - 2, order)
    report["sum_y"] = not bad
    details["sum_y"] = bad

    # (ii) sum_i W_1^(h')(p^i) = 0
    ok = True
    W1 = {}
    for hp in range(1, h + 1):
        W1[hp] = _poles_rf(curve, engine.w(hp, 1))
        s = _sum_over(shs, W1[hp], order, form=True)
        bad = _vanishes(s, s.val, order)
        ok = ok and not bad
        details[f"sum_W1_{hp}"] = bad
    report["sum_W1"] = ok

    # (iii) sum_i W_2^(h')(p^i, q) = delta_{h'0} dx(p) dx(q) / (x(p) - x(q))^2
    q = f.convert(q if q is not None else mpq(7, 3))
    xq, dxq = curve.x(q), curve.dx(q)
    ok = True
    for hp in range(0, h + 1):
        if hp == 0:
            rf = RationalFunction(Polynomial(f, [f.one]), Polynomial(f, [-q, f.one]) ** 2)
        else:
            rf = _poles_rf(curve, engine.w(hp, 1, (q,)))
        s = _sum_over(shs, rf, order, form=True)
        if hp == 0:
            # dx/dt / (t^-d2 - xq)^2 = -d2 t^(d2-1) / (1 - xq t^d2)^2
            n = order + 30
            one_minus = LaurentSeries.from_coeffs(f, [f.one] + [f.zero] * (d2 - 1) + [-xq], 0, n)
            inv = one_minus.inverse(0)
            target = (inv * inv) * LaurentSeries.monomial(f, -f.one * d2 * dxq, d2 - 1, n)
            s = s - target
        bad = _vanishes(s, s.val, order)
        ok = ok and not bad
        details[f"sum_W2_{hp}"] = bad
    report["sum_W2"] = ok

    # (iv) 2 sum y w^(h') - sum sum_m w^(m) w^(h'-m) - sum Wbar_2^(h'-1)(p,p)/dx^2
    #      is a polynomial in x
    ok = True
    dx = curve.dx
    dx2 = dx * dx
    for hp in range(1, h + 1):
        W1.setdefault(hp, _poles_rf(curve, engine.w(hp, 1)))
        comb = curve.y * W1[hp] / dx * 2
        for m in range(1, hp):
            W1.setdefault(m, _poles_rf(curve, engine.w(m, 1)))
            comb = comb - W1[m] * W1[hp - m] / dx2
        if hp == 1:
            # Wbar_2^(0)(p, p) = lim B - dx dx/(x - x)^2 = -{x; z}/6 dz^2
            comb = comb + schwarzian(curve.x) / dx2 * (f.one / 6)
        else:
            comb = comb - _diag_rf(curve, engine.w(hp - 1, 2)) / dx2
        s = _sum_over(shs, comb, order)
        bad = _vanishes(s, s.val, order, skip=lambda j: j <= 0 and j % d2 == 0)
        ok = ok and not bad
        details[f"polynomial_{hp}"] = bad
    report["polynomial"] = ok
    return report, details


def kernel_finiteness(curve, engine=None, dmax=6, z0=None):
    """1/2 dE/(y - ybar) has no pole at any branch point."""
    f = curve.field
    engine = engine or RecursionEngine(curve)
    z0 = f.convert(z0 if z0 is not None else mpq(11, 7))
    for alpha in range(len(curve.branch_points)):
        loc = engine.local(alpha, 12)
        for d in range(2, dmax + 1):
            num = LaurentSeries.monomial(f, f.one, d - 1, loc.L) - loc.sigma_pow(d - 1)
            if (num * loc.dy.inverse()).normalized().valuation() < 0:
                return False
        g = loc._base_series(z0 - loc.a, loc.L)
        if ((g - g.compose(loc.sigma)) * loc.dy.inverse()).normalized().valuation() < 0:
            return False
    return True
