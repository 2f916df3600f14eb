"""Correlators with one y-type argument, W_{k,1}^(h).

The y-type point q lives on the same z-line as the x-type points p_i.  A
mixed correlator is stored exactly as

    sum over keys  prod_i [xi_{b_i,d_i}(p_i)  or  1/(p_i - q)^e_i]  *  R_key(q)

with R_key a rational function of q.  W_{k,1}^(h) is obtained from the
propagator-cutting representation

    W_{k,1}^(h)(p_K, q) = -W_{k+1,0}^(h)(p_K, q) + d_q f^(h)(p_K; q),

where f^(h) sums the diagrams of W_{k,0}^(h) with one edge cut open at q.
The cut sum satisfies a recursion of its own (product rule over the
recursion bracket), which is what is implemented here.
"""
from __future__ import annotations

from collections import defaultdict
from math import comb

import sympy
from sympy.integrals.rationaltools import ratint

from .errors import TruncationExceeded, TruncationInsufficient
from .expansions import InfinityChart, kappa_power
from .polynomial import Polynomial, RationalFunction
from .recursion import RecursionEngine, is_stable, lincomb, residue_of_product
from .series import LaurentSeries

# weight of one cut: CUT_SIGN / (dx(q) dy(q)).  Fixed so that the (h=0, k=2)
# instance reproduces the residue formula for W_{2,1}^(0), whose sign is in
# turn confirmed by the Wick oracle (tests/test_mixed.py).
CUT_SIGN = -1

LINK = "Bq"   # slot entry meaning B(p_j, q) = 1/(p_j - q)^2 in the cut sum


def _qkey(qf):
    return tuple(sorted(qf))


class CutSum:
    """Cut sums f^(h) as tensors keyed by (slot entries, q-factors).

    A slot entry is a pole index (b, d) or ``LINK``; the q-factors are a
    sorted tuple of pole indices, each standing for xi_{b,d}(q).  The global
    factor CUT_SIGN / (x'(q) y'(q)) is implicit.
    """

    def __init__(self, curve, engine=None):
        self.curve = curve
        self.field = curve.field
        self.engine = engine or RecursionEngine(curve)
        self._gv = {}

    # W pieces ------------------------------------------------------------------
    def _w_at(self, loc, m, n, at):
        """W^(m)(l; n symbolic legs) at l = a+s or a+sigma(s): {(slots, ()): series}."""
        f = self.field
        if m == 0 and n == 1:
            return {(k, ()): v for k, v in loc.b_symbolic(at).items()}
        T = self.engine.w(m, 1 + n)
        xi = loc.xi_s if at == "s" else loc.xi_sig
        grouped = defaultdict(list)
        for key, c in T.items():
            grouped[key[1:]].append((c, xi(key[0])))
        return {(I, ()): lincomb(f, t, loc.N) for I, t in grouped.items()}

    def _b_lq_w(self, loc, m, n, at):
        """B(l, q) W^(m)(q; legs) with l = a+s / a+sigma(s)."""
        f = self.field
        out = defaultdict(list)
        bl = loc.b_symbolic(at)   # {((alpha, j+2),): series}
        if m == 0 and n == 1:
            # B(l, q) B(q, t)
            for (qi,), ser in bl.items():
                out[((LINK,), (qi,))].append(ser)
        else:
            T = self.engine.w(m, 1 + n)
            for (qi,), ser in bl.items():
                for key, c in T.items():
                    out[(key[1:], _qkey((qi, key[0])))].append(ser * c)
        return {k: lincomb(f, [(f.one, s) for s in v], loc.N) for k, v in out.items()}

    def _gv_at(self, loc, m, n, at):
        """Vertex part of the cut sum of W^(m)(l; legs), root substituted at l."""
        f = self.field
        G = self.gv(m, n)
        xi = loc.xi_s if at == "s" else loc.xi_sig
        grouped = defaultdict(list)
        for (slots, qf), c in G.items():
            grouped[(slots[1:], qf)].append((c, xi(slots[0])))
        return {k: lincomb(f, t, loc.N) for k, t in grouped.items()}

    def _total_at(self, loc, m, n, at):
        """Cut sum of a child W^(m)(l; legs) including the edge entering it."""
        out = dict(self._b_lq_w(loc, m, n, at))
        if not (m == 0 and n == 1):
            for k, v in self._gv_at(loc, m, n, at).items():
                out[k] = out[k] + v if k in out else v
        return out

    # recursion -------------------------------------------------------------------
    def gv(self, h, n):
        """Vertex part of the cut sum of W_{n+1}^(h)(r; l_1..l_n), r symbolic."""
        if not is_stable(h, n + 1):
            return {}
        key = (h, n)
        res = self._gv.get(key)
        if res is not None:
            return res
        N = self.engine.order_for(h, n + 2)
        while True:
            try:
                res = self._gv_compute(h, n, N)
                break
            except TruncationInsufficient:
                N *= 2
                if N > self.engine.max_order:
                    raise TruncationExceeded(f"cut sum ({h}, {n}) needs series beyond {self.engine.max_order}")
        self._gv[key] = res
        return res

    def _gv_compute(self, h, n, N):
        f = self.field
        result = {}
        for alpha in range(len(self.curve.branch_points)):
            loc = self.engine.local(alpha, N)
            br = defaultdict(list)
            if h >= 1:
                if h == 1 and n == 0:
                    # loop leaf B(s, sigma): cut gives B(s, q) B(q, sigma)
                    for (q1,), s1 in loc.b_symbolic("s").items():
                        for (q2,), s2 in loc.b_symbolic("sig").items():
                            br[((), _qkey((q1, q2)))].append(s1.mul(s2, 0))
                else:
                    # sub W^(h-1)(s; sigma, legs): slot 0 of the legs is sigma
                    sub = dict(self._b_lq_w(loc, h - 1, n + 1, "s"))
                    for k, v in self._gv_at(loc, h - 1, n + 1, "s").items():
                        sub[k] = sub[k] + v if k in sub else v
                    for (slots, qf), ser in sub.items():
                        first, rest = slots[0], slots[1:]
                        if first == LINK:
                            for (qi,), sb in loc.b_symbolic("sig").items():
                                br[(rest, _qkey(qf + (qi,)))].append(ser.mul(sb, 0))
                        else:
                            br[(rest, qf)].append(ser.mul(loc.xi_sig(first), 0))
            for mask in range(1 << n):
                JS = [i for i in range(n) if mask >> i & 1]
                KS = [i for i in range(n) if not mask >> i & 1]
                for m in range(h + 1):
                    if (m == 0 and not JS) or (m == h and not KS):
                        continue
                    for left, right in ((self._total_at(loc, m, len(JS), "s"), self._w_at(loc, h - m, len(KS), "sig")),
                                        (self._w_at(loc, m, len(JS), "s"), self._total_at(loc, h - m, len(KS), "sig"))):
                        for (I1, q1), s1 in left.items():
                            for (I2, q2), s2 in right.items():
                                slots = [None] * n
                                for i, v in zip(JS, I1):
                                    slots[i] = v
                                for i, v in zip(KS, I2):
                                    slots[i] = v
                                br[(tuple(slots), _qkey(q1 + q2))].append(s1.mul(s2, 0))
            for (I, qf), lst in br.items():
                ser = lincomb(f, [(f.one, x) for x in lst], 0)
                if not ser.coeffs:
                    continue
                for d in range(2, 3 - ser.val):
                    r = residue_of_product(loc.kernel(d), ser)
                    if r != 0:
                        k = (((alpha, d),) + I, qf)
                        result[k] = result[k] + r if k in result else r
        return {k: v for k, v in result.items() if not (v == 0)}

    def f(self, h, k):
        """f^(h)(p_1; p_2..p_k; q) as {(slots, qfactors): coeff} (implicit CUT_SIGN/(x'y')(q))."""
        if h == 0 and k < 2:
            raise ValueError("f^(0) needs k >= 2")
        out = defaultdict(lambda: self.field.zero)
        # root edge: B(p1, q) W^(h)(q; p2..pk)
        if h == 0 and k == 2:
            out[((LINK, LINK), ())] += self.field.one
        else:
            for key, c in self.engine.w(h, k).items():
                out[((LINK,) + key[1:], (key[0],))] += c
        for kk, c in self.gv(h, k - 1).items():
            out[kk] += c
        return {kk: v for kk, v in out.items() if not (v == 0)}


# ---------------------------------------------------------------------------
# exact mixed correlators

class MixedCorrelator:
    """sum_key prod_i P_i(p_i, q) R_key(q), P_i = xi_{b,d}(p_i) or 1/(p_i - q)^e.

    Keys are tuples over the k x-type slots of ``("xi", b, d)`` or
    ``("link", e)``; values are rational functions of q.  The object is the
    coefficient of dp_1..dp_k dq.
    """

    def __init__(self, h, k, terms, curve):
        self.h, self.k, self.l = h, k, 1
        self.curve = curve
        self.terms = {key: r for key, r in terms.items() if not r.num.is_zero()}

    @property
    def field(self):
        return self.curve.field

    def __add__(self, other):
        out = dict(self.terms)
        for key, r in other.terms.items():
            out[key] = out[key] + r if key in out else r
        return MixedCorrelator(self.h, self.k, out, self.curve)

    def __neg__(self):
        return MixedCorrelator(self.h, self.k, {k: -r for k, r in self.terms.items()}, self.curve)

    def __sub__(self, other):
        return self + (-other)

    def d_q(self):
        out = {}

        def add(key, r):
            out[key] = out[key] + r if key in out else r
        for key, r in self.terms.items():
            add(key, r.derivative())
            for i, e in enumerate(key):
                if e[0] == "link":
                    # d/dq (p - q)^-n = n (p - q)^-(n+1)
                    n = e[1]
                    add(key[:i] + (("link", n + 1),) + key[i + 1:], r * n)
        return MixedCorrelator(self.h, self.k, out, self.curve)

    def evaluate(self, ps, q):
        f = self.field
        ps = [f.convert(p) for p in ps]
        q = f.convert(q)
        bps = self.curve.branch_points
        total = f.zero
        for key, r in self.terms.items():
            term = r(q)
            for p, e in zip(ps, key):
                if e[0] == "xi":
                    term = term / (p - bps[e[1]]) ** e[2]
                else:
                    term = term / (p - q) ** e[1]
            total = total + term
        return total

    def is_exact_in_q(self):
        """True when no q-residue survives: every R_key integrates without logarithms.

        Link terms 1/(p - q)^e (e >= 2) are exact on their own and only the
        pure q-parts of keys without links are tested (exact backend).
        """
        z = sympy.Symbol("q")
        for key, r in self.terms.items():
            if any(e[0] == "link" for e in key):
                continue
            expr = r.num.to_sympy(z) / r.den.to_sympy(z)
            prim = ratint(expr, z)
            if prim.has(sympy.log, sympy.atan, sympy.RootSum):
                return False
        return True

    def moments(self, deg):
        """{(a_1..a_k, b): coefficient} of prod u_i^(a_i+1) v^(b+1) in W/(prod dx(p_i) dy(q)).

        u_i = 1/x(p_i) near oo_x, v = 1/y(q) near oo_y; these are the connected
        mixed moments <tr M1^a_1 .. tr M1^a_k tr M2^b> (coefficient of
        hbar^(k - 1 + 2h), physical kappa).
        """
        return _moments(self, deg)


def _tensor_to_rf(curve, qf):
    """prod of xi_{b,d}(q) over q-factors, as a rational function of q."""
    f = curve.field
    num = Polynomial(f, [f.one])
    den = Polynomial(f, [f.one])
    for b, d in qf:
        den = den * Polynomial(f, [-curve.branch_points[b], f.one]) ** d
    return RationalFunction(num, den, reduce=False)


def _from_cut_sum(curve, h, k, data, extra_den):
    """Group {(slots, qf): c} into rational functions of q, dividing by extra_den(q)."""
    f = curve.field
    groups = defaultdict(list)
    for (slots, qf), c in data.items():
        key = tuple(("link", 2) if s == LINK else ("xi", s[0], s[1]) for s in slots)
        groups[key].append((qf, c))
    terms = {}
    for key, lst in groups.items():
        bps = curve.branch_points
        top = [0] * len(bps)
        for qf, _ in lst:
            e = [0] * len(bps)
            for b, d in qf:
                e[b] += d
            top = [max(u, v) for u, v in zip(top, e)]
        num = Polynomial(f, [])
        for qf, c in lst:
            e = [0] * len(bps)
            for b, d in qf:
                e[b] += d
            t = Polynomial(f, [c])
            for b in range(len(bps)):
                if top[b] > e[b]:
                    t = t * Polynomial(f, [-bps[b], f.one]) ** (top[b] - e[b])
            num = num + t
        den = Polynomial(f, [f.one])
        for b in range(len(bps)):
            if top[b]:
                den = den * Polynomial(f, [-bps[b], f.one]) ** top[b]
        r = RationalFunction(num, den, reduce=False)
        if extra_den is not None:
            r = r / extra_den
        terms[key] = r
    return MixedCorrelator(h, k, terms, curve)


def cut_sum_correlator(curve, h, k, cuts=None):
    """f^(h)(p_1..p_k; q) as a MixedCorrelator (a function of q)."""
    cuts = cuts or CutSum(curve)
    dxdy = curve.dx * curve.dy
    data = cuts.f(h, k)
    mc = _from_cut_sum(curve, h, k, data, dxdy)
    mc.terms = {key: r * CUT_SIGN for key, r in mc.terms.items()}
    return mc


def pure_as_mixed(curve, h, k, engine):
    """W_{k+1,0}^(h)(p_1..p_k, q) in the mixed representation (last slot -> q)."""
    if h == 0 and k == 1:
        return MixedCorrelator(0, 1, {(("link", 2),): RationalFunction.from_laurent(curve.field, [1], 0)}, curve)
    data = {}
    for key, c in engine.w(h, k + 1).items():
        data[(key[:-1], (key[-1],))] = c
    return _from_cut_sum(curve, h, k, data, None)


def compute_w_k1(curve, h, k, engine=None, cuts=None):
    """W_{k,1}^(h) = -W_{k+1,0}^(h) + d_q f^(h)."""
    if k + h <= 1:
        raise ValueError("the cutting representation needs |K| + h > 1")
    engine = engine or (cuts.engine if cuts else RecursionEngine(curve))
    cuts = cuts or CutSum(curve, engine)
    f_ = cut_sum_correlator(curve, h, k, cuts)
    return -pure_as_mixed(curve, h, k, engine) + f_.d_q()


def w_11_0(curve):
    """W_{1,1}^(0)(p, q) = -B(p, q)."""
    return MixedCorrelator(0, 1, {(("link", 2),): RationalFunction.from_laurent(curve.field, [-1], 0)}, curve)


def _bbb_over_dxdy(curve, p1, p2):
    """B(p1, q) B(p2, q) / (dx dy)(q) as a rational function of q."""
    f = curve.field
    lin1 = Polynomial(f, [-f.convert(p1), f.one])
    lin2 = Polynomial(f, [-f.convert(p2), f.one])
    r = RationalFunction(Polynomial(f, [f.one]), (lin1 * lin2) ** 2)
    return r / (curve.dx * curve.dy)


def w_21_0(curve, p1, p2, p3, engine=None):
    """W_{2,1}^(0)(p1, p2; p3) by the residue formula and by the total-derivative form.

    Returns ``(residue_form, derivative_form)``.
    """
    f = curve.field
    p1, p2, p3 = (f.convert(p) for p in (p1, p2, p3))
    if p1 == p2 or p1 == p3 or p2 == p3:
        raise ValueError("coincident points")
    engine = engine or RecursionEngine(curve)
    g = _bbb_over_dxdy(curve, p1, p2)
    # - sum_alpha Res_{mu_alpha} B B B/(dx dy) - Res_{q -> p3}
    res = f.zero
    for alpha, a in enumerate(curve.branch_points):
        loc = engine.local(alpha, 8)
        gs = g.series_at(a, 8)
        b3 = loc.b_numeric(p3, "s")
        res = res + (gs * b3).coeff(-1)
    at_p3 = g.derivative()(p3)
    residue_form = -res - at_p3
    # -W_{3,0}^(0) - d_{p3}[B(p1,p3) B(p2,p3)/(dx dy)(p3)]
    w30 = engine.evaluate(0, (p1, p2, p3))
    derivative_form = -w30 - at_p3
    return residue_form, derivative_form


# ---------------------------------------------------------------------------
# expansions at the infinities

def _mono(exps, c):
    return {tuple(exps): c}


def _mul(a, b, deg):
    out = defaultdict(lambda: 0)
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if max(e) > deg:
                continue
            out[e] = out[e] + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def _from_series(ser, var, nvars, deg):
    out = {}
    for j in range(ser.val, deg + 1):
        c = ser.coeff(j)
        if c != 0:
            e = [0] * nvars
            e[var] = j
            out[tuple(e)] = c
    return out


def _moments(mc, deg):
    curve = mc.curve
    f = curve.field
    k = mc.k
    n = k + 1
    order = deg + 4
    cx = InfinityChart(curve, order + 6, "x")
    cy = InfinityChart(curve, order + 6, "y")
    # z(u) near oo_x is 1/t(u); q(v) near oo_y
    t_u = cx.t_of_u          # t = 1/z as a series in u
    q_v = cy.t_of_u          # z as a series in v
    inv_dx = cx.point_series(curve.dx, order + 4).inverse()
    inv_dy = cy.point_series(curve.dy, order + 4).inverse()
    total = defaultdict(lambda: f.zero)
    for key, r in mc.terms.items():
        rq = cy.point_series(r, order + 4) * inv_dy
        acc = _from_series(rq, k, n, deg + 1)
        for i, e in enumerate(key):
            if e[0] == "xi":
                s = cx.basis_over_dfn(curve.branch_points[e[1]], e[2], order)
                acc = _mul(acc, _from_series(s, i, n, deg + 1), deg + 1)
            else:
                # (z - q)^-e = sum_m C(m+e-1, e-1) q^m z^(-e-m), then / x'(z)
                ee = e[1]
                part = defaultdict(lambda: f.zero)
                for m in range(0, deg + 2):
                    zs = (t_u ** (ee + m)) * inv_dx
                    qs = q_v ** m if m else LaurentSeries(f, 0, [f.one] + [f.zero] * order)
                    c = comb(m + ee - 1, ee - 1)
                    for ez, czv in _from_series(zs, i, n, deg + 1).items():
                        for eq, cq in _from_series(qs, k, n, deg + 1).items():
                            ex = tuple(x + y for x, y in zip(ez, eq))
                            part[ex] = part[ex] + czv * cq * c
                acc = _mul(acc, dict(part), deg + 1)
        for e, c in acc.items():
            total[e] = total[e] + c
    scale = curve.kappa ** kappa_power(mc.h, k, 1)
    out = {}
    for e, c in total.items():
        if all(x >= 1 for x in e) and not f.is_zero(c):
            out[tuple(x - 1 for x in e)] = c * scale
    return out


def check_xy_symmetry(curve, h, engine=None, engine_swapped=None):
    from .free_energy import check_xy_symmetry as _check
    return _check(curve, h, engine, engine_swapped)
