"""Expansions of correlators near the two infinities.

Near oo_x the local coordinate is u = 1/x(z) (z -> oo); near oo_y it is
v = 1/y(z) (z -> 0).  A one-variable correlator W gives the resolvent
w = W/dx = sum_j m_j u^(j+1), whose coefficients m_j are the moments of M1.
For the planar one-point function the convention is w = V1'(x) - y.
"""
from __future__ import annotations

from .series import LaurentSeries


class InfinityChart:
    """Parametrization z(u) of the physical sheet near oo_x (or oo_y)."""

    def __init__(self, curve, order, which="x"):
        self.curve = curve
        self.field = f = curve.field
        self.which = which
        self.order = order
        n = order + 4
        if which == "x":
            # t = 1/z ; u = 1/x
            xt = curve.x.series_at_infinity(n)
            ut = xt.inverse()
            self.t_of_u = ut.reversion()
            self.fn = curve.x
            self.dfn = curve.dx
        else:
            yz = curve.y.series_at(f.zero, n)
            vz = yz.inverse()
            self.t_of_u = vz.reversion()  # here t is z itself
            self.fn = curve.y
            self.dfn = curve.dy

    def point_series(self, g, order=None):
        """Series in the local coordinate of a rational function g of z."""
        order = self.order if order is None else order
        if self.which == "x":
            gt = g.series_at_infinity(order + 8)
        else:
            gt = g.series_at(self.field.zero, order + 8)
        return gt.compose(self.t_of_u).truncate(order)

    def basis_over_dfn(self, a, d, order=None):
        """Series of xi_{a,d}(z) / dfn(z) = 1/((z-a)^d fn'(z)) in the local coordinate."""
        order = self.order if order is None else order
        f = self.field
        if self.which == "x":
            # 1/(z-a)^d = t^d / (1 - a t)^d
            n = order + 8
            base = LaurentSeries(f, 0, [f.one, -a] + [f.zero] * (n - 1)).inverse(0)
            pw = base
            for _ in range(d - 1):
                pw = pw * base
            pw = LaurentSeries(f, d, pw.coeffs)
            dfn = self.dfn.series_at_infinity(n)
            ser = pw * dfn.inverse()
        else:
            n = order + 8
            # 1/(z - a)^d regular at z = 0
            base = LaurentSeries(f, 0, [-a, f.one] + [f.zero] * (n - 1)).inverse(0)
            pw = base
            for _ in range(d - 1):
                pw = pw * base
            dfn = self.dfn.series_at(f.zero, n)
            ser = pw * dfn.inverse()
        return ser.compose(self.t_of_u).truncate(order)


def resolvent_series(engine_or_curve, data, order, which="x"):
    """w = W/dx as a series in u = 1/x for a one-variable pole tensor ``data``."""
    curve = getattr(engine_or_curve, "curve", engine_or_curve)
    chart = InfinityChart(curve, order, which)
    f = curve.field
    bps = curve.branch_points
    cache = {}
    acc = LaurentSeries.zero(f, order)
    for key, c in data.items():
        (b, d), = key
        ser = cache.get((b, d))
        if ser is None:
            ser = chart.basis_over_dfn(bps[b], d, order)
            cache[(b, d)] = ser
        acc = acc + ser * c
    return acc


def planar_resolvent(curve, order):
    """w^(0) = V1'(x) - y in powers of u = 1/x (kappa = 1 potentials)."""
    if curve.V1 is None:
        raise ValueError("curve has no potentials")
    chart = InfinityChart(curve, order, "x")
    f = curve.field
    dv1 = curve.V1n.derivative()
    ys = chart.point_series(curve.y, order)
    # x = 1/u
    pad = order + len(dv1.coeffs) + 2
    xs = LaurentSeries(f, -1, [f.one] + [f.zero] * (pad + 1))
    vs = LaurentSeries.zero(f, pad)
    for c in reversed(dv1.coeffs):
        vs = vs * xs + LaurentSeries(f, 0, [c] + [f.zero] * pad)
    return (vs - ys).truncate(order)


def moments_from_series(w, jmax):
    """m_j = coefficient of u^(j+1)."""
    return [w.coeff(j + 1) for j in range(jmax + 1)]


def kappa_power(h, k, l):
    """Physical W_{k,l}^(h) = kappa^(2 - k - l - 2h) times the one stored on the curve."""
    return 2 - k - l - 2 * h


def moments(engine, h, jmax):
    """Moments m_0..m_jmax of W_1^(h): the coefficient of hbar^(2h-1) in <tr M1^j>."""
    curve = engine.curve
    if h == 0:
        w = planar_resolvent(curve, jmax + 1)
    else:
        w = resolvent_series(engine, engine.w(h, 1), jmax + 1)
    scale = curve.kappa ** kappa_power(h, 1, 0)
    return [m * scale for m in moments_from_series(w, jmax)]
