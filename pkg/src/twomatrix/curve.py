"""Genus-zero spectral curves x(z), y(z).

The parametrization is canonical: x has its pole at z = oo (the point oo_x
of the physical sheet) and y has its pole at z = 0 (oo_y).  Curves built
from potentials have the Laurent form

    x(z) = g z + a_0 + a_1/z + ... + a_d2/z**d2
    y(z) = 1/z + b_0 + b_1 z + ... + b_d1 z**d1

(the residual scaling freedom z -> c z is fixed by the unit coefficient of
1/z in y).  The stored x, y describe the model with coupling kappa scaled to
1, i.e. potentials V/kappa and temperature T/kappa.
"""
from __future__ import annotations

from fractions import Fraction

import mpmath
from gmpy2 import mpq

from .errors import (BranchValue, CollidingBranchPoints, DegenerateBranchPoint,
                     NoGenusZeroSolution, UnsplittableDenominator)
from .polynomial import Polynomial, RationalFunction, find_roots
from .scalars import CouplingSeries, CouplingSeriesRing, ExactField, FloatField
from .series import LaurentSeries

INF = "oo"


def _sort_key(field, a):
    if isinstance(field, FloatField):
        return (float(mpmath.re(a)), float(mpmath.im(a)))
    if isinstance(a, CouplingSeries):
        return (a[0],)
    return (a,)


class BranchChart:
    """Local data at a branch point: location ``a`` and involution ``sigma``.

    ``sigma`` is the series sigma(s) with x(a + sigma(s)) = x(a + s),
    sigma(s) = -s + O(s^2), known to ``s**order``.
    """

    __slots__ = ("index", "a", "sigma", "order")

    def __init__(self, index, a, sigma, order):
        self.index = index
        self.a = a
        self.sigma = sigma
        self.order = order

    def __repr__(self):
        return f"BranchChart({self.index}, a={self.a}, order={self.order})"


def branch_point_candidates(x, field=None):
    """Zeros of dx/dz away from the poles of x."""
    field = field or x.field
    dx = x.derivative()
    if dx.num.degree <= 0:
        return []
    roots, residual = _roots_or_residual(dx.num, field)
    if residual is not None and residual.degree > 0:
        raise UnsplittableDenominator(residual)
    return roots


def _roots_or_residual(poly, field):
    if isinstance(field, ExactField):
        return find_roots(poly, with_residual=True)
    return find_roots(poly, field), None


def find_branch_points(x, y=None, field=None):
    """Simple zeros of dx; checks simplicity and dy != 0 there."""
    field = field or x.field
    roots = branch_point_candidates(x, field)
    d2x = x.derivative().derivative()
    dy = y.derivative() if y is not None else None
    out = []
    for a, mult in roots:
        if mult != 1 or field.is_zero(d2x(a)):
            raise DegenerateBranchPoint(f"branch point {a} of x is not simple")
        if dy is not None:
            if field.is_zero(y.den(a)):
                raise CollidingBranchPoints(f"y has a pole at the branch point {a}")
            if field.is_zero(dy(a)):
                raise CollidingBranchPoints(f"dy vanishes at the branch point {a}")
        out.append(a)
    out.sort(key=lambda a: _sort_key(field, a))
    return out


def local_involution(x, a, order, field=None):
    """Series sigma(s) with x(a + sigma(s)) = x(a + s) to ``s**order``."""
    field = field or x.field
    loc = x.series_at(a, order + 2)
    # drop the constant and the (vanishing) linear term explicitly
    X = LaurentSeries(field, 2, loc.coeffs[2 - loc.val:] if loc.val <= 2 else [field.zero] * (loc.val - 2) + loc.coeffs)
    c2 = X.coeffs[0]
    if field.is_zero(c2):
        raise DegenerateBranchPoint(f"branch point {a} is not simple")
    unit = LaurentSeries(field, 0, [c / c2 for c in X.coeffs])
    zeta = unit.sqrt() * LaurentSeries.variable(field, order)
    zeta = LaurentSeries(field, 1, zeta.coeffs)
    sigma = zeta.reversion().compose(-zeta)
    return sigma.truncate(order)


class SpectralCurve:
    """Rational spectral curve with cached branch charts."""

    def __init__(self, x, y, T, kappa=1, V1=None, V2=None, field=None, name=None):
        self.field = field or x.field
        f = self.field
        self.x = x
        self.y = y
        self.T = f.convert(T)
        self.kappa = f.convert(kappa)
        self.V1 = V1
        self.V2 = V2
        self.name = name
        self.infinity_x = INF
        self.infinity_y = f.zero
        self.dx = x.derivative()
        self.dy = y.derivative()
        self._branch_points = None
        self._charts = {}

    @property
    def branch_points(self):
        if self._branch_points is None:
            self._branch_points = find_branch_points(self.x, self.y, self.field)
        return self._branch_points

    # potentials of the kappa = 1 model
    @property
    def Tn(self):
        return self.T / self.kappa

    @property
    def V1n(self):
        return None if self.V1 is None else self.V1 / self.kappa

    @property
    def V2n(self):
        return None if self.V2 is None else self.V2 / self.kappa

    def has_potentials(self):
        return self.V1 is not None and self.V2 is not None

    def chart(self, alpha, order):
        ch = self._charts.get(alpha)
        if ch is None or ch.order < order:
            a = self.branch_points[alpha]
            sigma = local_involution(self.x, a, max(order, 2), self.field)
            ch = BranchChart(alpha, a, sigma, max(order, 2))
            self._charts[alpha] = ch
        if ch.order == order:
            return ch
        return BranchChart(alpha, ch.a, ch.sigma.truncate(order), order)

    def __repr__(self):
        return f"SpectralCurve(x={self.x}, y={self.y}, T={self.T}, kappa={self.kappa})"

    def same_as(self, other):
        return self.x == other.x and self.y == other.y and self.field.eq(self.Tn, other.Tn)


# ---------------------------------------------------------------------------

def sheets_over(curve, z0):
    """All z with x(z) = x(z0)."""
    field = curve.field
    x = curve.x
    x0 = x(z0)
    p = x.num - x.den * x0
    if isinstance(field, ExactField):
        roots, residual = find_roots(p, with_residual=True)
        if residual.degree > 0:
            raise UnsplittableDenominator(residual)
    else:
        roots = find_roots(p, field)
    for r, m in roots:
        if m > 1:
            raise BranchValue(f"{z0} lies over a branch value")
    return [r for r, _ in roots]


def swap_xy(curve):
    """Exchange the roles of x and y (and of V1, V2), re-placing oo_x at z = oo."""
    x_new = _invert_variable(curve.y)
    y_new = _invert_variable(curve.x)
    new = SpectralCurve(x_new, y_new, curve.T, curve.kappa, curve.V2, curve.V1, curve.field,
                        name=(curve.name + "-swapped") if curve.name else None)
    new.branch_points  # validate the new charts eagerly
    return new


def _invert_variable(rf):
    """``rf(1/z)`` as a rational function of z."""
    field = rf.field
    dn, dd = rf.num.degree, rf.den.degree
    num = Polynomial(field, rf.num.reversed_coeffs(), rf.var)
    den = Polynomial(field, rf.den.reversed_coeffs(), rf.var)
    shift = dd - dn
    if shift >= 0:
        num = num * Polynomial.monomial(field, shift, field.one, rf.var)
    else:
        den = den * Polynomial.monomial(field, -shift, field.one, rf.var)
    return RationalFunction(num, den)


# ---------------------------------------------------------------------------
# potentials <-> curve

def potentials_from_curve(x, y, field=None, order=None):
    """Read V1, V2 and T off the physical-sheet asymptotics of a Laurent curve.

    Returns ``(V1, V2, T)`` for the kappa = 1 model.  Raises ``ValueError``
    when the two infinities imply different temperatures.
    """
    field = field or x.field
    lx, cx = x.laurent_coeffs()
    ly, cy = y.laurent_coeffs()
    d1 = ly + len(cy) - 1
    d2 = -lx
    n = max(d1, d2) + 4
    # at z = oo: t = 1/z, u = 1/x
    xt = x.series_at_infinity(n)
    ut = xt.inverse()
    t_of_u = ut.reversion()
    yu = y.series_at_infinity(n + d1 + 2).compose(t_of_u)
    dv1 = [yu.coeff(-k) for k in range(d1 + 1)]
    T1 = -yu.coeff(1)
    # at z = 0: v = 1/y
    yz = y.series_at(field.zero, n)
    vz = yz.inverse()
    z_of_v = vz.reversion()
    xv = x.series_at(field.zero, n + d2 + 2).compose(z_of_v)
    dv2 = [xv.coeff(-k) for k in range(d2 + 1)]
    T2 = -xv.coeff(1)
    if not field.eq(T1, T2):
        raise ValueError(f"inconsistent temperatures at the two infinities: {T1} vs {T2}")
    V1 = Polynomial(field, [field.zero] + [c / (k + 1) for k, c in enumerate(dv1)], "x")
    V2 = Polynomial(field, [field.zero] + [c / (k + 1) for k, c in enumerate(dv2)], "y")
    return V1, V2, T1


def curve_from_laurent(field, x_coeffs, x_low, y_coeffs, y_low, kappa=1, name=None):
    """Build a curve from Laurent coefficients, deriving potentials and T."""
    x = RationalFunction.from_laurent(field, x_coeffs, x_low)
    y = RationalFunction.from_laurent(field, y_coeffs, y_low)
    kappa = field.convert(kappa)
    try:
        V1, V2, T = potentials_from_curve(x, y, field)
    except ArithmeticError:
        # not a two-matrix curve (e.g. y regular at z = 0): keep T = -Res_oo y dx only
        V1 = V2 = None
        T = _temperature(x, y, field)
    if not field.eq(kappa, field.one):
        V1 = V1 * kappa if V1 is not None else None
        V2 = V2 * kappa if V2 is not None else None
        T = T * kappa
    return SpectralCurve(x, y, T, kappa, V1, V2, field, name=name)


def _temperature(x, y, field):
    """T = [z^-1] of -y x' (the residue of y dx at z = oo)."""
    lx, cx = x.laurent_coeffs()
    ly, cy = y.laurent_coeffs()
    total = field.zero
    for i, a in enumerate(cx):
        e = lx + i
        for j, b in enumerate(cy):
            if e + ly + j - 1 == -1:
                total = total - e * a * b
    return total


def _ld_mul(a, b):
    out = {}
    for i, ca in a.items():
        for j, cb in b.items():
            out[i + j] = out[i + j] + ca * cb if (i + j) in out else ca * cb
    return out


def _ld_add(a, b):
    out = dict(a)
    for k, c in b.items():
        out[k] = out[k] + c if k in out else c
    return out


def _ld_poly(coeffs, arg):
    """Horner evaluation of a polynomial (coefficient list) at a Laurent dict."""
    acc = {}
    for c in reversed(coeffs):
        acc = _ld_add(_ld_mul(acc, arg), {0: c})
    return acc


def _residuals(u, dv1, dv2, T, d1, d2, zero, one):
    """Asymptotic conditions as polynomial equations in the unknowns
    ``u = (g, a_0..a_d2, b_0..b_d1)``."""
    g = u[0]
    a = u[1:d2 + 2]
    b = u[d2 + 2:]
    x = {1: g}
    for k in range(d2 + 1):
        x[-k] = x.get(-k, zero) + a[k]
    y = {-1: one}
    for k in range(d1 + 1):
        y[k] = y.get(k, zero) + b[k]
    e1 = _ld_add(_ld_poly(dv1, x), {k: -c for k, c in y.items()})
    e2 = _ld_add(_ld_poly(dv2, y), {k: -c for k, c in x.items()})
    eqs = [e1.get(j, zero) for j in range(d1, -1, -1)]
    eqs.append(g * e1.get(-1, zero) - T)
    eqs += [e2.get(j, zero) for j in range(-d2, 1)]
    return eqs


def _solve_linear(A, b, one):
    """Gaussian elimination with pivoting on the largest magnitude (generic scalars)."""
    n = len(b)
    M = [list(row) + [bi] for row, bi in zip(A, b)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(_mag(M[r][col])))
        if _mag(M[piv][col]) == 0:
            raise ZeroDivisionError("singular Jacobian")
        M[col], M[piv] = M[piv], M[col]
        inv = one / M[col][col]
        for r in range(n):
            if r != col:
                f = M[r][col] * inv
                if _mag(f) != 0:
                    M[r] = [vr - f * vc for vr, vc in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _mag(v):
    if isinstance(v, CouplingSeries):
        return v[0]
    return v


def _gaussian_solution(dv1, dv2, T):
    a0, a1 = dv1
    b0, b1 = dv2
    det = a1 * b1 - 1
    g = T / det
    al1 = b1
    al0 = -(b1 * a0 + b0) / det
    be0 = a1 * al0 + a0
    be1 = a1 * g
    return [g, al0, al1, be0, be1]


def build_curve_from_potentials(V1, V2, T, kappa=1, field=None, name=None, steps=16, maxiter=60):
    """Solve the physical-sheet conditions for the Laurent coefficients of x and y.

    The solution is the one connected to the Gaussian curve along the homotopy
    that switches on the non-quadratic couplings.
    """
    field = field or V1.field
    T = field.convert(T)
    kappa = field.convert(kappa)
    d1 = V1.degree - 1
    d2 = V2.degree - 1
    if d1 < 1 or d2 < 1:
        raise ValueError("potentials must have degree >= 2")
    dv1 = [c / kappa for c in V1.derivative().coeffs]
    dv2 = [c / kappa for c in V2.derivative().coeffs]
    Tn = T / kappa
    dv1 += [field.zero] * (d1 + 1 - len(dv1))
    dv2 += [field.zero] * (d2 + 1 - len(dv2))

    if d1 == 1 and d2 == 1:
        u = _gaussian_solution(dv1, dv2, Tn)
    elif isinstance(field, CouplingSeriesRing):
        u = _solve_series(dv1, dv2, Tn, d1, d2, field)
    elif isinstance(field, ExactField):
        fl = FloatField(256)
        uf = _solve_float([fl.convert(c) for c in dv1], [fl.convert(c) for c in dv2], fl.convert(Tn), d1, d2, fl, steps, maxiter)
        u = [_rationalize(v, fl) for v in uf]
        res = _residuals(u, dv1, dv2, Tn, d1, d2, field.zero, field.one)
        if any(r != 0 for r in res):
            raise NoGenusZeroSolution(max(abs(float(r)) for r in res),
                                      "solution is not rational; use the float backend")
    else:
        u = _solve_float(dv1, dv2, Tn, d1, d2, field, steps, maxiter)
    g, a, b = u[0], u[1:d2 + 2], u[d2 + 2:]
    x = RationalFunction.from_laurent(field, list(reversed(a)) + [g], -d2)
    y = RationalFunction.from_laurent(field, [field.one] + list(b), -1)
    return SpectralCurve(x, y, T, kappa, V1, V2, field, name=name)


def _rationalize(v, fl, max_den=10 ** 30):
    if isinstance(v, mpmath.mpc) or hasattr(v, "imag") and v.imag != 0:
        if abs(fl.ctx.im(v)) > fl.tol:
            raise NoGenusZeroSolution(abs(fl.ctx.im(v)), "complex solution in exact mode")
        v = fl.ctx.re(v)
    fr = Fraction(str(fl.ctx.nstr(v, 70, min_fixed=-80, max_fixed=80))).limit_denominator(max_den)
    return mpq(fr.numerator, fr.denominator)


def _newton(F, u, field, maxiter):
    ctx = field.ctx
    n = len(u)
    h = ctx.mpf(2) ** (-(field.prec // 3))
    res = F(u)
    for _ in range(maxiter):
        nrm = max(abs(r) for r in res)
        if nrm <= field.tol * field.tol * 4:
            return u, nrm
        J = [[None] * n for _ in range(n)]
        for j in range(n):
            up = list(u)
            um = list(u)
            step = h * max(1, abs(u[j]))
            up[j] += step
            um[j] -= step
            fp, fm = F(up), F(um)
            for i in range(n):
                J[i][j] = (fp[i] - fm[i]) / (2 * step)
        try:
            du = _solve_linear(J, [-r for r in res], field.one)
        except ZeroDivisionError:
            return u, nrm
        u = [ui + di for ui, di in zip(u, du)]
        res = F(u)
    return u, max(abs(r) for r in res)


def _solve_float(dv1, dv2, T, d1, d2, field, steps=16, maxiter=60):
    zero, one = field.zero, field.one
    # Gaussian start from the quadratic parts
    g0 = _gaussian_solution(dv1[:2], dv2[:2], T)
    u = [g0[0], g0[1], g0[2]] + [zero] * (d2 - 1) + [g0[3], g0[4]] + [zero] * (d1 - 1)
    theta = zero
    step = one / steps
    while theta < one:
        nxt = min(one, theta + step)
        w1 = dv1[:2] + [c * nxt for c in dv1[2:]]
        w2 = dv2[:2] + [c * nxt for c in dv2[2:]]
        F = lambda v: _residuals(v, w1, w2, T, d1, d2, zero, one)
        cand, nrm = _newton(F, u, field, maxiter)
        if nrm <= field.tol:
            u, theta = cand, nxt
        else:
            step = step / 2
            if step < one / 2 ** 30:
                raise NoGenusZeroSolution(nrm)
    F = lambda v: _residuals(v, dv1, dv2, T, d1, d2, zero, one)
    u, nrm = _newton(F, u, field, maxiter)
    if nrm > field.tol:
        raise NoGenusZeroSolution(nrm)
    return u


def _solve_series(dv1, dv2, T, d1, d2, ring):
    """Newton lifting in the coupling from the exact unperturbed solution."""
    exact = ExactField()
    p0 = lambda v: ring.convert(v)[0]
    e1 = [p0(c) for c in dv1]
    e2 = [p0(c) for c in dv2]
    T0 = p0(T)
    if all(c == 0 for c in e1[2:]) and all(c == 0 for c in e2[2:]):
        g0 = _gaussian_solution(e1[:2], e2[:2], T0)
        u0 = [g0[0], g0[1], g0[2]] + [mpq(0)] * (d2 - 1) + [g0[3], g0[4]] + [mpq(0)] * (d1 - 1)
    else:
        V1 = Polynomial(exact, [0] + [c / (k + 1) for k, c in enumerate(e1)], "x")
        V2 = Polynomial(exact, [0] + [c / (k + 1) for k, c in enumerate(e2)], "y")
        c0 = build_curve_from_potentials(V1, V2, T0, 1, exact)
        lx, cx = c0.x.laurent_coeffs()
        ly, cy = c0.y.laurent_coeffs()
        cx = [mpq(0)] * (lx + d2) + cx
        u0 = [cx[-1]] + list(reversed(cx[:-1])) + cy[1:] + [mpq(0)] * (d1 + 2 - len(cy))
    # exact Jacobian at the unperturbed point through dual numbers
    dual = CouplingSeriesRing(2)
    n = len(u0)
    to_dual = lambda c: dual.convert(c)
    J = [[None] * n for _ in range(n)]
    for j in range(n):
        v = [dual.convert(c) for c in u0]
        v[j] = v[j] + dual.gen()
        r = _residuals(v, [to_dual(c) for c in e1], [to_dual(c) for c in e2], to_dual(T0), d1, d2, dual.zero, dual.one)
        for i in range(n):
            J[i][j] = r[i][1]
    u = [ring.convert(c) for c in u0]
    for _ in range(ring.n + 1):
        res = _residuals(u, dv1, dv2, T, d1, d2, ring.zero, ring.one)
        if all(ring.is_zero(r) for r in res):
            break
        du = _solve_linear_series(J, res, ring)
        u = [ui - di for ui, di in zip(u, du)]
    res = _residuals(u, dv1, dv2, T, d1, d2, ring.zero, ring.one)
    if not all(ring.is_zero(r) for r in res):
        raise NoGenusZeroSolution(0, "coupling expansion did not converge")
    return u


def _solve_linear_series(J, res, ring):
    # J is exact rational; solve column-wise per coupling order
    n = len(res)
    cols = []
    for k in range(ring.n):
        rhs = [r[k] for r in res]
        cols.append(_solve_linear([list(row) for row in J], rhs, mpq(1)))
    return [ring.convert([cols[k][i] for k in range(ring.n)]) for i in range(n)]
