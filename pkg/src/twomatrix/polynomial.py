"""Univariate polynomials and rational functions over a coefficient backend,
root finding and partial fractions."""
from __future__ import annotations

import mpmath
import sympy
from gmpy2 import mpq

from .errors import ClusterError, UnsplittableDenominator
from .scalars import CouplingSeriesRing, ExactField
from .series import LaurentSeries


class Polynomial:
    """Dense polynomial, coefficients listed from degree 0 upward."""

    __slots__ = ("field", "coeffs", "var")

    def __init__(self, field, coeffs, var="z"):
        self.field = field
        cs = [field.convert(c) for c in coeffs]
        while cs and field.is_zero(cs[-1]):
            cs.pop()
        self.coeffs = cs
        self.var = var

    @classmethod
    def monomial(cls, field, k, coeff=1, var="z"):
        return cls(field, [field.zero] * k + [coeff], var)

    @classmethod
    def const(cls, field, c, var="z"):
        return cls(field, [c], var)

    @property
    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self):
        return not self.coeffs

    def lc(self):
        return self.coeffs[-1]

    def coeff(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.field.zero

    def _wrap(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, RationalFunction):
            return None
        return Polynomial(self.field, [other], self.var)

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return Polynomial(self.field, [self.coeff(i) + o.coeff(i) for i in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.field, [-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return Polynomial(self.field, [], self.var)
        out = [self.field.zero] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(self.field, out, self.var)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Polynomial(self.field, [self.field.one], self.var)
        for _ in range(k):
            out = out * self
        return out

    def __truediv__(self, other):
        if isinstance(other, (Polynomial, RationalFunction)):
            return RationalFunction(self, other) if isinstance(other, Polynomial) else RationalFunction(self) / other
        inv = self.field.one / other
        return Polynomial(self.field, [c * inv for c in self.coeffs], self.var)

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return Polynomial(self.field, [], self.var), self
        q = [self.field.zero] * (dq + 1)
        lc_inv = self.field.one / other.lc()
        m = len(other.coeffs)
        for k in range(dq, -1, -1):
            c = r[k + m - 1] * lc_inv
            q[k] = c
            if c == 0:
                continue
            for j in range(m):
                r[k + j] = r[k + j] - c * other.coeffs[j]
        return Polynomial(self.field, q, self.var), Polynomial(self.field, r[: m - 1], self.var)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __eq__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        if len(self.coeffs) != len(o.coeffs):
            return False
        return all(self.field.eq(a, b) for a, b in zip(self.coeffs, o.coeffs))

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def monic(self):
        return self / self.lc() if self.coeffs else self

    def derivative(self):
        return Polynomial(self.field, [c * i for i, c in enumerate(self.coeffs)][1:], self.var)

    def __call__(self, x):
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, other):
        """``self(other)`` for a polynomial or rational function ``other``."""
        acc = Polynomial(self.field, [], self.var) if isinstance(other, Polynomial) else RationalFunction.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def shift(self, a):
        """Coefficients of ``p(a + s)`` in ``s`` (Taylor shift)."""
        cs = list(self.coeffs)
        n = len(cs)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] = cs[j] + a * cs[j + 1]
        return Polynomial(self.field, cs, self.var)

    def reversed_coeffs(self, n=None):
        """Coefficients of ``s**n p(1/s)`` (default n = degree)."""
        n = self.degree if n is None else n
        return [self.coeff(n - i) for i in range(n + 1)]

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*{self.var}^{i}" for i, c in enumerate(self.coeffs) if c != 0)

    def to_sympy(self, symbol):
        if not isinstance(self.field, ExactField):
            raise TypeError("sympy conversion only for exact polynomials")
        return sum(sympy.Rational(int(c.numerator), int(c.denominator)) * symbol ** i for i, c in enumerate(self.coeffs))


class RationalFunction:
    """Quotient ``num/den`` kept in reduced form with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        field = num.field
        if den is None:
            den = Polynomial(field, [field.one], num.var)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if reduce and den.degree > 0 and isinstance(field, ExactField) and not num.is_zero():
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
        if num.is_zero():
            den = Polynomial(field, [field.one], num.var)
        # over a coupling ring the leading coefficient may be nilpotent; scale by
        # the highest invertible one instead
        for lc in reversed(den.coeffs):
            try:
                inv = field.one / lc
            except ZeroDivisionError:
                continue
            if not field.eq(lc, field.one):
                num, den = num * inv, den * inv
            break
        self.num, self.den = num, den

    @classmethod
    def zero(cls, field, var="z"):
        return cls(Polynomial(field, [], var))

    @classmethod
    def from_laurent(cls, field, coeffs, low, var="z"):
        """``sum coeffs[i] z**(low+i)``."""
        if low >= 0:
            return cls(Polynomial(field, [field.zero] * low + coeffs, var))
        return cls(Polynomial(field, coeffs, var), Polynomial.monomial(field, -low, 1, var))

    @property
    def field(self):
        return self.num.field

    @property
    def var(self):
        return self.num.var

    def _wrap(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        return RationalFunction(Polynomial(self.field, [other], self.var))

    def __add__(self, other):
        o = self._wrap(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._wrap(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._wrap(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._wrap(other) / self

    def __pow__(self, k):
        if k < 0:
            return RationalFunction(self.den, self.num) ** (-k)
        return RationalFunction(self.num ** k, self.den ** k)

    def __eq__(self, other):
        o = self._wrap(other)
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self):
        return self.num.is_zero()

    def __call__(self, x):
        d = self.den(x)
        if self.field.is_zero(d):
            raise ZeroDivisionError("evaluation at a pole")
        return self.num(x) / d

    def derivative(self):
        return RationalFunction(self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den)

    def compose(self, other):
        """``self(other(z))``."""
        return _poly_compose(self.num, other) / _poly_compose(self.den, other)

    def is_laurent(self):
        """True when the denominator is a power of the variable."""
        return all(c == 0 for c in self.den.coeffs[:-1])

    def laurent_coeffs(self):
        """``(low, coeffs)`` with ``self = sum coeffs[i] z**(low+i)`` (Laurent polynomials only)."""
        if not self.is_laurent():
            raise ValueError("not a Laurent polynomial")
        return -self.den.degree, list(self.num.coeffs)

    def series_at(self, a, order):
        """Laurent series of ``self(a + s)`` in ``s`` known to ``s**order``."""
        field = self.field
        num = self.num.shift(a)
        den = self.den.shift(a)
        # valuation of the denominator at a
        v = 0
        while v < len(den.coeffs) and field.is_zero(den.coeffs[v]):
            v += 1
        ns = LaurentSeries.from_coeffs(field, num.coeffs, 0, order + v) if num.coeffs else LaurentSeries.zero(field, order + v)
        ds = LaurentSeries.from_coeffs(field, den.coeffs[v:], v, order + 2 * v)
        return (ns * ds.inverse(v)).truncate(order)

    def series_at_infinity(self, order):
        """Laurent series in ``t = 1/z`` known to ``t**order``."""
        field = self.field
        dn, dd = self.num.degree, self.den.degree
        if self.num.is_zero():
            return LaurentSeries.zero(field, order)
        # self(1/t) = t^(dd-dn) * rev(num)(t) / rev(den)(t)
        shift = dd - dn
        n = order - shift + 1
        if n <= 0:
            return LaurentSeries.zero(field, order)
        ns = LaurentSeries.from_coeffs(field, self.num.reversed_coeffs(), 0, n - 1)
        ds = LaurentSeries.from_coeffs(field, self.den.reversed_coeffs(), 0, n - 1)
        q = ns * ds.inverse(0)
        return LaurentSeries(field, shift, q.coeffs)

    def residue_at(self, a):
        """Coefficient of ``1/(z-a)``."""
        return self.series_at(a, -1).residue()

    def __repr__(self):
        return f"({self.num}) / ({self.den})"


def _poly_compose(p, r):
    acc = RationalFunction.zero(p.field, p.var)
    for c in reversed(p.coeffs):
        acc = acc * r + c
    return acc


# ---------------------------------------------------------------------------
# root finding

def squarefree(p):
    """Yun's algorithm: list of ``(factor, multiplicity)`` with pairwise coprime square-free factors."""
    if p.degree <= 0:
        return []
    f = p.monic()
    df = f.derivative()
    a = f.gcd(df)
    b = f // a
    c = df // a
    out = []
    i = 1
    while b.degree > 0:
        d = c - b.derivative()
        g = b.gcd(d)
        if g.degree > 0:
            out.append((g, i))
        b = b // g
        c = d // g
        i += 1
    return out


def _rational_linear_factors(p):
    """Split an exact square-free polynomial into its rational roots and the residual factor."""
    z = sympy.Symbol("z")
    expr = p.to_sympy(z)
    _, factors = sympy.factor_list(expr, z, domain="QQ")
    roots = []
    residual = Polynomial(p.field, [p.field.one], p.var)
    for fac, mult in factors:
        poly = sympy.Poly(fac, z)
        cs = [mpq(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in reversed(poly.all_coeffs())]
        q = Polynomial(p.field, cs, p.var)
        if q.degree == 1:
            roots.append(-q.coeffs[0] / q.coeffs[1])
        elif q.degree > 1:
            residual = residual * q.monic()
    return roots, residual


def find_roots(p, field=None, with_residual=False):
    """Roots of ``p`` as ``[(root, multiplicity)]``.

    Exact mode returns the roots in Q; the product of the remaining irreducible
    factors (with multiplicity) is returned too when ``with_residual`` is set.
    Float mode returns all complex roots and raises :class:`ClusterError` when
    two of them cannot be separated at the working precision.
    """
    if p.is_zero():
        raise ValueError("roots of the zero polynomial")
    field = field or p.field
    if getattr(field, "exact", False) and isinstance(field, ExactField):
        roots = []
        residual = Polynomial(field, [field.one], p.var)
        for fac, mult in squarefree(p):
            rs, res = _rational_linear_factors(fac)
            roots.extend((r, mult) for r in rs)
            residual = residual * res ** mult
        roots.sort(key=lambda rm: rm[0])
        return (roots, residual) if with_residual else roots
    if isinstance(field, CouplingSeriesRing):
        return _series_roots(p, field)
    return _float_roots(p, field)


def _series_roots(p, ring):
    # roots of the unperturbed polynomial, lifted by Newton iteration in the coupling
    exact = ExactField()
    p0 = Polynomial(exact, [ring.convert(c)[0] for c in p.coeffs], p.var)
    if p0.degree != p.degree:
        raise ValueError("leading coefficient vanishes at zero coupling")
    roots0, residual = find_roots(p0, with_residual=True)
    if residual.degree > 0:
        raise UnsplittableDenominator(residual)
    dp = p.derivative()
    out = []
    for r0, mult in roots0:
        if mult != 1:
            raise ValueError("cannot lift a multiple root in the coupling")
        r = ring.convert(r0)
        for _ in range(ring.n):
            r = r - p(r) / dp(r)
        out.append((r, 1))
    return out


def _float_roots(p, field):
    ctx = field.ctx
    if p.degree == 0:
        return []
    cs = [field.convert(c) for c in reversed(p.coeffs)]
    if p.degree == 1:
        return [(-cs[1] / cs[0], 1)]
    roots, err = ctx.polyroots(cs, maxsteps=200, extraprec=2 * field.prec, error=True)
    radius = max(err, field.tol * 0 + ctx.mpf(2) ** (-field.prec + 8))
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            dist = abs(roots[i] - roots[j])
            if dist <= 2 * radius or dist <= field.tol * max(1, abs(roots[i])):
                raise ClusterError(dist)
    out = []
    for r in roots:
        if isinstance(r, mpmath.mpc) or hasattr(r, "imag"):
            if abs(ctx.im(r)) <= field.tol * max(1, abs(r)):
                r = ctx.re(r)
        out.append((r, 1))
    out.sort(key=lambda rm: (float(ctx.re(rm[0])), float(ctx.im(rm[0]))))
    return out


def partial_fractions(f):
    """Decompose ``f`` into polynomial part and principal parts.

    Returns ``(poly, poles)`` with ``poles = [(a, [c_1, ..., c_m])]`` meaning
    ``f = poly + sum_a sum_j c_j / (z - a)**j``.
    """
    field = f.field
    poly, rem = f.num.divmod(f.den)
    if f.den.degree == 0:
        return poly, []
    if isinstance(field, ExactField):
        roots, residual = find_roots(f.den, with_residual=True)
        if residual.degree > 0:
            raise UnsplittableDenominator(residual)
    else:
        # float mode: multiplicities from square-free part are not available; use simple roots
        roots = find_roots(f.den)
    poles = []
    frac = RationalFunction(rem, f.den)
    for a, m in roots:
        ser = frac.series_at(a, -1)
        poles.append((a, [ser.coeff(-j) for j in range(1, m + 1)]))
    return poly, poles


def from_partial_fractions(field, poly, poles, var="z"):
    out = RationalFunction(poly)
    for a, cs in poles:
        lin = Polynomial(field, [-a, field.one], var)
        for j, c in enumerate(cs, start=1):
            if c != 0:
                out = out + RationalFunction(Polynomial(field, [c], var), lin ** j)
    return out
