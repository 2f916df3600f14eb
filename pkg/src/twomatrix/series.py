"""Truncated Laurent series in one local coordinate ``s``.

A series stores its valuation ``val`` and the coefficients of
``s**val .. s**order``; everything beyond ``order`` is unknown.  Arithmetic
propagates the reliable order the usual way, so a result never claims more
coefficients than its inputs determine.
"""
from __future__ import annotations

from .errors import TruncationInsufficient


class LaurentSeries:
    __slots__ = ("field", "val", "coeffs")

    def __init__(self, field, val, coeffs):
        self.field = field
        self.val = int(val)
        self.coeffs = list(coeffs)

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, field, order):
        """The zero series known up to ``s**order``."""
        return cls(field, order + 1, [])

    @classmethod
    def monomial(cls, field, coeff, exponent, order):
        if order < exponent:
            return cls(field, order + 1, [])
        return cls(field, exponent, [field.convert(coeff) if isinstance(coeff, (int, str)) else coeff] + [field.zero] * (order - exponent))

    @classmethod
    def from_coeffs(cls, field, coeffs, val=0, order=None):
        """Series with the given leading coefficients; pads with zeros to ``order``."""
        coeffs = list(coeffs)
        if order is None:
            order = val + len(coeffs) - 1
        n = order - val + 1
        if n < len(coeffs):
            coeffs = coeffs[:max(n, 0)]
        else:
            coeffs = coeffs + [field.zero] * (n - len(coeffs))
        return cls(field, val, coeffs)

    @classmethod
    def variable(cls, field, order):
        """The coordinate ``s`` itself."""
        return cls.monomial(field, field.one, 1, order)

    # basic properties ---------------------------------------------------
    @property
    def order(self):
        """Highest exponent whose coefficient is known."""
        return self.val + len(self.coeffs) - 1

    def coeff(self, n):
        if n > self.order:
            raise TruncationInsufficient(f"coefficient of s^{n} unknown (series known to s^{self.order})")
        if n < self.val:
            return self.field.zero
        return self.coeffs[n - self.val]

    def __getitem__(self, n):
        return self.coeff(n)

    def copy(self):
        return LaurentSeries(self.field, self.val, self.coeffs)

    def normalized(self):
        """Strip leading coefficients that are zero (according to the field)."""
        is_zero = self.field.is_zero
        k = 0
        while k < len(self.coeffs) and is_zero(self.coeffs[k]):
            k += 1
        return LaurentSeries(self.field, self.val + k, self.coeffs[k:])

    def valuation(self):
        """Exponent of the first nonzero coefficient (``None`` if all known ones vanish)."""
        s = self.normalized()
        return s.val if s.coeffs else None

    def with_valuation(self, v):
        """Rebase to valuation ``v``, asserting the dropped coefficients vanish."""
        if v <= self.val:
            return LaurentSeries(self.field, v, [self.field.zero] * (self.val - v) + self.coeffs)
        drop = v - self.val
        for c in self.coeffs[:drop]:
            if not self.field.is_zero(c):
                raise ArithmeticError(f"coefficient expected to vanish below s^{v}: {c}")
        return LaurentSeries(self.field, v, self.coeffs[drop:])

    def truncate(self, order):
        if order >= self.order:
            return self
        return LaurentSeries(self.field, self.val, self.coeffs[: max(order - self.val + 1, 0)]) if order >= self.val \
            else LaurentSeries(self.field, order + 1, [])

    def is_zero(self):
        return all(self.field.is_zero(c) for c in self.coeffs)

    # arithmetic ----------------------------------------------------------
    def __neg__(self):
        return LaurentSeries(self.field, self.val, [-c for c in self.coeffs])

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            return self._add_scalar(other)
        order = min(self.order, other.order)
        val = min(self.val, other.val)
        if order < val:
            return LaurentSeries(self.field, order + 1, [])
        out = [self.field.zero] * (order - val + 1)
        for s in (self, other):
            off = s.val - val
            for i, c in enumerate(s.coeffs):
                j = off + i
                if j >= len(out):
                    break
                out[j] = out[j] + c
        return LaurentSeries(self.field, val, out)

    __radd__ = __add__

    def _add_scalar(self, c):
        return self + LaurentSeries(self.field, 0, [c])._pad(self.order)

    def _pad(self, order):
        if order < self.val:
            return LaurentSeries(self.field, order + 1, [])
        n = order - self.val + 1
        return LaurentSeries(self.field, self.val, self.coeffs + [self.field.zero] * (n - len(self.coeffs)))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return LaurentSeries(self.field, self.val, [c * other for c in self.coeffs])
        return self.mul(other)

    def mul(self, other, order=None):
        """Product, optionally computing only the coefficients up to ``s**order``."""
        a, b = self, other
        val = a.val + b.val
        top = min(a.val + b.order, b.val + a.order)
        if order is not None and order < top:
            top = order
        n = top - val + 1
        if n <= 0:
            return LaurentSeries(self.field, top + 1, [])
        out = [self.field.zero] * n
        ac, bc = a.coeffs, b.coeffs
        lb = len(bc)
        for i in range(min(len(ac), n)):
            ai = ac[i]
            if ai == 0:
                continue
            lim = min(lb, n - i)
            for j in range(lim):
                bj = bc[j]
                if bj == 0:
                    continue
                out[i + j] = out[i + j] + ai * bj
        return LaurentSeries(self.field, val, out)

    __rmul__ = __mul__

    def inverse(self, val=None):
        """Multiplicative inverse; ``val`` pins the valuation of ``self``."""
        s = self.with_valuation(val) if val is not None else self.normalized()
        if not s.coeffs:
            raise ZeroDivisionError("division by a series that vanishes to its full truncation order")
        b0 = s.coeffs[0]
        if s.field.is_zero(b0):
            raise ZeroDivisionError("leading coefficient vanishes")
        n = len(s.coeffs)
        inv0 = s.field.one / b0
        out = [inv0] + [s.field.zero] * (n - 1)
        bc = s.coeffs
        for k in range(1, n):
            acc = s.field.zero
            for j in range(1, k + 1):
                bj = bc[j]
                if bj == 0:
                    continue
                acc = acc + bj * out[k - j]
            out[k] = -acc * inv0
        return LaurentSeries(s.field, -s.val, out)

    def __truediv__(self, other):
        if not isinstance(other, LaurentSeries):
            inv = self.field.one / other
            return LaurentSeries(self.field, self.val, [c * inv for c in self.coeffs])
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return LaurentSeries(self.field, 0, [self.field.one] + [self.field.zero] * max(len(self.coeffs) - 1, 0))
        result = self
        for _ in range(k - 1):
            result = result * self
        return result

    # calculus -------------------------------------------------------------
    def derivative(self):
        out_val = self.val - 1
        coeffs = [c * (self.val + i) for i, c in enumerate(self.coeffs)]
        if self.val == 0 and coeffs:
            return LaurentSeries(self.field, 0, coeffs[1:])
        return LaurentSeries(self.field, out_val, coeffs)

    def integral(self):
        """Primitive without constant term; requires a vanishing ``s**-1`` coefficient."""
        if self.val <= -1 <= self.order and not self.field.is_zero(self.coeff(-1)):
            raise ArithmeticError("series has a nonzero residue; no Laurent primitive")
        coeffs = []
        for i, c in enumerate(self.coeffs):
            e = self.val + i
            coeffs.append(self.field.zero if e == -1 else c / (e + 1))
        return LaurentSeries(self.field, self.val + 1, coeffs)

    def residue(self):
        """Coefficient of ``s**-1``."""
        if self.order < -1:
            raise TruncationInsufficient(f"series known only to s^{self.order}; residue unknown")
        return self.coeff(-1)

    def compose(self, g):
        """``self(g(s))`` for ``g`` of valuation >= 1."""
        if g.val < 1:
            g = g.with_valuation(1)
        field = self.field
        out_order = self._compose_order(g)
        result = LaurentSeries.zero(field, out_order)
        pos = [(self.val + i, c) for i, c in enumerate(self.coeffs) if self.val + i >= 0]
        neg = [(self.val + i, c) for i, c in enumerate(self.coeffs) if self.val + i < 0]
        if pos:
            # Horner on the regular part
            acc = LaurentSeries.zero(field, out_order)
            cmap = dict(pos)
            for e in range(pos[-1][0], -1, -1):
                acc = (acc * g).truncate(out_order)
                c = cmap.get(e)
                if c is not None and c != 0:
                    acc = acc + LaurentSeries.monomial(field, c, 0, out_order)
            result = result + acc
        if neg:
            ginv = g.inverse()
            power = None
            cmap = dict(neg)
            for e in range(-1, neg[0][0] - 1, -1):
                power = ginv if power is None else power * ginv
                c = cmap.get(e)
                if c is not None and c != 0:
                    result = result + power * c
        return result.truncate(out_order)

    def _compose_order(self, g):
        # self = sum_{e=val}^{order} a_e s^e + O(s^(order+1)); g = g1 s (1 + ...), known to g.order.
        # error from truncation of self: O(g^(order+1)) -> O(s^(order+1)).
        # error from truncation of g: a_e g^e, g^e known to relative precision (g.order - 1),
        # i.e. absolute order e - 1 + g.order; worst at the lowest e present (e >= val).
        e_min = self.val
        if e_min == 0 and len(self.coeffs) > 0:
            e_min = 1 if len(self.coeffs) > 1 else 0
        if e_min == 0:
            return self.order
        return min(self.order, e_min - 1 + g.order)

    def reversion(self):
        """Functional inverse ``r`` with ``self(r(s)) = s``; needs ``self = c1 s + ...``, ``c1 != 0``."""
        f = self.with_valuation(1) if self.val < 1 else self
        if f.val != 1 or not f.coeffs or f.field.is_zero(f.coeffs[0]):
            raise ArithmeticError("reversion requires a nonzero linear coefficient")
        field = f.field
        n = f.order
        c1 = f.coeffs[0]
        # Newton iteration on series: r <- r - (f(r) - s) / f'(r), doubling precision.
        r = LaurentSeries(field, 1, [field.one / c1])
        df = f.derivative()
        prec = 1
        s_var = LaurentSeries.variable(field, n)
        while prec < n:
            prec = min(2 * prec, n)
            r = r._pad(prec)
            num = (f.truncate(prec).compose(r) - s_var).truncate(prec)
            den = df.truncate(prec).compose(r)
            r = (r - num * den.inverse()).truncate(prec)
        return r._pad(n).truncate(n)

    def sqrt(self):
        """Square root of a series ``1 + O(s)``."""
        u = self.with_valuation(0) if self.val < 0 else self
        if u.val != 0 or not u.coeffs or not u.field.eq(u.coeffs[0], u.field.one):
            raise ArithmeticError("sqrt implemented for series with leading term 1")
        n = len(u.coeffs)
        r = [u.field.one] + [u.field.zero] * (n - 1)
        for k in range(1, n):
            acc = u.coeffs[k]
            for j in range(1, k):
                acc = acc - r[j] * r[k - j]
            r[k] = acc / 2
        return LaurentSeries(u.field, 0, r)

    def evaluate(self, s):
        """Numerical value of the known part at a point (for finite series)."""
        total = self.field.zero
        for i, c in enumerate(self.coeffs):
            total = total + c * s ** (self.val + i)
        return total

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(f"({c})*s^{self.val + i}")
        return " + ".join(terms or ["0"]) + f" + O(s^{self.order + 1})"

    def equals(self, other, order=None):
        order = min(self.order, other.order) if order is None else order
        lo = min(self.val, other.val)
        eq = self.field.eq
        return all(eq(self.coeff(k), other.coeff(k)) for k in range(lo, order + 1))

