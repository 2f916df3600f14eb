"""Coefficient backends.

Three interchangeable backends share the same small interface (``convert``,
``is_zero``, ``eq``, ``to_str``, ``from_str``):

* :class:`ExactField` -- rationals (``gmpy2.mpq``), the default;
* :class:`FloatField` -- ``mpmath`` floats at a fixed precision in bits;
* :class:`CouplingSeriesRing` -- truncated power series in one small coupling
  with exact rational coefficients, used to expand curve families to a fixed
  order in a perturbation parameter.

Elements are plain Python numbers (or :class:`CouplingSeries`) and are combined
with the usual operators; the backend object only creates constants and
decides equality.
"""
from __future__ import annotations

import re
from fractions import Fraction

import mpmath
from gmpy2 import mpq


def _as_mpq(value):
    if isinstance(value, mpq):
        return value
    if isinstance(value, (int, Fraction)):
        return mpq(value)
    if isinstance(value, str):
        return mpq(value)
    raise TypeError(f"cannot convert {value!r} to an exact rational")


class ExactField:
    """Exact rational arithmetic."""

    name = "exact"
    exact = True

    def convert(self, value):
        if isinstance(value, CouplingSeries):
            raise TypeError("coupling series in exact field")
        return _as_mpq(value)

    @property
    def zero(self):
        return mpq(0)

    @property
    def one(self):
        return mpq(1)

    def is_zero(self, value, scale=None):
        return value == 0

    def eq(self, a, b):
        return a == b

    def to_str(self, value):
        value = mpq(value)
        if value.denominator == 1:
            return f"{value.numerator}/1"
        return f"{value.numerator}/{value.denominator}"

    def from_str(self, text):
        return mpq(text.strip())

    def __repr__(self):
        return "ExactField()"

    def __eq__(self, other):
        return isinstance(other, ExactField)

    def __hash__(self):
        return hash("exact")


_FLOAT_RE = re.compile(r"^\s*([-+]?[0-9.]+(?:[eE][-+]?\d+)?)(?:\s*([-+])\s*([0-9.]+(?:[eE][-+]?\d+)?)j)?\s*@\s*(\d+)\s*$")


class FloatField:
    """Arbitrary-precision floating point backend (``mpmath``).

    Equality is ``|a - b| <= 2**(-p/2) * max(1, |a|, |b|)``.
    """

    exact = False

    def __init__(self, prec=256):
        self.prec = int(prec)
        self.ctx = mpmath.MPContext()
        self.ctx.prec = self.prec
        self.tol = self.ctx.mpf(2) ** (-(self.prec // 2))

    @property
    def name(self):
        return f"float({self.prec})"

    def convert(self, value):
        ctx = self.ctx
        if isinstance(value, mpq):
            return ctx.mpf(int(value.numerator)) / int(value.denominator)
        if isinstance(value, Fraction):
            return ctx.mpf(value.numerator) / value.denominator
        if isinstance(value, str):
            return self.from_str(value) if "@" in value else ctx.mpmathify(value)
        if isinstance(value, (mpmath.mpf, mpmath.mpc)) or hasattr(value, "_mpf_") or hasattr(value, "_mpc_"):
            return ctx.convert(value)
        return ctx.mpmathify(value)

    @property
    def zero(self):
        return self.ctx.mpf(0)

    @property
    def one(self):
        return self.ctx.mpf(1)

    def is_zero(self, value, scale=None):
        bound = self.tol if scale is None else self.tol * max(1, abs(scale))
        return abs(value) <= bound

    def eq(self, a, b):
        return abs(a - b) <= self.tol * max(1, abs(a), abs(b))

    def to_str(self, value):
        ctx = self.ctx
        digits = int(self.prec * 0.30103) + 2
        if isinstance(value, mpmath.mpc) or hasattr(value, "_mpc_"):
            re_, im_ = ctx.nstr(value.real, digits, min_fixed=1, max_fixed=0), ctx.nstr(abs(value.imag), digits, min_fixed=1, max_fixed=0)
            sign = "-" if value.imag < 0 else "+"
            return f"{re_}{sign}{im_}j@{self.prec}"
        return f"{ctx.nstr(value, digits, min_fixed=1, max_fixed=0)}@{self.prec}"

    def from_str(self, text):
        m = _FLOAT_RE.match(text)
        if not m:
            raise ValueError(f"malformed float scalar {text!r}")
        real = self.ctx.mpf(m.group(1))
        if m.group(3) is not None:
            imag = self.ctx.mpf(m.group(3))
            if m.group(2) == "-":
                imag = -imag
            return self.ctx.mpc(real, imag)
        return real

    def __repr__(self):
        return f"FloatField({self.prec})"

    def __eq__(self, other):
        return isinstance(other, FloatField) and other.prec == self.prec

    def __hash__(self):
        return hash(("float", self.prec))


class CouplingSeries:
    """Element of Q[e]/(e^n): a power series in a coupling, truncated."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = tuple(coeffs)

    @property
    def n(self):
        return len(self.c)

    def _lift(self, other):
        if isinstance(other, CouplingSeries):
            if other.n != self.n:
                raise ValueError("coupling series of different truncation")
            return other
        if isinstance(other, (int, mpq, Fraction)):
            return CouplingSeries((mpq(other),) + (mpq(0),) * (self.n - 1))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return CouplingSeries(a + b for a, b in zip(self.c, o.c))

    __radd__ = __add__

    def __neg__(self):
        return CouplingSeries(-a for a in self.c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return CouplingSeries(a - b for a, b in zip(self.c, o.c))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, mpq, Fraction)):
            other = mpq(other)
            return CouplingSeries(a * other for a in self.c)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        a, b, n = self.c, o.c, self.n
        out = [mpq(0)] * n
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j in range(n - i):
                bj = b[j]
                if bj != 0:
                    out[i + j] += ai * bj
        return CouplingSeries(out)

    __rmul__ = __mul__

    def inverse(self):
        a0 = self.c[0]
        if a0 == 0:
            raise ZeroDivisionError("coupling series without constant term is not invertible")
        n = self.n
        inv = [mpq(0)] * n
        inv[0] = 1 / a0
        for k in range(1, n):
            acc = mpq(0)
            for j in range(1, k + 1):
                acc += self.c[j] * inv[k - j]
            inv[k] = -acc / a0
        return CouplingSeries(inv)

    def __truediv__(self, other):
        if isinstance(other, (int, mpq, Fraction)):
            other = mpq(other)
            return CouplingSeries(a / other for a in self.c)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = self._lift(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def is_zero(self):
        return all(a == 0 for a in self.c)

    def __repr__(self):
        return "CouplingSeries(" + ", ".join(str(a) for a in self.c) + ")"

    def __getitem__(self, k):
        return self.c[k]


class CouplingSeriesRing:
    """Truncated power series in a coupling ``e``: Q[e]/(e^n).

    Only elements with a nonzero constant term can be inverted; the engine
    never divides by anything else when the unperturbed curve is regular.
    """

    exact = True

    def __init__(self, n):
        self.n = int(n)

    @property
    def name(self):
        return f"series({self.n})"

    def convert(self, value):
        if isinstance(value, CouplingSeries):
            if value.n != self.n:
                raise ValueError("truncation mismatch")
            return value
        if isinstance(value, (list, tuple)):
            coeffs = [mpq(v) for v in value] + [mpq(0)] * (self.n - len(value))
            return CouplingSeries(coeffs[: self.n])
        return CouplingSeries((_as_mpq(value),) + (mpq(0),) * (self.n - 1))

    def gen(self):
        """The coupling itself, ``e``."""
        return self.convert([0, 1])

    @property
    def zero(self):
        return self.convert(0)

    @property
    def one(self):
        return self.convert(1)

    def is_zero(self, value, scale=None):
        if isinstance(value, CouplingSeries):
            return value.is_zero()
        return value == 0

    def eq(self, a, b):
        return self.is_zero(a - b)

    def to_str(self, value):
        value = self.convert(value)
        return "[" + ", ".join(ExactField().to_str(a) for a in value.c) + "]"

    def from_str(self, text):
        body = text.strip().strip("[]")
        return self.convert([mpq(t) for t in body.split(",") if t.strip()])

    def __repr__(self):
        return f"CouplingSeriesRing({self.n})"

    def __eq__(self, other):
        return isinstance(other, CouplingSeriesRing) and other.n == self.n

    def __hash__(self):
        return hash(("series", self.n))


def field_from_spec(backend="exact", precision=256):
    if backend == "exact":
        return ExactField()
    if backend.startswith("float"):
        m = re.match(r"float(?:\((\d+)\))?$", backend)
        if not m:
            raise ValueError(f"unknown backend {backend!r}")
        return FloatField(int(m.group(1)) if m.group(1) else precision)
    raise ValueError(f"unknown backend {backend!r}")
