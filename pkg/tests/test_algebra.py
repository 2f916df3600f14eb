import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from twomatrix.errors import TruncationInsufficient, UnsplittableDenominator
from twomatrix.polynomial import (Polynomial, RationalFunction, find_roots,
                                  from_partial_fractions, partial_fractions)
from twomatrix.scalars import CouplingSeriesRing, ExactField, FloatField
from twomatrix.series import LaurentSeries

F = ExactField()
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12).map(lambda q: mpq(q.numerator, q.denominator))
nonzero = rationals.filter(lambda q: q != 0)


@given(rationals, rationals, rationals)
def test_exact_field_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(rationals)
def test_exact_scalar_string_roundtrip(a):
    assert F.from_str(F.to_str(a)) == a


def test_float_field_equality_and_strings():
    fl = FloatField(128)
    a = fl.convert(mpq(1, 3))
    assert fl.eq(a, a * (1 + fl.ctx.mpf(2) ** -100))
    assert not fl.eq(a, a * (1 + fl.ctx.mpf(2) ** -40))
    s = fl.to_str(a)
    assert s.endswith("@128")
    assert fl.eq(fl.from_str(s), a)


def test_coupling_series_ring():
    R = CouplingSeriesRing(4)
    e = R.gen()
    inv = (R.one + e).inverse()
    assert list(inv.c) == [1, -1, 1, -1]
    assert (e * e * e * e) == R.zero
    with pytest.raises(ZeroDivisionError):
        e.inverse()


polys = st.lists(rationals, min_size=1, max_size=6).map(lambda cs: Polynomial(F, cs))


@given(polys, polys.filter(lambda p: not p.is_zero()))
def test_polynomial_divmod(a, b):
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


@given(st.lists(nonzero, min_size=1, max_size=4, unique=True), st.lists(rationals, min_size=4, max_size=4))
def test_residue_matches_partial_fraction_coefficient(poles, cs):
    # f = sum c_i/(z - a_i) + 1/(z - a_0)^2
    f = RationalFunction.zero(F)
    for a, c in zip(poles, cs):
        f = f + RationalFunction(Polynomial(F, [c]), Polynomial(F, [-a, 1]))
    a0 = poles[0]
    f = f + RationalFunction(Polynomial(F, [1]), Polynomial(F, [-a0, 1]) ** 2)
    poly, table = partial_fractions(f)
    assert poly.is_zero()
    for a, coeffs in table:
        assert f.residue_at(a) == coeffs[0]
    back = from_partial_fractions(F, poly, table)
    assert (back - f).num.is_zero()


def test_find_roots_and_unsplittable():
    p = Polynomial(F, [-6, 11, -6, 1])  # (z-1)(z-2)(z-3)
    assert find_roots(p) == [(1, 1), (2, 1), (3, 1)]
    q = Polynomial(F, [-2, 0, 1]) * Polynomial(F, [-1, 1]) ** 2
    roots, residual = find_roots(q, with_residual=True)
    assert roots == [(1, 2)]
    assert residual.degree == 2
    f = RationalFunction(Polynomial(F, [1]), Polynomial(F, [-2, 0, 1]))
    with pytest.raises(UnsplittableDenominator):
        partial_fractions(f)


series_coeffs = st.lists(rationals, min_size=8, max_size=8)


@settings(max_examples=40)
@given(nonzero, series_coeffs)
def test_series_reversion(c1, rest):
    f = LaurentSeries(F, 1, [c1] + rest)
    r = f.reversion()
    s = LaurentSeries.variable(F, f.order)
    assert f.compose(r).equals(s, f.order)


@settings(max_examples=40)
@given(nonzero, series_coeffs)
def test_series_inverse_and_sqrt(c0, rest):
    f = LaurentSeries(F, -2, [c0] + rest)
    g = f * f.inverse()
    one = LaurentSeries.monomial(F, 1, 0, g.order)
    assert g.equals(one)
    u = LaurentSeries(F, 0, [mpq(1)] + rest)
    r = u.sqrt()
    assert (r * r).equals(u)


def test_series_truncation_is_tracked():
    f = LaurentSeries(F, 0, [mpq(1), mpq(2), mpq(3)])
    assert f.coeff(2) == 3
    with pytest.raises(TruncationInsufficient):
        f.coeff(3)
    assert f.derivative().coeff(1) == 6
    assert LaurentSeries(F, -1, [mpq(5), mpq(0)]).residue() == 5


def test_rational_function_series_at_infinity():
    # x = z + 1/z, t = 1/z: x = 1/t + t
    x = RationalFunction.from_laurent(F, [1, 0, 1], -1)
    s = x.series_at_infinity(6)
    assert s.coeff(-1) == 1 and s.coeff(1) == 1 and s.coeff(0) == 0
