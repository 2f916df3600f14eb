import pytest
from gmpy2 import mpq

from twomatrix import catalog
from twomatrix.curve import (build_curve_from_potentials, curve_from_laurent, local_involution,
                             potentials_from_curve, swap_xy)
from twomatrix.errors import NoGenusZeroSolution, UnsplittableDenominator
from twomatrix.polynomial import Polynomial, RationalFunction
from twomatrix.scalars import ExactField, FloatField

F = ExactField()


@pytest.mark.parametrize("name, expected", [
    ("gue", [-1, 1]),
    ("gue-reduction", [-1, 1]),
    ("gaussian-2mm", [-2, 2]),
    ("cubic-quadratic", [-1, 1]),
    ("d2-two", [-3, 1, 2]),
    ("quartic", [-2, 2]),
])
def test_branch_points(curves, name, expected):
    assert sorted(curves[name].branch_points) == expected


@pytest.mark.parametrize("name", ["gue-reduction", "gaussian-2mm", "cubic-quadratic", "d2-two", "quartic"])
def test_temperature_and_potentials_roundtrip(curves, name):
    c = curves[name]
    V1, V2, T = potentials_from_curve(c.x, c.y)
    assert T == c.Tn
    rebuilt = build_curve_from_potentials(V1, V2, T, 1, F)
    assert rebuilt.same_as(c) or (rebuilt.x == c.x and rebuilt.y == c.y)


def test_gue_reduction_potentials(curves):
    c = curves["gue-reduction"]
    assert c.V1 == Polynomial(F, [0, 0, 1], "x")
    assert c.V2 == Polynomial(F, [0, 0, mpq(1, 2)], "y")
    assert c.T == 1


def test_quartic_curve_is_the_closed_form():
    # x = g z + 1/z with t4 = (1 - g)/(3 g^2)
    for g in (mpq(1, 4), mpq(4, 9)):
        t4 = (1 - g) / (3 * g * g)
        c = catalog.quartic(t4)
        lx, cx = c.x.laurent_coeffs()
        assert (lx, cx) == (-1, [1, 0, g])


@pytest.mark.parametrize("name", ["cubic-quadratic", "d2-two"])
def test_local_involution(curves, name):
    c = curves[name]
    for a in c.branch_points:
        sig = local_involution(c.x, a, 12)
        xs = c.x.series_at(a, 12)
        assert xs.compose(sig).equals(xs, 10)
        assert sig.coeff(1) == -1


def test_irrational_branch_points_need_float():
    with pytest.raises((UnsplittableDenominator, NoGenusZeroSolution)):
        catalog.gaussian_2mm(2, 3, 1, 1).branch_points
    fl = FloatField(128)
    c = catalog.gaussian_2mm(2, 3, 1, 1, field=fl)
    r = fl.ctx.sqrt(15)
    assert sorted(abs(a) for a in c.branch_points) == pytest.approx([float(r), float(r)])


def test_laurent_curves_have_one_temperature():
    # x = z^-2/3 + 2/z + z, y = 1/z + 3z + z^2: the temperatures read at the two
    # infinities agree and equal -[z^-1] y x' = -(1 - 6 - 2/3)
    X = RationalFunction.from_laurent(F, [mpq(1, 3), 2, 0, 1], -2)
    Y = RationalFunction.from_laurent(F, [1, 0, 3, 1], -1)
    V1, V2, T = potentials_from_curve(X, Y)
    assert T == mpq(17, 3)
    assert V1.degree == 3 and V2.degree == 3


def test_swap_xy_exchanges_potentials(curves):
    c = curves["cubic-quadratic"]
    s = swap_xy(c)
    assert s.Tn == c.Tn
    assert s.V1n.coeffs == c.V2n.coeffs
    assert s.V2n.coeffs == c.V1n.coeffs
    back = swap_xy(s)
    assert back.x == c.x and back.y == c.y


def test_kappa_normalization():
    c1 = curve_from_laurent(F, [1, 0, 1], -1, [1, 0, 2], -1)
    c2 = curve_from_laurent(F, [1, 0, 1], -1, [1, 0, 2], -1, kappa=3)
    assert c2.Tn == c1.Tn and c2.T == 3 * c1.T
    assert c2.V1 == c1.V1 * 3
