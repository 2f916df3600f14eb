import pytest
from gmpy2 import mpq

from oracles import harer_zagier
from twomatrix import catalog
from twomatrix.expansions import moments
from twomatrix.recursion import RecursionEngine, bergmann_kernel, w3_closed_form
from twomatrix.scalars import FloatField


def test_planar_gue_moments_are_catalan(engines):
    m = moments(engines["gue-reduction"], 0, 10)
    assert [m[j] for j in range(0, 11, 2)] == [harer_zagier(0, n) for n in range(6)]
    assert all(m[j] == 0 for j in range(1, 11, 2))


@pytest.mark.parametrize("h, jmax", [(1, 10), (2, 10), (3, 12)])
def test_higher_genus_gue_moments(engines, h, jmax):
    m = moments(engines["gue"], h, jmax)
    for j in range(0, jmax + 1, 2):
        assert m[j] == harer_zagier(h, j // 2), (h, j)


def test_gue_reduction_has_gue_moments(engines):
    # integrating out M2 leaves the unit-variance GUE
    m = moments(engines["gue-reduction"], 1, 8)
    assert [m[j] for j in (4, 6, 8)] == [1, 10, 70]


def test_w3_on_gue_matches_hand_residues(engines):
    # W3^(0) = 1/2 [prod (z_i - 1)^-2 - prod (z_i + 1)^-2] dz1 dz2 dz3
    w = engines["gue"].compute_w(0, 3)
    for zs in [(2, 3, 5), (mpq(1, 3), mpq(-7, 2), mpq(9, 4))]:
        a = mpq(1)
        b = mpq(1)
        for z in zs:
            a /= (z - 1) ** 2
            b /= (z + 1) ** 2
        assert w.evaluate(*zs) == (a - b) / 2


@pytest.mark.parametrize("name", ["gue", "gue-reduction", "gaussian-2mm", "cubic-quadratic", "d2-two", "quartic"])
def test_w3_recursion_equals_closed_form(curves, engines, name):
    assert engines[name].compute_w(0, 3).equals(w3_closed_form(curves[name]))


@pytest.mark.parametrize("h, k", [(0, 4), (0, 5), (1, 2), (1, 3), (2, 2)])
def test_correlators_are_symmetric(engines, h, k):
    assert engines["cubic-quadratic"].compute_w(h, k).is_symmetric()


def test_bergmann_kernel(curves):
    B = bergmann_kernel(curves["cubic-quadratic"])
    assert B.evaluate(3, 1) == mpq(1, 4)


def test_points_mode_agrees_with_symbolic(engines):
    e = engines["d2-two"]
    full = e.compute_w(0, 4)
    pts = (mpq(5, 2), mpq(7, 3), mpq(-11, 5), mpq(13, 4))
    assert e.evaluate(0, pts) == full.evaluate(*pts)
    g1 = e.compute_w(1, 2)
    assert e.evaluate(1, pts[:2]) == g1.evaluate(*pts[:2])


def test_float_backend_matches_exact(curves, engines):
    fl = FloatField(256)
    cf = catalog.cubic_quadratic(field=fl)
    ef = RecursionEngine(cf)
    pts = (mpq(5, 2), mpq(7, 3))
    exact = engines["cubic-quadratic"].compute_w(1, 2).evaluate(*pts)
    approx = ef.compute_w(1, 2).evaluate(*pts)
    assert fl.eq(approx, fl.convert(exact))


@pytest.mark.parametrize("name", ["cubic-quadratic", "d2-two"])
def test_doubling_truncation_orders_changes_nothing(curves, engines, name):
    e2 = RecursionEngine(curves[name], scale=2)
    for h, n in [(0, 4), (1, 2), (2, 1)]:
        assert e2.w(h, n) == engines[name].w(h, n)


def test_unstable_correlators_rejected(engines):
    e = engines["gue"]
    with pytest.raises(ValueError):
        e.w(0, 2)
    with pytest.raises(ValueError):
        e.compute_w(0, 1)
