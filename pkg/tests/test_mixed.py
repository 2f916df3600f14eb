import pytest
from gmpy2 import mpq

from twomatrix import catalog
from twomatrix.expansions import moments
from twomatrix.mixed import compute_w_k1, w_11_0, w_21_0
from twomatrix.recursion import RecursionEngine
from twomatrix.wick import WickModel, wick_moments


def _words(key):
    return [(1,) * a for a in key[:-1]] + [(2,) * key[-1]]


def _check_against_wick(mc, model, T, h, order=None, jmax=4, total=16):
    m = mc.moments(jmax)
    assert m
    for key, v in m.items():
        if sum(key) > total:
            continue
        assert v == wick_moments(model, _words(key), order).genus(h, T), key
    # and nothing nonzero is missing on the engine side
    for a in range(1, 4):
        for b in range(1, 4):
            key = (a,) * mc.k + (b,)
            if sum(key) <= 10 and key not in m:
                assert wick_moments(model, _words(key), order).genus(h, T) == 0, key


def test_w11_is_minus_bergmann(curves):
    mc = w_11_0(curves["cubic-quadratic"])
    p, q = mpq(3), mpq(5, 2)
    assert mc.evaluate([p], q) == -1 / (p - q) ** 2


def test_w11_gaussian_moments(curves):
    # <tr M1 tr M2>_c = hbar N kappa / det at leading order
    c = curves["gaussian-2mm"]
    t2, tt2, kappa, T = 2, 6, 2, 3
    m = w_11_0(c).moments(4)
    assert m[(1, 1)] == mpq(T * kappa, t2 * tt2 - kappa ** 2)
    _check_against_wick(w_11_0(c), WickModel(t2, tt2, kappa), T, 0)


def test_single_trace_mixed_moment_from_loop_equation(curves, engines):
    # <tr V1'(M1) M1> - kappa <tr M1 M2> = hbar N^2 gives <tr M1 M2> from W_1
    t2, tt2, kappa, T = 2, 6, 2, 3
    m2 = moments(engines["gaussian-2mm"], 0, 2)[2]
    via_loop = (t2 * m2 - T ** 2) / kappa
    det = t2 * tt2 - kappa ** 2
    assert via_loop == mpq(T ** 2 * kappa, det)
    assert via_loop == wick_moments(WickModel(t2, tt2, kappa), [(1, 2)]).genus(0, T)


@pytest.mark.parametrize("name", ["gue-reduction", "cubic-quadratic", "d2-two"])
def test_w21_residue_form_equals_derivative_form(curves, engines, name):
    a, b = w_21_0(curves[name], mpq(5, 2), mpq(7, 3), mpq(11, 4), engines[name])
    assert a == b


def test_cut_sum_w21_matches_residue_form(curves, engines):
    c, e = curves["cubic-quadratic"], engines["cubic-quadratic"]
    mc = compute_w_k1(c, 0, 2, e)
    p1, p2, q = mpq(2), mpq(3), mpq(4)
    a, _ = w_21_0(c, p1, p2, q, e)
    assert mc.evaluate([p1, p2], q) == a


@pytest.mark.parametrize("name", ["gue-reduction", "cubic-quadratic"])
def test_w11_genus_one_is_exact_in_q(curves, engines, name):
    assert compute_w_k1(curves[name], 1, 1, engines[name]).is_exact_in_q()


@pytest.mark.parametrize("h, k", [(0, 2), (1, 1), (0, 3)])
def test_gaussian_mixed_moments_against_wick(curves, engines, h, k):
    mc = compute_w_k1(curves["gaussian-2mm"], h, k, engines["gaussian-2mm"])
    _check_against_wick(mc, WickModel(2, 6, 2), 3, h, jmax=4 if k < 3 else 3, total=12)


@pytest.fixture(scope="module")
def cubic_series():
    c = catalog.cubic_2mm_series(order=2, t3=1, tt3=0, t2=2, tt2=1, kappa=1, T=1)
    return c, RecursionEngine(c)


@pytest.mark.parametrize("h, k", [(0, 1), (0, 2), (1, 1)])
def test_first_order_cubic_mixed_moments(cubic_series, h, k):
    c, e = cubic_series
    mc = w_11_0(c) if (h, k) == (0, 1) else compute_w_k1(c, h, k, e)
    model = WickModel(2, 1, 1, couplings=[(1, 3, 1)])
    m = mc.moments(3)
    assert any(v.c[1] != 0 for v in m.values())
    for key, v in m.items():
        assert v.c[0] == wick_moments(model, _words(key)).genus(h), key
        assert v.c[1] == wick_moments(model, _words(key), (1,)).genus(h), key


def test_xi_and_link_structure(curves, engines):
    mc = compute_w_k1(curves["cubic-quadratic"], 0, 2, engines["cubic-quadratic"])
    kinds = {e[0] for key in mc.terms for e in key}
    assert kinds <= {"xi", "link"}
    # d/dq of an exact differential is consistent with finite differences of the values
    dq = mc.d_q()
    p1, p2, q = mpq(2), mpq(3), mpq(4)
    h = mpq(1, 10 ** 8)
    fd = (mc.evaluate([p1, p2], q + h) - mc.evaluate([p1, p2], q - h)) / (2 * h)
    assert abs(float(fd - dq.evaluate([p1, p2], q))) < 1e-6
