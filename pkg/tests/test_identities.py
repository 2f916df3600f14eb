import pytest

from twomatrix.identities import kernel_finiteness, schwarzian, sheets, verify_loop_identities
from twomatrix.polynomial import RationalFunction


@pytest.mark.parametrize("name, h", [("gue-reduction", 2), ("cubic-quadratic", 1), ("d2-two", 1)])
def test_sheet_sum_identities(curves, engines, name, h):
    report, details = verify_loop_identities(curves[name], h, 20, engines[name])
    assert set(report) == {"sum_y", "sum_W1", "sum_W2", "polynomial"}
    assert all(report.values()), details


def test_sheet_count_is_degree_of_v2_prime_plus_one(curves):
    d2, shs = sheets(curves["d2-two"], 10)
    assert d2 == 2 and len(shs) == 3
    d2, shs = sheets(curves["cubic-quadratic"], 10)
    assert d2 == 1 and len(shs) == 2


@pytest.mark.parametrize("name", ["gue-reduction", "cubic-quadratic", "d2-two", "quartic"])
def test_recursion_kernel_has_no_pole_at_branch_points(curves, engines, name):
    assert kernel_finiteness(curves[name], engines[name])


def test_schwarzian_of_mobius_vanishes(curves):
    F = curves["gue"].field
    m = RationalFunction.from_laurent(F, [1, 2], 0) / RationalFunction.from_laurent(F, [3, 1], 0)
    assert schwarzian(m).num.is_zero()
    assert not schwarzian(curves["gue"].x).num.is_zero()
