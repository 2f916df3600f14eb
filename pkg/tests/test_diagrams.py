import pytest

from twomatrix.diagrams import (DiagramEvaluator, count_unrolled_terms, cut_propagator,
                                enumerate_diagrams)


@pytest.mark.parametrize("h, k, count, unrolled", [
    (0, 2, 1, 2), (1, 0, 1, 1), (2, 0, 3, 5), (0, 3, 3, 12), (1, 1, 2, 4),
])
def test_diagram_counts(h, k, count, unrolled):
    ds = enumerate_diagrams(h, k)
    assert len(ds) == count
    assert count_unrolled_terms(h, k) == unrolled
    assert sum(d.multiplicity for d in ds) == unrolled


def test_genus_two_vacuum_diagrams():
    strings = [d.string for d in enumerate_diagrams(2, 0)]
    assert strings == ["L0(L1(S(B[m0],B[m1])))", "L0(S(B[m0],L1(B[m1])))", "S(L0(B[m0]),L0(B[m0]))"]


def test_diagram_shapes():
    # V = 2h + k - 1 vertices, h of them loops; k external and h internal propagators
    for h, k in [(0, 3), (1, 2), (2, 1), (3, 0)]:
        for d in enumerate_diagrams(h, k):
            assert d.n_vertices == 2 * h + k - 1
            assert d.n_propagators == k + h
            assert d.n_internal_propagators == h


@pytest.mark.parametrize("name", ["gue-reduction", "cubic-quadratic", "d2-two"])
def test_diagram_sum_equals_recursion(curves, engines, name):
    ev = DiagramEvaluator(curves[name], engines[name])
    for h in range(3):
        for k in range(5):
            if 1 <= 2 * h + k - 1 <= 3:
                assert ev.sum(h, k) == engines[name].w(h, k + 1), (h, k)


def test_diagram_values_at_points_sum_to_the_correlator(curves, engines):
    ev = DiagramEvaluator(curves["d2-two"], engines["d2-two"])
    pts = [3, 5]
    total = sum(ev.evaluate(d, pts) for d in enumerate_diagrams(1, 1))
    assert total == engines["d2-two"].compute_w(1, 2).evaluate(*pts)


def test_cut_propagator_descriptor():
    d = enumerate_diagrams(0, 2)[0]
    edges = d.edges()
    out = cut_propagator(d, edges[0])
    assert out["diagram"] == d.string and out["weight"] == "1/(dx(q) dy(q))"
    with pytest.raises(ValueError):
        cut_propagator(d, ("B", (9, 9)))
