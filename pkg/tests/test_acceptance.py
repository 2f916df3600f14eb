"""One test per acceptance criterion; each prints a single PASS/FAIL line with its timing."""
import time
from pathlib import Path

import pytest
import sympy
from gmpy2 import mpq

from twomatrix import catalog
from twomatrix.curve import build_curve_from_potentials
from twomatrix.diagrams import DiagramEvaluator
from twomatrix.expansions import moments
from twomatrix.free_energy import (check_free1, check_homogeneity, check_hx_b, check_t_derivative,
                                   check_xy_symmetry, free_energy)
from twomatrix.identities import verify_loop_identities
from twomatrix.jobs import run_corpus
from twomatrix.mixed import compute_w_k1, w_11_0
from twomatrix.polynomial import Polynomial
from twomatrix.recursion import RecursionEngine, w3_closed_form
from twomatrix.scalars import ExactField, FloatField
from twomatrix.wick import WickModel, fatgraph_free_energy, gue_genus_expansion, wick_moments

CORPUS = Path(__file__).parent / "corpus"
F = ExactField()


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, t0, limit):
        dt = time.time() - t0
        ok = bool(ok) and dt < limit
        with capsys.disabled():
            print(f"\nACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL'}  {dt:7.2f}s (limit {limit}s)  {detail}")
        assert ok, detail
    return emit


def test_01_hx_bergmann(curves, report):
    t0 = time.time()
    worst, ok = 0.0, True
    for name in ("gue-reduction", "gaussian-2mm", "cubic-quadratic"):
        t = time.time()
        ok &= check_hx_b(curves[name])[0]
        worst = max(worst, time.time() - t)
    report(1, ok and worst < 1, f"H_x B = -y dx on 3 curves, slowest {worst:.3f}s", t0, 3)


def test_02_w3_closed_form(curves, report):
    t0 = time.time()
    ok = True
    for name in ("gue", "gue-reduction", "gaussian-2mm", "cubic-quadratic", "d2-two", "quartic"):
        ok &= RecursionEngine(curves[name]).compute_w(0, 3).equals(w3_closed_form(curves[name]))
    w = RecursionEngine(curves["gue"]).compute_w(0, 3)
    for zs in [(2, 3, 5), (mpq(1, 3), mpq(-7, 2), mpq(9, 4))]:
        a = b = mpq(1)
        for z in zs:
            a /= (z - 1) ** 2
            b /= (z + 1) ** 2
        ok &= w.evaluate(*zs) == (a - b) / 2
    report(2, ok, "W3 recursion = closed form on 6 curves; GUE hand formula", t0, 1)


def test_03_free1(curves, report):
    t0 = time.time()
    e = RecursionEngine(curves["gue-reduction"])
    ok = all(check_free1(curves["gue-reduction"], h, e)[0] for h in (1, 2, 3))
    report(3, ok, "(1-2h) W1 = H_x W2 for h = 1, 2, 3 (GUE reduction)", t0, 30)


def test_04_sheet_identities(curves, report):
    t0 = time.time()
    e = RecursionEngine(curves["d2-two"])
    ok = True
    for h in (0, 1, 2):
        rep, _ = verify_loop_identities(curves["d2-two"], h, 20, e)
        ok &= len(rep) == 4 and all(rep.values())
    report(4, ok, "four sheet-sum identities to order 20 on the d2 = 2 curve, h <= 2", t0, 60)


def test_05_diagrams(curves, report):
    t0 = time.time()
    c = curves["gue-reduction"]
    e = RecursionEngine(c)
    ev = DiagramEvaluator(c, e)
    pairs = [(h, k) for h in range(4) for k in range(7) if 1 <= 2 * h + k - 1 <= 5]
    bad = [(h, k) for h, k in pairs if ev.sum(h, k) != e.w(h, k + 1)]
    report(5, not bad, f"diagram sum = recursion for {len(pairs)} (h, k) with 2h+k-1 <= 5; mismatches {bad}",
           t0, 300)


def test_06_gaussian_oracle(curves, report):
    t0 = time.time()
    c = curves["gue-reduction"]
    e = RecursionEngine(c)
    oracle = gue_genus_expansion(2)
    f2 = free_energy(c, 2, engine=e).value
    m = moments(e, 0, 10)
    cat = all(m[2 * n] == sympy.catalan(n) for n in range(6)) and all(m[j] == 0 for j in range(1, 11, 2))
    report(6, f2 == oracle == mpq(-1, 240) and cat,
           f"F2 = {f2}, Barnes-G oracle {oracle}; planar m0..m10 Catalan: {cat}", t0, 60)


def test_07_quartic(report):
    t0 = time.time()
    model = WickModel(1, couplings=[(1, 4, 1)])
    # <tr M^4> = hbar^2 (2 N^3 + N) in the Gaussian theory
    ok = wick_moments(model, [(1,) * 4]).polynomial_in_N() == {(2, 3): 2, (2, 1): 1}
    e = RecursionEngine(catalog.quartic_series(order=2))
    for h in (0, 1):
        m = moments(e, h, 6)
        for j in (2, 4, 6):
            for n in (0, 1):
                ok &= m[j].c[n] == wick_moments(model, [(1,) * j], (n,)).genus(h)
    F2 = free_energy(catalog.quartic_series(order=4), 2).value
    graphs = [fatgraph_free_energy(model, (n,), 2) for n in (1, 2, 3)]
    ok &= list(F2.c) == [gue_genus_expansion(2)] + graphs
    report(7, ok, f"quartic moments g=0,1 at O(t4); F2 series {[str(v) for v in F2.c]} = fat graphs",
           t0, 300)


def test_08_two_matrix_gaussian(curves, report):
    t0 = time.time()
    t2, tt2, kappa, T = 2, 6, 2, 3
    det = t2 * tt2 - kappa ** 2
    model = WickModel(t2, tt2, kappa)
    c = curves["gaussian-2mm"]
    e = RecursionEngine(c)
    # single-trace <tr M1 M2> from the planar W1 through the loop equation
    m2 = moments(e, 0, 2)[2]
    single = (t2 * m2 - T ** 2) / kappa
    ok = single == mpq(T * T * kappa, det) == wick_moments(model, [(1, 2)]).genus(0, T)
    # W_{1,1} expansion against connected double-trace correlators
    mm = w_11_0(c).moments(3)
    ok &= mm[(1, 1)] == mpq(T * kappa, det)
    for (a, b), v in mm.items():
        ok &= v == wick_moments(model, [(1,) * a, (2,) * b]).genus(0, T)
    # first order in a cubic coupling
    cs = catalog.cubic_2mm_series(order=2, t3=1, tt3=0, t2=2, tt2=1, kappa=1, T=1)
    cm = WickModel(2, 1, 1, couplings=[(1, 3, 1)])
    es = RecursionEngine(cs)
    n_checked = 0
    for mc in (w_11_0(cs), compute_w_k1(cs, 0, 2, es)):
        for key, v in mc.moments(3).items():
            words = [(1,) * a for a in key[:-1]] + [(2,) * key[-1]]
            ok &= v.c[1] == wick_moments(cm, words, (1,)).genus(0)
            n_checked += 1
    report(8, ok, f"<tr M1 M2> = {single}; W11 moments; {n_checked} cubic O(t3) mixed moments", t0, 300)


def _family(V1, V2):
    return {"V1": Polynomial(F, V1, "x"), "V2": Polynomial(F, V2, "y"), "T": mpq(1), "kappa": mpq(1)}


def _build(p):
    return build_curve_from_potentials(p["V1"], p["V2"], p["T"], p["kappa"], F)


def test_09_homogeneity(report):
    t0 = time.time()
    ok = True
    for fam in (_family([0, 0, 1], [0, 0, mpq(1, 2)]), _family([0, 0, 1, 0, 1], [0, 0, mpq(1, 2)])):
        for h in (2, 3):
            for lam in (2, 3):
                good, F1, F2 = check_homogeneity(_build, fam, h, lam)
                ok &= good and F2 * lam ** (2 * h - 2) == F1
    report(9, ok, "F(lambda params) = lambda^(2-2h) F for lambda = 2, 3 and h = 2, 3 (GUE, quartic)", t0, 600)


def test_10_xy_symmetry(curves, report):
    t0 = time.time()
    ok, a, b = check_xy_symmetry(curves["cubic-quadratic"], 2)
    report(10, ok, f"H_x W_(1,0)^(2) = H_y W_(0,1)^(2) = {a} on cubic-quadratic", t0, 600)


def _gauss_build(fl):
    def build(p):
        return build_curve_from_potentials(Polynomial(fl, [0, 0, 1], "x"),
                                           Polynomial(fl, [0, 0, fl.convert(mpq(1, 2))], "y"), p["T"], 1, fl)
    return build


def _quartic_build(fl):
    def build(p):
        V1 = Polynomial(fl, [0, 0, 1, 0, fl.convert(mpq(1, 40))], "x")
        return build_curve_from_potentials(V1, Polynomial(fl, [0, 0, fl.convert(mpq(1, 2))], "y"),
                                           p["T"], 1, fl)
    return build


def test_11_t_derivative(report):
    t0 = time.time()
    fl = FloatField(256)
    orders = []
    for build in (_gauss_build(fl), _quartic_build(fl)):
        for h in (1, 2):
            orders.append(float(check_t_derivative(build, {"T": 1}, h)["order"]))
    ok = all(abs(o - 2) < 0.1 for o in orders)
    report(11, ok, f"central-difference orders {[round(o, 3) for o in orders]}", t0, 300)


def test_12_truncation_stability(report):
    t0 = time.time()
    summary = run_corpus(CORPUS, scale=2)
    bad = [s["job"] for s in summary if s["status"] != "pass"]
    report(12, summary and not bad, f"{len(summary)} corpus jobs at doubled orders equal goldens; off: {bad}",
           t0, 900)
