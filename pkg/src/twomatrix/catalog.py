"""Named test curves used by the tests, the corpus and the CLI."""
from __future__ import annotations

from gmpy2 import mpq

from .curve import build_curve_from_potentials, curve_from_laurent
from .polynomial import Polynomial
from .scalars import CouplingSeriesRing, ExactField


def gue(field=None):
    """x = z + 1/z, y = z: the one-matrix Gaussian curve (no two-matrix potentials)."""
    field = field or ExactField()
    return curve_from_laurent(field, [1, 0, 1], -1, [0, 1], 0, name="gue")


def gue_reduction(field=None):
    """x = z + 1/z, y = 2z + 1/z: V1 = x^2, V2 = y^2/2, T = 1.

    Integrating out M2 gives the GUE with unit variance.
    """
    field = field or ExactField()
    return curve_from_laurent(field, [1, 0, 1], -1, [1, 0, 2], -1, name="gue-reduction")


def gaussian_2mm(t2=2, tt2=6, kappa=2, T=3, field=None):
    """Gaussian two-matrix model; the defaults give x = 3/z + 3z/4 with
    branch points +-2 (most other choices need the float backend)."""
    field = field or ExactField()
    V1 = Polynomial(field, [0, 0, mpq(t2) / 2], "x")
    V2 = Polynomial(field, [0, 0, mpq(tt2) / 2], "y")
    return build_curve_from_potentials(V1, V2, T, kappa, field, name="gaussian-2mm")


def cubic_quadratic(field=None):
    """Asymmetric curve with V1 cubic, V2 quadratic, T = 1.

    x = g (z + 1/z), y = 1/z + 7z/36 - z^2/72 with g = -36/29; branch points
    of x are +-1, those of y are 3, 6, -2.
    """
    field = field or ExactField()
    g = mpq(-36, 29)
    return curve_from_laurent(field, [g, 0, g], -1,
                              [1, 0, mpq(7, 36), mpq(-1, 72)], -1, name="cubic-quadratic")


def d2_two(field=None):
    """x = -3z - 21/z + 9/z^2 (branch points 1, 2, -3), y = 1/z + 2z/21, T = 1."""
    field = field or ExactField()
    return curve_from_laurent(field, [9, -21, 0, -3], -2, [1, 0, mpq(2, 21)], -1, name="d2-two")


def quartic(t4=4, field=None):
    """V1 = x^2 + t4 x^4/4, V2 = y^2/2, T = 1 (integrating out M2 gives the
    one-matrix model with V = x^2/2 + t4 x^4/4).

    The curve is x = g z + 1/z with t4 = (1 - g)/(3 g^2); t4 = 4 gives g = 1/4
    and rational branch points +-2.
    """
    field = field or ExactField()
    V1 = Polynomial(field, [0, 0, 1, 0, field.convert(t4) / 4], "x")
    V2 = Polynomial(field, [0, 0, mpq(1, 2)], "y")
    return build_curve_from_potentials(V1, V2, 1, 1, field, name="quartic")


def quartic_series(order=2):
    """Quartic family with t4 a formal parameter, t4^order = 0."""
    ring = CouplingSeriesRing(order)
    return quartic(ring.gen(), ring)


def cubic_2mm_series(order=2, t3=1, tt3=0, t2=2, tt2=3, kappa=1, T=1):
    """Gaussian 2MM perturbed by eps (t3 x^3/3 + tt3 y^3/3), eps^order = 0."""
    ring = CouplingSeriesRing(order)
    eps = ring.gen()
    V1 = Polynomial(ring, [0, 0, mpq(t2) / 2, eps * mpq(t3) / 3], "x")
    V2 = Polynomial(ring, [0, 0, mpq(tt2) / 2, eps * mpq(tt3) / 3], "y")
    return build_curve_from_potentials(V1, V2, T, kappa, ring, name="cubic-2mm")


NAMED = {
    "gue": gue,
    "gue-reduction": gue_reduction,
    "gaussian-2mm": gaussian_2mm,
    "cubic-quadratic": cubic_quadratic,
    "d2-two": d2_two,
    "quartic": quartic,
}
