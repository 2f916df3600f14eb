"""Residue recursion for the correlators W_{k,0}^{(h)}.

Stable correlators are stored in the pole basis

    xi_{alpha,d}(z) = dz / (z - a_alpha)**d,   d >= 2,

one factor per variable: a correlator in k variables is a dict mapping
``((alpha_1, d_1), ..., (alpha_k, d_k))`` to its coefficient.  This basis
spans exactly the differentials with poles only at the branch points and
vanishing residues there, which is where every stable W lives, so the
representation is exact and needs no interpolation.

The recursion can also run with some variables instantiated at numeric
points (``RecursionEngine.w(h, n_sym, pts)``).  Evaluating a correlator at
points then only needs the tensors of lower correlators in one variable,
which keeps high-k evaluations cheap.
"""
from __future__ import annotations

import itertools
from collections import defaultdict

from .errors import TruncationExceeded, TruncationInsufficient
from .series import LaurentSeries

def drop_constant(ser):
    """The series minus its constant term, rebased to valuation 1.

    Used for expansions that vanish at the branch point by construction, so
    that float round-off in the constant term cannot leak into a division.
    """
    f = ser.field
    if ser.val >= 1:
        return ser
    return LaurentSeries(f, 1, ser.coeffs[1 - ser.val:])


def lincomb(field, terms, order):
    """``sum c * series`` truncated at ``s**order``."""
    terms = [(c, s) for c, s in terms]
    if not terms:
        return LaurentSeries.zero(field, order)
    val = min(s.val for _, s in terms)
    top = min([order] + [s.order for _, s in terms])
    if top < val:
        return LaurentSeries.zero(field, top)
    out = [field.zero] * (top - val + 1)
    for c, s in terms:
        off = s.val - val
        for i, v in enumerate(s.coeffs):
            j = off + i
            if j >= len(out):
                break
            if v != 0:
                out[j] = out[j] + c * v
    return LaurentSeries(field, val, out)


def residue_of_product(k, f):
    """Coefficient of 1/s in ``k * f`` (raises if a needed coefficient is unknown)."""
    field = k.field
    acc = field.zero
    for j in range(k.val, -f.val):
        kj = k.coeff(j)
        if kj == 0:
            continue
        fj = f.coeff(-1 - j)
        if fj == 0:
            continue
        acc = acc + kj * fj
    return acc


class Local:
    """Series data at one branch point, all truncated at ``s**N``."""

    def __init__(self, curve, alpha, N):
        self.curve = curve
        self.field = f = curve.field
        self.alpha = alpha
        self.N = N
        self.a = a = curve.branch_points[alpha]
        L = 2 * N + 6
        self.L = L
        sig = curve.chart(alpha, L).sigma
        self.sigma = sig
        self.sp = sig.derivative()
        self.s = LaurentSeries.variable(f, L)
        self.y_loc = curve.y.series_at(a, L)
        self.y_sig = self.y_loc.compose(sig)
        self.dy = drop_constant(self.y_loc - self.y_sig)
        self.xp = drop_constant(curve.dx.series_at(a, L))
        self.D = (self.dy * self.xp).inverse(2)
        self.inv_sigma = sig.inverse(1)
        self.half = f.one / 2
        self._sig_pow = [LaurentSeries(f, 0, [f.one] + [f.zero] * L)]
        self._kern = {}
        self._xi_s = {}
        self._xi_sig = {}
        self._base_s = {}
        self._base_sig = {}
        self._inv_sig_pow = {0: LaurentSeries(f, 0, [f.one] + [f.zero] * L)}
        self._bsym = {}
        self._bnum = {}
        self._knum = {}
        self._bpp = None

    # powers ---------------------------------------------------------------
    def sigma_pow(self, k):
        while len(self._sig_pow) <= k:
            self._sig_pow.append(self._sig_pow[-1].mul(self.sigma, self.L))
        return self._sig_pow[k]

    def inv_sigma_pow(self, d):
        if d not in self._inv_sig_pow:
            prev = self.inv_sigma_pow(d - 1)
            self._inv_sig_pow[d] = prev.mul(self.inv_sigma, self.L)
        return self._inv_sig_pow[d]

    # kernel ---------------------------------------------------------------
    def kernel(self, d):
        """k_d(s) with K(z; a+s) = sum_d xi_{a,d}(z) k_d(s) / ds."""
        k = self._kern.get(d)
        if k is None:
            f = self.field
            sp = LaurentSeries.monomial(f, f.one, d - 1, self.L)
            num = sp - self.sigma_pow(d - 1)
            k = (num.mul(self.D, self.N) * (-self.half)).truncate(self.N)
            self._kern[d] = k
        return k

    def kernel_numeric(self, z0):
        """Series of K(z0; a+s) / (dz0 ds) for a numeric point z0."""
        k = self._knum.get(z0)
        if k is None:
            g = self._base_series(z0 - self.a, self.L)
            gs = g.compose(self.sigma)
            # dE = (1/(z0 - q) - 1/(z0 - qbar)) dz0 with 1/(z0 - a - s) = g
            k = ((g - gs).mul(self.D, self.N) * (-self.half)).truncate(self.N)
            self._knum[z0] = k
        return k

    def _base_series(self, c, order):
        """1/(c - s) = sum s^j / c^(j+1)."""
        f = self.field
        inv = f.one / c
        coeffs = []
        p = inv
        for _ in range(order + 1):
            coeffs.append(p)
            p = p * inv
        return LaurentSeries(f, 0, coeffs)

    # pole basis at s and at sigma(s) -----------------------------------------
    def xi_s(self, idx):
        ser = self._xi_s.get(idx)
        if ser is None:
            b, d = idx
            f = self.field
            if b == self.alpha:
                ser = LaurentSeries(f, -d, [f.one] + [f.zero] * (self.N + d))
            else:
                base = self._base_s.get(b)
                if base is None:
                    # 1/(a + s - a_b) = -1/(c - s) with c = a_b - a
                    base = -self._base_series(self.curve.branch_points[b] - self.a, self.L)
                    self._base_s[b] = base
                ser = _power(base, d, self.L).truncate(self.N)
            self._xi_s[idx] = ser
        return ser

    def xi_sig(self, idx):
        ser = self._xi_sig.get(idx)
        if ser is None:
            b, d = idx
            if b == self.alpha:
                ser = self.inv_sigma_pow(d).mul(self.sp, self.N)
            else:
                base = self._base_sig.get(b)
                if base is None:
                    self.xi_s((b, 2))
                    base = self._base_s[b].compose(self.sigma)
                    self._base_sig[b] = base
                ser = _power(base, d, self.L).mul(self.sp, self.N)
            self._xi_sig[idx] = ser
        return ser

    # Bergman kernel pieces -----------------------------------------------------
    def b_conj(self):
        """B(a+s, a+sigma(s)) / ds^2."""
        if self._bpp is None:
            diff = drop_constant(self.s - self.sigma)
            inv = diff.inverse(1)
            self._bpp = (inv * inv).mul(self.sp, self.N)
        return self._bpp

    def b_symbolic(self, at):
        """B(p, z) with z symbolic, p = a+s or a+sigma(s): {((alpha, j+2),): (j+1) p_loc^j dp}."""
        out = self._bsym.get(at)
        if out is None:
            f = self.field
            out = {}
            for j in range(self.N + 1):
                if at == "s":
                    ser = LaurentSeries.monomial(f, f.convert(j + 1), j, self.N)
                else:
                    ser = self.sigma_pow(j).mul(self.sp, self.N) * (j + 1)
                out[((self.alpha, j + 2),)] = ser
            self._bsym[at] = out
        return out

    def b_numeric(self, z, at):
        key = (z, at)
        ser = self._bnum.get(key)
        if ser is None:
            g = self._base_series(z - self.a, self.L)
            g2 = g * g  # 1/(z - a - s)^2
            if at == "s":
                ser = g2.truncate(self.N)
            else:
                ser = g2.compose(self.sigma).mul(self.sp, self.N)
            self._bnum[key] = ser
        return ser


def _power(base, d, order):
    out = base
    for _ in range(d - 1):
        out = out.mul(base, order)
    return out


def _pt_key(field, pts):
    """Canonical ordering of numeric points (correlators are symmetric)."""
    return tuple(sorted(pts, key=lambda p: _point_order(p)))


def _point_order(p):
    if hasattr(p, "imag") and not isinstance(p, (int,)):
        try:
            return (float(p.real), float(p.imag))
        except TypeError:
            pass
    if hasattr(p, "c"):
        return tuple(p.c)
    return (p,)


def is_stable(h, n):
    return 2 * h - 2 + n > 0 and not (h == 0 and n <= 2)


class RecursionEngine:
    """Memoized recursion on one curve.

    ``guard`` extra series terms are kept beyond the a-priori pole-order
    bound; ``scale`` multiplies every truncation order (used to check that
    doubling the orders changes nothing).
    """

    def __init__(self, curve, guard=4, scale=1, max_order=2000):
        self.curve = curve
        self.field = curve.field
        self.guard = guard
        self.scale = scale
        self.max_order = max_order
        self._memo = {}
        self._local = {}
        self._fac = {}
        self.stats = defaultdict(int)

    @property
    def nb(self):
        return len(self.curve.branch_points)

    def order_for(self, h, n):
        P = max(12 * h + 4 * n - 16, 6 * h + 2 * n - 6, 2) + 2
        return self.scale * (P + self.guard)

    def local(self, alpha, N):
        key = (alpha, N)
        loc = self._local.get(key)
        if loc is None:
            loc = Local(self.curve, alpha, N)
            self._local[key] = loc
        return loc

    # public ------------------------------------------------------------------
    def w(self, h, n_sym, pts=()):
        """Tensor of W_{n_sym+len(pts)}^{(h)} in its first n_sym variables, the rest at ``pts``."""
        n = n_sym + len(pts)
        if not is_stable(h, n):
            raise ValueError(f"W_{n}^({h}) is not a stable correlator")
        pts = _pt_key(self.field, pts)
        key = (h, n_sym, pts)
        res = self._memo.get(key)
        if res is not None:
            return res
        N = self.order_for(h, n)
        while True:
            try:
                res = self._compute(h, n_sym, pts, N)
                break
            except TruncationInsufficient:
                N *= 2
                self.stats["escalations"] += 1
                if N > self.max_order:
                    raise TruncationExceeded(f"W_{n}^({h}) needs series beyond order {self.max_order}")
        self._memo[key] = res
        self.stats["computed"] += 1
        return res

    def evaluate(self, h, pts):
        """Value of W_n^{(h)}(z_1..z_n) / (dz_1...dz_n) at numeric points."""
        pts = tuple(self.field.convert(p) for p in pts)
        n = len(pts)
        if h == 0 and n == 1:
            z = pts[0]
            return self.curve.y(z) * self.curve.dx(z)
        if h == 0 and n == 2:
            d = pts[0] - pts[1]
            return self.field.one / (d * d)
        return self.w(h, 0, pts).get((), self.field.zero)

    # core ----------------------------------------------------------------------
    def _compute(self, h, n_sym, pts, N):
        out_sym = n_sym >= 1
        if out_sym:
            S, P, z0 = n_sym - 1, pts, None
        else:
            S, P, z0 = 0, pts[1:], pts[0]
        result = {}
        for alpha in range(self.nb):
            loc = self.local(alpha, N)
            br = self._bracket(h, S, P, loc)
            if out_sym:
                for I, ser in br.items():
                    if not ser.coeffs:
                        continue
                    for d in range(2, 3 - ser.val):
                        r = residue_of_product(loc.kernel(d), ser)
                        if r != 0:
                            key = ((alpha, d),) + I
                            result[key] = result[key] + r if key in result else r
            else:
                K = loc.kernel_numeric(z0)
                for I, ser in br.items():
                    r = residue_of_product(K, ser)
                    result[I] = result[I] + r if I in result else r
        return {k: v for k, v in result.items() if not (v == 0)}

    def _bracket(self, h, S, P, loc):
        """Quadratic differential in the chart coordinate, as {I: series / ds^2}."""
        f = self.field
        acc = defaultdict(list)  # I -> list of series
        n_rest = S + len(P)
        if h >= 1:
            if h == 1 and n_rest == 0:
                acc[()].append(loc.b_conj())
            else:
                T = self.w(h - 1, 2 + S, P)
                grouped = defaultdict(lambda: defaultdict(list))
                for key, c in T.items():
                    grouped[key[2:]][key[0]].append((c, loc.xi_sig(key[1])))
                for I, by_first in grouped.items():
                    for i1, terms in by_first.items():
                        g = lincomb(f, terms, loc.N)
                        acc[I].append(loc.xi_s(i1).mul(g, 0))
        nP = len(P)
        for mS in range(1 << S):
            JS = [i for i in range(S) if mS >> i & 1]
            for mP in range(1 << nP):
                JP = tuple(P[i] for i in range(nP) if mP >> i & 1)
                RP = tuple(P[i] for i in range(nP) if not mP >> i & 1)
                nl = len(JS) + len(JP)
                nr = n_rest - nl
                for m in range(h + 1):
                    if m == 0 and nl == 0:
                        continue
                    if m == h and nr == 0:
                        continue
                    left = self._factor(loc, m, len(JS), JP, "s")
                    right = self._factor(loc, h - m, S - len(JS), RP, "sig")
                    if not left or not right:
                        continue
                    for I1, s1 in left.items():
                        for I2, s2 in right.items():
                            I = _merge(I1, I2, mS, S)
                            acc[I].append(s1.mul(s2, 0))
        out = {}
        for I, lst in acc.items():
            out[I] = lincomb(f, [(f.one, s) for s in lst], 0)
        return out

    def _factor(self, loc, m, ns, JP, at):
        """W^{(m)}(p, J) with p = a+s (at='s') or a+sigma(s) (at='sig'), as {I: series}."""
        JP = _pt_key(self.field, JP)
        key = (loc.alpha, loc.N, m, ns, JP, at)
        res = self._fac.get(key)
        if res is not None:
            return res
        f = self.field
        if m == 0 and ns + len(JP) == 1:
            if ns == 1:
                res = loc.b_symbolic(at)
            else:
                res = {(): loc.b_numeric(JP[0], at)}
        else:
            T = self.w(m, 1 + ns, JP)
            grouped = defaultdict(list)
            xi = loc.xi_s if at == "s" else loc.xi_sig
            for k, c in T.items():
                grouped[k[1:]].append((c, xi(k[0])))
            res = {I: lincomb(f, terms, loc.N) for I, terms in grouped.items()}
        self._fac[key] = res
        return res

    # correlator objects ------------------------------------------------------------
    def compute_w(self, h, k):
        """W_{k,0}^{(h)} as a :class:`Correlator` (all variables symbolic)."""
        if h == 0 and k == 1:
            raise ValueError("W_{1,0}^(0) = y dx is read off the curve")
        if h == 0 and k == 2:
            return bergmann_kernel(self.curve)
        return Correlator(h, k, 0, self.w(h, k), self.curve)


def _merge(I1, I2, mask, S):
    if not I1:
        return I2
    if not I2:
        return I1
    out = []
    i1 = i2 = 0
    for pos in range(S):
        if mask >> pos & 1:
            out.append(I1[i1])
            i1 += 1
        else:
            out.append(I2[i2])
            i2 += 1
    return tuple(out)


class Correlator:
    """A correlator in the pole basis (or the Bergman kernel for (h, k) = (0, 2))."""

    def __init__(self, h, k, l, data, curve, kind="poles"):
        self.h, self.k, self.l = h, k, l
        self.data = data
        self.curve = curve
        self.kind = kind

    @property
    def field(self):
        return self.curve.field

    def evaluate(self, *zs):
        """Coefficient of dz_1 ... dz_k at numeric points."""
        f = self.field
        zs = [f.convert(z) for z in zs]
        if self.kind == "bergmann":
            d = zs[0] - zs[1]
            return self.data_sign * f.one / (d * d)
        bps = self.curve.branch_points
        cache = {}
        total = f.zero
        for key, c in self.data.items():
            term = c
            for i, (b, d) in enumerate(key):
                v = cache.get((i, b, d))
                if v is None:
                    v = f.one / (zs[i] - bps[b]) ** d
                    cache[(i, b, d)] = v
                term = term * v
            total = total + term
        return total

    data_sign = 1

    def max_pole_order(self):
        return max((d for key in self.data for (_, d) in key), default=0)

    def is_symmetric(self):
        f = self.field
        for key, c in self.data.items():
            for perm in itertools.permutations(range(len(key))):
                pk = tuple(key[i] for i in perm)
                if not f.eq(self.data.get(pk, f.zero), c):
                    return False
        return True

    def equals(self, other):
        if self.kind != other.kind:
            return False
        f = self.field
        keys = set(self.data) | set(other.data)
        return all(f.eq(self.data.get(k, f.zero), other.data.get(k, f.zero)) for k in keys)

    def partial_fractions(self):
        """Per-variable tables: for each variable, {branch index: [pole orders present]}."""
        tables = []
        for i in range(self.k):
            t = defaultdict(set)
            for key in self.data:
                b, d = key[i]
                t[b].add(d)
            tables.append({b: sorted(ds) for b, ds in sorted(t.items())})
        return tables

    def __repr__(self):
        return f"Correlator(h={self.h}, k={self.k}, l={self.l}, terms={len(self.data)})"


def bergmann_kernel(curve):
    """B(z1, z2) = dz1 dz2 / (z1 - z2)^2."""
    return Correlator(0, 2, 0, None, curve, kind="bergmann")


def dE_differential(curve, alpha, order, p):
    """Series in s of dE_{q, qbar}(p) / dp at a numeric point p, q = a + s."""
    loc = Local(curve, alpha, order)
    g = loc._base_series(p - loc.a, loc.L)  # 1/(p - a - s)
    return (g - g.compose(loc.sigma)).truncate(order)


def recursion_kernel(curve, alpha, order, p):
    """Series in s of K(p; a+s) / (dp ds) for a numeric point p."""
    return Local(curve, alpha, order).kernel_numeric(curve.field.convert(p))


def w3_closed_form(curve):
    """W_3^(0) = sum_alpha Res B B B / (dx dy) as a pole-basis tensor.

    At a simple branch point the residue only picks the simple zero of dx, so
    the term is xi_{a,2}^{x3} / (x''(a) y'(a)).
    """
    f = curve.field
    d2x = curve.dx.derivative()
    data = {}
    for alpha, a in enumerate(curve.branch_points):
        c = f.one / (d2x(a) * curve.dy(a))
        data[((alpha, 2),) * 3] = c
    return Correlator(0, 3, 0, data, curve)


def w3_closed_form_value(curve, z1, z2, z3):
    f = curve.field
    z = [f.convert(v) for v in (z1, z2, z3)]
    for v in z:
        for a in curve.branch_points:
            if f.is_zero(v - a):
                raise ValueError("evaluation point at a branch point")
    return w3_closed_form(curve).evaluate(*z)
