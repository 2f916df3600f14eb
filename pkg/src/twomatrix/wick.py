"""Brute-force Wick oracle for formal Gaussian-plus-perturbation matrix integrals.

The measure is exp(-(1/hbar) tr[t2 M1^2/2 + tt2 M2^2/2 - kappa M1 M2 + sum c M_a^k/k]).
Propagator: <(M_a)_ij (M_b)_kl> = hbar Qinv_ab delta_il delta_jk with
Q = [[t2, -kappa], [-kappa, tt2]]; a perturbation vertex carries -c/(k hbar).
Every perfect matching of half-edges is a ribbon graph; its index loops are
the cycles of sigma o alpha (sigma: cyclic order inside each trace, alpha:
the matching).  With T = hbar N a connected graph with n observables
contributes hbar^(n - 2 + 2g) T^F.
"""
from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction

import mpmath
from gmpy2 import mpq

MAX_HALF_EDGES = 16


class TruncationError(ValueError):
    pass


class WickModel:
    def __init__(self, t2=1, tt2=None, kappa=0, couplings=()):
        """``couplings``: list of (matrix index 1|2, power k, coefficient c).

        With ``tt2=None`` the model is the one-matrix model in M1.
        """
        self.t2 = mpq(t2)
        self.one_matrix = tt2 is None
        self.tt2 = mpq(tt2) if tt2 is not None else None
        self.kappa = mpq(kappa)
        self.couplings = [(int(a), int(k), mpq(c)) for a, k, c in couplings]
        if self.one_matrix:
            self.qinv = {(1, 1): 1 / self.t2}
        else:
            det = self.t2 * self.tt2 - self.kappa ** 2
            if det == 0:
                raise ValueError("degenerate quadratic form")
            self.qinv = {(1, 1): self.tt2 / det, (2, 2): self.t2 / det,
                         (1, 2): self.kappa / det, (2, 1): self.kappa / det}

    def propagator(self, a, b):
        return self.qinv.get((a, b), mpq(0))


def _faces(sigma, alpha):
    n = len(sigma)
    seen = [False] * n
    F = 0
    for i in range(n):
        if not seen[i]:
            F += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = sigma[alpha[j]]
    return F


def _connected(owner, alpha, nv):
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for i, j in enumerate(alpha):
        a, b = find(owner[i]), find(owner[j])
        if a != b:
            parent[a] = b
    return len({find(v) for v in range(nv)}) == 1


def _matchings(labels, model):
    """Yield (alpha, weight) over perfect matchings with nonzero propagators."""
    n = len(labels)
    alpha = [-1] * n

    def rec(weight):
        try:
            i = alpha.index(-1)
        except ValueError:
            yield list(alpha), weight
            return
        for j in range(i + 1, n):
            if alpha[j] != -1:
                continue
            w = model.propagator(labels[i], labels[j])
            if w == 0:
                continue
            alpha[i], alpha[j] = j, i
            yield from rec(weight * w)
            alpha[i] = alpha[j] = -1
    yield from rec(mpq(1))


def _graph_sum(model, traces, n_obs):
    """sum over connected ribbon graphs: {(genus, F): coefficient of hbar^(E - V_p) N^F}."""
    labels, sigma, owner = [], [], []
    for v, word in enumerate(traces):
        start = len(labels)
        m = len(word)
        for i, a in enumerate(word):
            labels.append(a)
            sigma.append(start + (i + 1) % m)
            owner.append(v)
    n = len(labels)
    if n % 2:
        return {}
    if n > MAX_HALF_EDGES:
        raise TruncationError(f"{n} half-edges exceed the cap of {MAX_HALF_EDGES}")
    V = len(traces)
    E = n // 2
    out = defaultdict(lambda: mpq(0))
    for alpha, w in _matchings(labels, model):
        if not _connected(owner, alpha, V):
            continue
        F = _faces(sigma, alpha)
        chi = V - E + F
        g = (2 - chi) // 2
        out[(g, F)] += w
    return dict(out)


def _vertex_sets(model, order):
    """Perturbation vertex multisets with their weights, for a coupling monomial.

    ``order`` is a tuple with one exponent per coupling.
    """
    traces, weight = [], mpq(1)
    for (a, k, c), n in zip(model.couplings, order):
        traces += [(a,) * k] * n
        weight *= (-c / k) ** n / math.factorial(n)
    return traces, weight


class WickResult:
    """Graph sums keyed by (genus, F); the term is c hbar^(E - V_p) N^F."""

    def __init__(self, n_obs, data):
        self.n_obs = n_obs
        self.data = data

    def genus(self, g, T=1):
        """Coefficient of hbar^(n_obs - 2 + 2g) at temperature T = hbar N."""
        T = mpq(T)
        return sum((c * T ** F for (gg, F), c in self.data.items() if gg == g), mpq(0))

    def polynomial_in_N(self):
        """{(hbar power, N power): c} with hbar^(E - V_p) N^F."""
        out = defaultdict(lambda: mpq(0))
        for (g, F), c in self.data.items():
            out[(self.n_obs - 2 + 2 * g + F, F)] += c
        return dict(out)

    def genera(self):
        return sorted({g for g, _ in self.data})


def wick_moments(model, words, order=None):
    """Connected <prod tr(word)> at a given coupling order (default: Gaussian)."""
    order = order or (0,) * len(model.couplings)
    vtraces, w = _vertex_sets(model, order)
    traces = [tuple(wd) for wd in words] + vtraces
    data = _graph_sum(model, traces, len(words))
    return WickResult(len(words), {k: v * w for k, v in data.items()})


def fatgraph_free_energy(model, order, genus, T=1):
    """Coefficient of hbar^(2g-2) T^F (summed at the given T) in log Z at a coupling order."""
    if not any(order):
        if genus != 0:
            return mpq(0)
        raise ValueError("the Gaussian normalization is not a fat-graph sum; see gaussian_log_z")
    vtraces, w = _vertex_sets(model, order)
    data = _graph_sum(model, vtraces, 0)
    T = mpq(T)
    return sum((c * w * T ** F for (g, F), c in data.items() if g == genus), mpq(0))


def gaussian_log_z(model, N):
    """log of the Gaussian normalization relative to hbar = 1, t = 1: -(N^2/2) log det Q."""
    if model.one_matrix:
        det = model.t2
        return -mpq(N * N, 2) * mpmath.log(mpmath.mpf(det.numerator) / det.denominator)
    det = model.t2 * model.tt2 - model.kappa ** 2
    return -N * N * mpmath.log(mpmath.mpf(det.numerator) / det.denominator) / 2


# ---------------------------------------------------------------------------
# Gaussian one-matrix oracle for F^(2)

def gue_genus_expansion(g, dps=60, Ns=(200, 400, 800, 1600, 3200)):
    """Coefficient of N^(2-2g) in log of the normalized Gaussian partition function.

    Up to terms that are polynomial or logarithmic in N, log Z_N equals
    log G(N + 1) = log prod_{j<N} j! (Barnes G).  Those terms and the lower
    genera are subtracted and the scaled remainder is Richardson-extrapolated
    in 1/N^2, then rounded to a nearby small-denominator fraction.
    """
    if g < 2:
        raise ValueError("only the pure-power terms g >= 2 are extracted")
    with mpmath.workdps(dps):
        def remainder(N):
            N = mpmath.mpf(N)
            logG = mpmath.log(mpmath.barnesg(N + 1))
            smooth = (N ** 2 / 2 * mpmath.log(N) - mpmath.mpf(3) / 4 * N ** 2
                      + N / 2 * mpmath.log(2 * mpmath.pi) - mpmath.log(N) / 12
                      + mpmath.zeta(-1, derivative=1))
            return logG - smooth
        # remove lower genera recursively, then scale
        lower = {}
        for gg in range(2, g):
            lower[gg] = gue_genus_expansion(gg, dps, Ns)
        vals = []
        for N in Ns:
            r = remainder(N)
            for gg, c in lower.items():
                r -= mpmath.mpf(c.numerator) / c.denominator * mpmath.mpf(N) ** (2 - 2 * gg)
            vals.append(r * mpmath.mpf(N) ** (2 * g - 2))
        # Richardson in h = 1/N^2 with ratio 4
        table = [vals]
        for level in range(1, len(Ns)):
            prev = table[-1]
            fac = mpmath.mpf(4) ** level
            table.append([(fac * prev[i + 1] - prev[i]) / (fac - 1) for i in range(len(prev) - 1)])
        est = table[-1][0]
        frac = Fraction(str(mpmath.nstr(est, 40))).limit_denominator(10 ** 8)
        return mpq(frac.numerator, frac.denominator)


def compare_with_engine(quantity, oracle, engine, order=None, genus=None):
    """Oracle report {quantity, order, genus, oracle, engine, equal}."""
    return {"quantity": quantity, "order": order, "genus": genus,
            "oracle": oracle, "engine": engine, "equal": oracle == engine}


def connected_pairing_count(word_lengths):
    """Number of connected perfect matchings among traces of the given lengths (sanity helper)."""
    model = WickModel()
    res = wick_moments(model, [(1,) * n for n in word_lengths])
    return sum(res.data.values())


__all__ = ["WickModel", "wick_moments", "fatgraph_free_energy", "gaussian_log_z",
           "gue_genus_expansion", "compare_with_engine", "TruncationError"]
