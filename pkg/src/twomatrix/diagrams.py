"""Diagrammatic expansion of the recursion.

A diagram of W_{k+1}^(h)(p0, p1..pk) is a rooted binary tree of residue
vertices.  Each vertex has two upper legs sitting at q (plain) and at the
conjugate point qbar (dotted).  A vertex is either

* ``("S", left, right)``: the legs carry two independent subdiagrams
  (left at q, right at qbar), or
* ``("L", level, sub)``: both legs belong to one subdiagram whose root is q,
  qbar becoming the extra leg ``m<level>`` of that subdiagram,

and a leaf ``("B", target)`` is a Bergmann propagator from the leg to an
external point ``p<i>`` or to the dotted point ``m<level>`` of an ancestor.

Unrolling the recursion produces every marking separately.  The kernel is
symmetric under q <-> qbar, so the two markings of a split vertex have equal
value; diagrams are therefore stored once in canonical form together with
the number of markings they stand for.
"""
from __future__ import annotations

from collections import Counter, defaultdict

from .errors import TruncationExceeded, TruncationInsufficient
from .recursion import RecursionEngine, lincomb, residue_of_product


# ---------------------------------------------------------------------------
# enumeration

def _label_key(label):
    return (0 if label[0] == "p" else 1, int(label[1:]))


def _unrolled(h, legs, level):
    """All recursion terms of W^(h)(root, legs) as canonical trees (with repetition)."""
    if h == 0 and len(legs) == 1:
        yield ("B", legs[0])
        return
    if h >= 1:
        mark = f"m{level}"
        for sub in _unrolled(h - 1, legs + (mark,), level + 1):
            yield ("L", level, sub)
    n = len(legs)
    for mask in range(1 << n):
        I = tuple(legs[i] for i in range(n) if mask >> i & 1)
        J = tuple(legs[i] for i in range(n) if not mask >> i & 1)
        for m in range(h + 1):
            if (m == 0 and not I) or (m == h and not J):
                continue
            lefts = list(_unrolled(m, I, level))
            rights = list(_unrolled(h - m, J, level))
            for a in lefts:
                for b in rights:
                    yield _canonical_split(a, b)


def _canonical_split(a, b):
    sa, sb = to_string(a), to_string(b)
    return ("S", a, b) if sa <= sb else ("S", b, a)


def to_string(d):
    """Canonical bracket string."""
    kind = d[0]
    if kind == "B":
        return f"B[{d[1]}]"
    if kind == "L":
        return f"L{d[1]}({to_string(d[2])})"
    return f"S({to_string(d[1])},{to_string(d[2])})"


class Diagram:
    def __init__(self, h, k, tree, multiplicity):
        self.h = h
        self.k = k
        self.tree = tree
        self.multiplicity = multiplicity
        self.string = to_string(tree)

    @property
    def n_vertices(self):
        return _count(self.tree, ("S", "L"))

    @property
    def n_propagators(self):
        return _count(self.tree, ("B",))

    @property
    def n_internal_propagators(self):
        return sum(1 for t in _leaves(self.tree) if t.startswith("m"))

    def edges(self):
        """All edges as (kind, path): 'arrow' edges enter a vertex, 'B' edges end at a leaf.

        ``path`` is the sequence of child positions from the root (0 = q, 1 = qbar).
        """
        out = [("arrow", ())]
        _edges(self.tree, (), out)
        return out

    def __repr__(self):
        return f"Diagram(h={self.h}, k={self.k}, {self.string}, x{self.multiplicity})"


def _count(d, kinds):
    c = 1 if d[0] in kinds else 0
    if d[0] == "L":
        c += _count(d[2], kinds)
    elif d[0] == "S":
        c += _count(d[1], kinds) + _count(d[2], kinds)
    return c


def _leaves(d):
    if d[0] == "B":
        yield d[1]
    elif d[0] == "L":
        yield from _leaves(d[2])
    else:
        yield from _leaves(d[1])
        yield from _leaves(d[2])


def _edges(d, path, out):
    if d[0] == "L":
        child = d[2]
        out.append(("B" if child[0] == "B" else "arrow", path + (0,)))
        if child[0] != "B":
            _edges(child, path + (0,), out)
    elif d[0] == "S":
        for pos in (0, 1):
            child = d[1 + pos]
            out.append(("B" if child[0] == "B" else "arrow", path + (pos,)))
            if child[0] != "B":
                _edges(child, path + (pos,), out)


def enumerate_diagrams(h, k):
    """Inequivalent diagrams of W_{k+1}^(h), canonical order, with marking multiplicities."""
    if 2 * h + k - 1 < 1:
        raise ValueError("need 2h + k - 1 >= 1")
    legs = tuple(f"p{i}" for i in range(1, k + 1))
    counts = Counter()
    trees = {}
    for t in _unrolled(h, legs, 0):
        s = to_string(t)
        counts[s] += 1
        trees[s] = t
    return [Diagram(h, k, trees[s], counts[s]) for s in sorted(counts)]


def count_unrolled_terms(h, k):
    """Number of terms produced by fully unrolling the recursion for W_{k+1}^(h)."""
    legs = tuple(f"p{i}" for i in range(1, k + 1))
    return sum(1 for _ in _unrolled(h, legs, 0))


# ---------------------------------------------------------------------------
# evaluation

def free_legs(d):
    if d[0] == "B":
        return {d[1]}
    if d[0] == "L":
        return free_legs(d[2]) - {f"m{d[1]}"}
    return free_legs(d[1]) | free_legs(d[2])


def _bound_levels(d):
    if d[0] == "B":
        return set()
    if d[0] == "L":
        return {d[1]} | _bound_levels(d[2])
    return _bound_levels(d[1]) | _bound_levels(d[2])


def _cache_key(d):
    """String of a subtree up to renaming: free legs by slot rank, bound marks by relative level."""
    ren = {lab: f"f{i}" for i, lab in enumerate(_order_legs(free_legs(d)))}
    levels = _bound_levels(d)
    base = min(levels) if levels else 0
    for lv in levels:
        ren[f"m{lv}"] = f"b{lv - base}"

    def walk(t):
        if t[0] == "B":
            return f"B[{ren[t[1]]}]"
        if t[0] == "L":
            return f"L{t[1] - base}({walk(t[2])})"
        return f"S({walk(t[1])},{walk(t[2])})"
    return walk(d)


def _order_legs(legs):
    return sorted(legs, key=_label_key)


def genus_and_points(d):
    """(h, n) of the correlator a subtree represents (n counts the root)."""
    if d[0] == "B":
        return 0, 2
    if d[0] == "L":
        h, n = genus_and_points(d[2])
        return h + 1, n - 1
    h1, n1 = genus_and_points(d[1])
    h2, n2 = genus_and_points(d[2])
    return h1 + h2, n1 + n2 - 1


class DiagramEvaluator:
    """Leaves-to-root evaluation of diagrams as pole tensors, with subtree caching."""

    def __init__(self, curve, engine=None):
        self.curve = curve
        self.field = curve.field
        # the engine is used only for its truncation policy and local charts
        self.engine = engine or RecursionEngine(curve)
        self._cache = {}

    def tensor(self, d):
        """Pole tensor of a vertex subtree over slots [root] + ordered free legs."""
        s = _cache_key(d)
        res = self._cache.get(s)
        if res is not None:
            return res
        h, n = genus_and_points(d)
        N = self.engine.order_for(h, n)
        while True:
            try:
                res = self._vertex(d, N)
                break
            except TruncationInsufficient:
                N *= 2
                if N > self.engine.max_order:
                    raise TruncationExceeded(f"diagram {s} needs series beyond {self.engine.max_order}")
        self._cache[s] = res
        return res

    def _child(self, loc, d, at, legs):
        """{I: series} for a child sitting at q (at='s') or qbar (at='sig'); I indexes ``legs``."""
        if d[0] == "B":
            return {k: v for k, v in loc.b_symbolic(at).items()}
        T = self.tensor(d)
        grouped = defaultdict(list)
        xi = loc.xi_s if at == "s" else loc.xi_sig
        for key, c in T.items():
            grouped[key[1:]].append((c, xi(key[0])))
        return {I: lincomb(self.field, terms, loc.N) for I, terms in grouped.items()}

    def _vertex(self, d, N):
        f = self.field
        out_legs = _order_legs(free_legs(d))
        result = {}
        for alpha in range(len(self.curve.branch_points)):
            loc = self.engine.local(alpha, N)
            br = defaultdict(list)
            if d[0] == "L":
                level, sub = d[1], d[2]
                mark = f"m{level}"
                if sub[0] == "B":
                    br[()].append(loc.b_conj())
                else:
                    sub_legs = _order_legs(free_legs(sub))
                    im = sub_legs.index(mark)
                    T = self.tensor(sub)
                    grouped = defaultdict(lambda: defaultdict(list))
                    for key, c in T.items():
                        rest = key[1:]
                        I = rest[:im] + rest[im + 1:]
                        grouped[I][key[0]].append((c, loc.xi_sig(rest[im])))
                    for I, by_root in grouped.items():
                        for r, terms in by_root.items():
                            br[I].append(loc.xi_s(r).mul(lincomb(f, terms, loc.N), 0))
            else:
                a, b = d[1], d[2]
                la, lb = _order_legs(free_legs(a)), _order_legs(free_legs(b))
                pos = {lab: i for i, lab in enumerate(out_legs)}
                A = self._child(loc, a, "s", la)
                Bc = self._child(loc, b, "sig", lb)
                for I1, s1 in A.items():
                    for I2, s2 in Bc.items():
                        slots = [None] * len(out_legs)
                        for lab, idx in zip(la, I1):
                            slots[pos[lab]] = idx
                        for lab, idx in zip(lb, I2):
                            slots[pos[lab]] = idx
                        br[tuple(slots)].append(s1.mul(s2, 0))
            for I, lst in br.items():
                ser = lst[0] if len(lst) == 1 else lincomb(f, [(f.one, x) for x in lst], 0)
                if not ser.coeffs:
                    continue
                for dd in range(2, 3 - ser.val):
                    r = residue_of_product(loc.kernel(dd), ser)
                    if r != 0:
                        key = ((alpha, dd),) + I
                        result[key] = result[key] + r if key in result else r
        return {k: v for k, v in result.items() if not (v == 0)}

    def evaluate(self, diagram, points=None):
        """Tensor of one diagram (times its multiplicity), or its value at external points."""
        T = {k: v * diagram.multiplicity for k, v in self.tensor(diagram.tree).items()}
        if points is None:
            return T
        return _evaluate_tensor(self.curve, T, points)

    def sum(self, h, k):
        total = defaultdict(lambda: self.field.zero)
        for dg in enumerate_diagrams(h, k):
            for key, v in self.evaluate(dg).items():
                total[key] = total[key] + v
        return {k_: v for k_, v in total.items() if not (v == 0)}


def _evaluate_tensor(curve, T, points):
    f = curve.field
    zs = [f.convert(z) for z in points]
    bps = curve.branch_points
    total = f.zero
    for key, c in T.items():
        term = c
        for z, (b, d) in zip(zs, key):
            term = term / (z - bps[b]) ** d
        total = total + term
    return total


def evaluate_diagram(curve, diagram, points=None, evaluator=None):
    ev = evaluator or DiagramEvaluator(curve)
    return ev.evaluate(diagram, points)


# ---------------------------------------------------------------------------
# cutting

def cut_propagator(diagram, edge):
    """Descriptor of the diagram with one edge cut open at a new point q.

    ``edge`` is one of ``diagram.edges()``.  Cutting a B edge (u, v) inserts
    B(u, q) B(q, v) / (dx dy)(q); cutting an arrow entering a vertex inserts
    B(parent leg, q) and lets q play the role of the vertex's root, with the
    same 1/(dx dy)(q) weight.
    """
    kind, path = edge
    if edge not in diagram.edges():
        raise ValueError(f"{edge} is not an edge of {diagram}")
    return {"diagram": diagram.string, "edge": kind, "path": list(path),
            "weight": "1/(dx(q) dy(q))"}
