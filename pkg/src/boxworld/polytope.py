"""Membership, decompositions and dimensions for the correlation polytopes.

Three vertex sets matter here: all 256 deterministic arrays, the 16 local
(no-signaling deterministic) ones, and those 16 plus the 8 PR boxes.
Every verdict comes with a certificate that is re-checked exactly before
it is returned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import lp
from .correlations import (
    BITS, INDEX, INPUT_PAIRS, CorrelationArray, chsh, enumerate_vertices,
    flat_index, make_array, pr_orbit, signaling_report,
)
from .errors import FormulaMismatch, InexactInput, OutsideHull, SignalingInput

ZERO = Fraction(0)


@dataclass(frozen=True)
class VertexSet:
    name: str
    ids: tuple
    arrays: tuple

    def __len__(self):
        return len(self.ids)

    def array(self, vid: str) -> CorrelationArray:
        return self.arrays[self.ids.index(vid)]


@lru_cache(maxsize=None)
def vertex_set(name: str) -> VertexSet:
    """``"all"`` (256), ``"local"`` (16) or ``"nosignaling"`` (16 local + 8 PR)."""
    verts = enumerate_vertices()
    if name == "all":
        return VertexSet(name, tuple(f"d{v.id}" for v in verts),
                         tuple(v.array() for v in verts))
    local = [v for v in verts if v.tag == "local"]
    ids = tuple(v.local_label for v in local)
    arrays = tuple(v.array() for v in local)
    if name == "local":
        return VertexSet(name, ids, arrays)
    if name == "nosignaling":
        prs = pr_orbit()
        return VertexSet(name, ids + tuple(f"pr{k}" for k in range(len(prs))),
                         arrays + tuple(prs))
    raise KeyError(f"unknown vertex set {name!r}")


# --- certificates ------------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    weights: tuple  # ((vertex id, Fraction weight), ...), zero weights dropped

    @property
    def support(self) -> frozenset:
        return frozenset(vid for vid, _ in self.weights)

    def as_dict(self) -> dict:
        return dict(self.weights)

    def reproduces(self, target: CorrelationArray, vset: VertexSet) -> bool:
        if any(w < 0 for _, w in self.weights):
            return False
        if sum(w for _, w in self.weights) != 1:
            return False
        entries = [ZERO] * 16
        for vid, w in self.weights:
            for i, v in enumerate(vset.array(vid).p):
                entries[i] += w * v
        return tuple(entries) == target.p


@dataclass(frozen=True)
class SeparatingInequality:
    """``coefficients . v <= bound`` holds on the vertex set but fails at the target."""

    coefficients: tuple
    bound: Fraction
    value_at_target: Fraction
    label: str = ""

    def value(self, arr: CorrelationArray):
        return sum(c * v for c, v in zip(self.coefficients, arr.p))

    def separates(self, target: CorrelationArray, vset: VertexSet) -> bool:
        return (self.value(target) == self.value_at_target > self.bound
                and all(self.value(v) <= self.bound for v in vset.arrays))


@dataclass(frozen=True)
class MembershipVerdict:
    inside: bool
    certificate: Decomposition | SeparatingInequality


@dataclass(frozen=True)
class Unique:
    """Uniqueness proof: lex-min and lex-max decompositions coincide."""

    decomposition: Decomposition
    weight_ranges: tuple  # ((vertex id, min, max), ...)


def _hull_system(arr: CorrelationArray, vset: VertexSet):
    A = [[v.p[i] for v in vset.arrays] for i in range(16)]
    return A, list(arr.p)


def _decomposition_from(x, vset: VertexSet) -> Decomposition:
    return Decomposition(tuple((vid, w) for vid, w in zip(vset.ids, x) if w != 0))


def _require_exact(arr: CorrelationArray):
    if not arr.exact:
        raise InexactInput("exact membership needs rational entries; rationalize first")


def _farkas_inequality(y, vset: VertexSet, target: CorrelationArray) -> SeparatingInequality:
    # y = (c over 16 entries, d for normalization): c.v + d <= 0 on vertices, c.p + d > 0
    coeffs = tuple(y[:16])
    ineq = SeparatingInequality(coeffs, -y[16],
                                sum(c * v for c, v in zip(coeffs, target.p)), "farkas")
    return ineq


# --- CHSH facets -------------------------------------------------------------

CHSH_VARIANTS = tuple(s for s in product((1, -1), repeat=4) if s[0] * s[1] * s[2] * s[3] == -1)


def _variant_id(signs) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


def chsh_facet_check(arr: CorrelationArray) -> list:
    """All 8 CHSH variants with an odd number of minus signs, against bound 2.

    Returns ``[(id, value, satisfied), ...]``; ids spell the signs on
    ``<00>, <01>, <10>, <11>``.
    """
    ex = chsh(arr).expectations
    out = []
    for signs in CHSH_VARIANTS:
        value = sum(s * ex[xy] for s, xy in zip(signs, INPUT_PAIRS))
        out.append((_variant_id(signs), value, value <= 2))
    return out


def chsh_inequality(signs) -> SeparatingInequality:
    """A CHSH variant written over the 16 raw entries (value filled in later)."""
    coeffs = [ZERO] * 16
    for s, (x, y) in zip(signs, INPUT_PAIRS):
        for a, b in product(BITS, BITS):
            coeffs[flat_index(x, y, a, b)] = Fraction(s * (1 if a == b else -1))
    return SeparatingInequality(tuple(coeffs), Fraction(2), ZERO, f"chsh{_variant_id(signs)}")


# --- membership --------------------------------------------------------------

def in_hull(arr: CorrelationArray, vset: VertexSet) -> lp.Feasibility:
    _require_exact(arr)
    A, b = _hull_system(arr, vset)
    return lp.feasible(A, b)


def membership_local(arr: CorrelationArray) -> MembershipVerdict:
    """Decide whether a no-signaling array is a mixture of the 16 local vertices.

    The LP decides. For arrays outside, the most violated CHSH variant is
    the certificate when one is violated, otherwise the LP's Farkas vector.
    """
    _require_exact(arr)
    if not signaling_report(arr).no_signaling:
        raise SignalingInput("local membership is only posed for no-signaling arrays")
    vset = vertex_set("local")
    res = in_hull(arr, vset)
    if res.feasible:
        dec = _decomposition_from(res.point, vset)
        assert dec.reproduces(arr, vset)
        return MembershipVerdict(True, dec)
    checks = chsh_facet_check(arr)
    worst = max(range(8), key=lambda k: checks[k][1])
    if not checks[worst][2]:
        ineq = chsh_inequality(CHSH_VARIANTS[worst])
        ineq = SeparatingInequality(ineq.coefficients, ineq.bound, ineq.value(arr), ineq.label)
    else:
        ineq = _farkas_inequality(res.certificate, vset, arr)
    if not ineq.separates(arr, vset):
        raise FormulaMismatch("separating inequality failed verification")
    return MembershipVerdict(False, ineq)


def _signaling_inequality(arr: CorrelationArray) -> SeparatingInequality | None:
    report = signaling_report(arr)
    if not report.witnesses:
        return None
    w = report.witnesses[0]
    coeffs = [ZERO] * 16
    sign = 1 if w.values[0] > w.values[1] else -1
    for other in BITS:
        for remote, s in ((0, sign), (1, -sign)):
            if w.party == "alice":
                idx = flat_index(w.local_input, remote, w.outcome, other)
            else:
                idx = flat_index(remote, w.local_input, other, w.outcome)
            coeffs[idx] = Fraction(s)
    ineq = SeparatingInequality(tuple(coeffs), ZERO, ZERO, f"signaling-{w.party}")
    return SeparatingInequality(ineq.coefficients, ZERO, ineq.value(arr), ineq.label)


def membership_nosignaling(arr: CorrelationArray) -> MembershipVerdict:
    """Mixture of the 16 local and 8 PR vertices? Cross-checked against the marginals."""
    _require_exact(arr)
    vset = vertex_set("nosignaling")
    res = in_hull(arr, vset)
    direct = signaling_report(arr).no_signaling
    if res.feasible != direct:
        raise FormulaMismatch(f"hull LP says {res.feasible}, marginal test says {direct}")
    if res.feasible:
        dec = _decomposition_from(res.point, vset)
        assert dec.reproduces(arr, vset)
        return MembershipVerdict(True, dec)
    ineq = _signaling_inequality(arr) or _farkas_inequality(res.certificate, vset, arr)
    if not ineq.separates(arr, vset):
        raise FormulaMismatch("separating inequality failed verification")
    return MembershipVerdict(False, ineq)


# --- decompositions ----------------------------------------------------------

def _lexopt(arr: CorrelationArray, vset: VertexSet, order, maximize=False) -> tuple:
    A, b = _hull_system(arr, vset)
    A = A + [[Fraction(1)] * len(vset)]
    b = b + [Fraction(1)]
    n = len(vset)
    fixed = []
    x = None
    for j in order:
        if x is not None:
            # the current point already attains the trivial bound: 0 below,
            # the unassigned mass above
            bound = 1 - sum(val for _, val in fixed) if maximize else ZERO
            if x[j] == bound:
                fixed.append((j, bound))
                continue
        c = [ZERO] * n
        c[j] = Fraction(1)
        rows = A + [[Fraction(int(k == i)) for k in range(n)] for i, _ in fixed]
        rhs = b + [val for _, val in fixed]
        res = lp.solve_lp(c, rows, rhs, maximize=maximize)
        if res.status != "optimal":
            raise OutsideHull(f"target is outside the hull of {vset.name!r}")
        fixed.append((j, res.value))
        x = res.x
    return x


def decompose(arr: CorrelationArray, vset: VertexSet | str = "local") -> Decomposition:
    """Lexicographically smallest weight vector in canonical vertex order.

    The lex-min point of the feasible weight polytope is one of its
    vertices, i.e. a basic feasible decomposition.
    """
    _require_exact(arr)
    if isinstance(vset, str):
        vset = vertex_set(vset)
    x = _lexopt(arr, vset, range(len(vset)))
    dec = _decomposition_from(x, vset)
    assert dec.reproduces(arr, vset)
    return dec


def two_decompositions(arr: CorrelationArray, vset: VertexSet | str = "local"):
    """Two distinct decompositions, or a :class:`Unique` proof.

    The first is :func:`decompose` (lex-min); the second is the lex-max in
    the same canonical order. If they coincide, each weight's minimum
    equals its maximum given the weights before it, so the decomposition
    is unique; the recorded ranges are those degenerate intervals.
    """
    if isinstance(vset, str):
        vset = vertex_set(vset)
    first = decompose(arr, vset)
    lexmax = _decomposition_from(_lexopt(arr, vset, range(len(vset)), maximize=True), vset)
    if lexmax.as_dict() != first.as_dict():
        assert lexmax.reproduces(arr, vset)
        return first, lexmax
    weights = first.as_dict()
    ranges = tuple((vid, weights.get(vid, ZERO), weights.get(vid, ZERO)) for vid in vset.ids)
    return Unique(first, ranges)


# --- geometry ----------------------------------------------------------------

def affine_dimension(arrays) -> int:
    """Dimension of the affine hull of a nonempty collection of arrays."""
    arrays = list(arrays.arrays if isinstance(arrays, VertexSet) else arrays)
    if not arrays:
        raise ValueError("need at least one vertex")
    base = arrays[0].p
    return lp.rank([[v - b0 for v, b0 in zip(arr.p, base)] for arr in arrays[1:]])


def random_nosignaling_array(rng: random.Random, den: int = 64) -> CorrelationArray:
    """Random exact no-signaling array with entries on the ``1/den`` grid.

    Draws the marginals ``p(a=0|x)`` and ``p(b=0|y)`` on the grid, then
    each ``p(00|xy)`` on the grid inside the range that keeps the cell
    nonnegative. The result is validated like any other array.
    """
    pa = [rng.randint(0, den) for _ in BITS]
    pb = [rng.randint(0, den) for _ in BITS]
    p00 = {(x, y): rng.randint(max(0, pa[x] + pb[y] - den), min(pa[x], pb[y]))
           for x, y in INPUT_PAIRS}
    entries = []
    for x, y, a, b in INDEX:
        c = p00[x, y]
        k = {(0, 0): c, (0, 1): pa[x] - c, (1, 0): pb[y] - c,
             (1, 1): den - pa[x] - pb[y] + c}[a, b]
        entries.append(Fraction(k, den))
    return make_array(entries)
