"""Correlation arrays for two parties with binary inputs and outputs.

An array holds the 16 joint conditional probabilities ``p(a,b|x,y)``.
Entries are stored flat in canonical ``(x, y, a, b)`` order with ``x``
outermost, so ``p(a,b|x,y)`` lives at index ``8x + 4y + 2a + b``.

Exact arrays hold :class:`fractions.Fraction` entries and every check on
them is an exact equality. Float arrays (quantum boxes) are accepted too;
their checks use :data:`FLOAT_TOL`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from numbers import Rational
from typing import Iterable, NamedTuple, Sequence

from .errors import CellNotNormalized, FormulaMismatch, NegativeProbability

BITS = (0, 1)
INPUT_PAIRS = tuple(product(BITS, repeat=2))
#: canonical entry order, x outermost
INDEX = tuple(product(BITS, repeat=4))
FLOAT_TOL = 1e-9


def flat_index(x: int, y: int, a: int, b: int) -> int:
    return 8 * x + 4 * y + 2 * a + b


def _to_number(v):
    if isinstance(v, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, Rational):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    return float(v)


def _close(u, v) -> bool:
    if isinstance(u, Fraction) and isinstance(v, Fraction):
        return u == v
    return math.isclose(u, v, rel_tol=0.0, abs_tol=FLOAT_TOL)


@dataclass(frozen=True)
class CorrelationArray:
    """Validated array of ``p(a,b|x,y)``; build it with :func:`make_array`."""

    p: tuple
    inexact_input: bool = field(default=False, compare=False)

    def __getitem__(self, key):
        x, y, a, b = key
        return self.p[flat_index(x, y, a, b)]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.p)

    def cell(self, x: int, y: int) -> tuple:
        i = 8 * x + 4 * y
        return self.p[i:i + 4]

    def nested(self) -> list:
        """Entries as ``p[x][y][a][b]``."""
        return [[[[self[x, y, a, b] for b in BITS] for a in BITS]
                 for y in BITS] for x in BITS]

    def as_floats(self) -> "CorrelationArray":
        return CorrelationArray(tuple(float(v) for v in self.p), self.inexact_input)


def make_array(entries: Iterable, *, inexact_input: bool = False) -> CorrelationArray:
    """Validate 16 entries in ``(x, y, a, b)`` order.

    Accepts Fractions, ints, ``"num/den"`` strings or floats. If any entry
    is a float the whole array becomes a float array.
    """
    vals = [_to_number(v) for v in entries]
    if len(vals) != 16:
        raise ValueError(f"expected 16 entries, got {len(vals)}")
    if any(isinstance(v, float) for v in vals):
        vals = [float(v) for v in vals]
        for v in vals:
            if not math.isfinite(v):
                raise ValueError(f"non-finite entry {v}")
    one = Fraction(1) if isinstance(vals[0], Fraction) else 1.0
    for (x, y, a, b), v in zip(INDEX, vals):
        if v < 0 and not _close(v, 0 * one):
            raise NegativeProbability(f"p({a}{b}|{x}{y}) = {v} is negative")
    for x, y in INPUT_PAIRS:
        i = 8 * x + 4 * y
        total = sum(vals[i:i + 4], 0 * one)
        if not _close(total, one):
            raise CellNotNormalized((x, y), total)
    return CorrelationArray(tuple(vals), inexact_input)


def from_nested(p) -> CorrelationArray:
    return make_array(p[x][y][a][b] for x, y, a, b in INDEX)


def from_function(f, **kw) -> CorrelationArray:
    """Build from a callable ``f(x, y, a, b)``."""
    return make_array((f(x, y, a, b) for x, y, a, b in INDEX), **kw)


def mixture(arrays: Sequence[CorrelationArray], weights: Sequence) -> CorrelationArray:
    if len(arrays) != len(weights) or not arrays:
        raise ValueError("need matching non-empty arrays and weights")
    entries = [sum((w * arr.p[i] for arr, w in zip(arrays, weights)), 0 * weights[0])
               for i in range(16)]
    return make_array(entries)


# --- marginals and signaling -------------------------------------------------

@dataclass(frozen=True)
class MarginalTable:
    alice: dict  # (a, x, y) -> p(a|x,y)
    bob: dict    # (b, x, y) -> p(b|x,y)


def marginals(arr: CorrelationArray) -> MarginalTable:
    alice, bob = {}, {}
    for x, y in INPUT_PAIRS:
        for o in BITS:
            alice[o, x, y] = arr[x, y, o, 0] + arr[x, y, o, 1]
            bob[o, x, y] = arr[x, y, 0, o] + arr[x, y, 1, o]
    return MarginalTable(alice, bob)


class Witness(NamedTuple):
    party: str           # whose marginal moves: "alice" or "bob"
    outcome: int
    local_input: int
    remote_inputs: tuple  # always (0, 1)
    values: tuple        # marginal at remote input 0 and 1


@dataclass(frozen=True)
class SignalingReport:
    bob_to_alice: bool
    alice_to_bob: bool
    witnesses: tuple = ()

    @property
    def no_signaling(self) -> bool:
        return not (self.bob_to_alice or self.alice_to_bob)


def signaling_report(arr: CorrelationArray) -> SignalingReport:
    m = marginals(arr)
    witnesses = []
    for o, local in product(BITS, BITS):
        pa = (m.alice[o, local, 0], m.alice[o, local, 1])
        if not _close(*pa):
            witnesses.append(Witness("alice", o, local, (0, 1), pa))
    for o, local in product(BITS, BITS):
        pb = (m.bob[o, 0, local], m.bob[o, 1, local])
        if not _close(*pb):
            witnesses.append(Witness("bob", o, local, (0, 1), pb))
    return SignalingReport(
        bob_to_alice=any(w.party == "alice" for w in witnesses),
        alice_to_bob=any(w.party == "bob" for w in witnesses),
        witnesses=tuple(witnesses),
    )


def is_product(arr: CorrelationArray) -> bool:
    """True if ``p(ab|xy) = p(a|x) p(b|y)`` with each marginal independent
    of the other party's input."""
    m = marginals(arr)
    return all(_close(arr[x, y, a, b], m.alice[a, x, 0] * m.bob[b, 0, y])
               for x, y, a, b in INDEX)


# --- CHSH --------------------------------------------------------------------

@dataclass(frozen=True)
class ChshStats:
    expectations: dict  # (x, y) -> <xy> in +-1 units
    K: object
    E: object


def p_same(arr: CorrelationArray, x: int, y: int):
    return arr[x, y, 0, 0] + arr[x, y, 1, 1]


def p_diff(arr: CorrelationArray, x: int, y: int):
    return arr[x, y, 0, 1] + arr[x, y, 1, 0]


def chsh(arr: CorrelationArray) -> ChshStats:
    ex = {(x, y): p_same(arr, x, y) - p_diff(arr, x, y) for x, y in INPUT_PAIRS}
    K = ex[0, 0] + ex[0, 1] + ex[1, 0] - ex[1, 1]
    return ChshStats(ex, K, K / 4)


def sim_success_probability(arr: CorrelationArray):
    """Probability that the array simulates a PR box, computed two ways.

    The direct average over the four input pairs is checked against
    ``(1 + K/4) / 2`` before returning.
    """
    direct = (p_same(arr, 0, 0) + p_same(arr, 0, 1) + p_same(arr, 1, 0)
              + p_diff(arr, 1, 1)) / 4
    via_k = (1 + chsh(arr).K / 4) / 2
    if not _close(direct, via_k):
        raise FormulaMismatch(f"direct average {direct} != (1+K/4)/2 = {via_k}")
    return direct


# --- deterministic vertices --------------------------------------------------

@dataclass(frozen=True)
class DeterministicVertex:
    """One output pair per input pair, in input order 00, 01, 10, 11."""

    outputs: tuple

    @classmethod
    def from_id(cls, vid: int) -> "DeterministicVertex":
        bits = [(vid >> (7 - k)) & 1 for k in range(8)]
        return cls(tuple((bits[2 * i], bits[2 * i + 1]) for i in range(4)))

    @classmethod
    def from_local_label(cls, label: str) -> "DeterministicVertex":
        """Parse ``"A0A1;B0B1"``: Alice's outputs for x=0,1, Bob's for y=0,1."""
        alice, bob = label.split(";")
        return cls(tuple((int(alice[x]), int(bob[y])) for x, y in INPUT_PAIRS))

    @property
    def id(self) -> int:
        vid = 0
        for a, b in self.outputs:
            vid = (vid << 2) | (a << 1) | b
        return vid

    def output(self, x: int, y: int) -> tuple:
        return self.outputs[2 * x + y]

    def array(self) -> CorrelationArray:
        one, zero = Fraction(1), Fraction(0)
        return make_array(one if self.output(x, y) == (a, b) else zero
                          for x, y, a, b in INDEX)

    @property
    def tag(self) -> str:
        return "local" if signaling_report(self.array()).no_signaling else "signaling"

    @property
    def local_label(self) -> str | None:
        """``"A0A1;B0B1"`` for local vertices, None otherwise."""
        if self.tag != "local":
            return None
        alice = "".join(str(self.output(x, 0)[0]) for x in BITS)
        bob = "".join(str(self.output(0, y)[1]) for y in BITS)
        return f"{alice};{bob}"


def enumerate_vertices() -> list:
    """All 256 deterministic vertices, ordered by their 8 output bits."""
    return [DeterministicVertex.from_id(i) for i in range(256)]


def local_vertices() -> list:
    return [v for v in enumerate_vertices() if v.tag == "local"]


# --- local relabelings -------------------------------------------------------

@dataclass(frozen=True)
class LocalRelabeling:
    """Local reversible relabeling of inputs and outputs.

    Inputs map ``x -> x^s`` and ``y -> y^t``. Outputs are relabeled after
    the inputs: ``a -> a ^ u*x' ^ v`` with ``x' = x^s`` the new input label,
    and ``b -> b ^ w*y' ^ z`` likewise.
    """

    s: int = 0
    t: int = 0
    u: int = 0
    v: int = 0
    w: int = 0
    z: int = 0

    def then(self, other: "LocalRelabeling") -> "LocalRelabeling":
        """The relabeling equal to applying ``self`` first, then ``other``."""
        return LocalRelabeling(
            self.s ^ other.s, self.t ^ other.t,
            self.u ^ other.u, self.v ^ other.v ^ (self.u & other.s),
            self.w ^ other.w, self.z ^ other.z ^ (self.w & other.t),
        )

    def inverse(self) -> "LocalRelabeling":
        return LocalRelabeling(self.s, self.t, self.u, self.v ^ (self.u & self.s),
                               self.w, self.z ^ (self.w & self.t))

    def map_event(self, x, y, a, b) -> tuple:
        x2, y2 = x ^ self.s, y ^ self.t
        return x2, y2, a ^ (self.u & x2) ^ self.v, b ^ (self.w & y2) ^ self.z


IDENTITY = LocalRelabeling()


def relabeling_group() -> list:
    return [LocalRelabeling(*bits) for bits in product(BITS, repeat=6)]


def apply_relabeling(arr: CorrelationArray, op: LocalRelabeling) -> CorrelationArray:
    out = [None] * 16
    for x, y, a, b in INDEX:
        out[flat_index(*op.map_event(x, y, a, b))] = arr[x, y, a, b]
    return CorrelationArray(tuple(out), arr.inexact_input)


def orbit(arr: CorrelationArray) -> list:
    """Distinct images of ``arr`` under the relabeling group, sorted by entries."""
    seen = {apply_relabeling(arr, op).p for op in relabeling_group()}
    return [CorrelationArray(p) for p in sorted(seen, reverse=True)]


# --- the printed tables ------------------------------------------------------

def _from_cells(cells: dict) -> CorrelationArray:
    """``cells`` maps ``(x, y)`` to ``{(a, b): value}``; other entries are 0."""
    return make_array(Fraction(cells[x, y].get((a, b), 0)) for x, y, a, b in INDEX)


_H = Fraction(1, 2)

TABLE2 = _from_cells({(0, 0): {(0, 0): 1}, (1, 0): {(0, 1): 1},
                      (0, 1): {(1, 0): 1}, (1, 1): {(1, 1): 1}})
TABLE3 = _from_cells({xy: {(0, 0): 1} for xy in INPUT_PAIRS})
TABLE4 = from_function(lambda x, y, a, b: _H if a ^ b == x & y else 0)
TABLE5 = from_function(lambda x, y, a, b: _H if a ^ b == 1 ^ (x & y) else 0)
TABLE6 = from_function(lambda x, y, a, b: Fraction(1, 4))
TABLE7 = _from_cells({(0, 0): {(0, 0): 1}, (1, 0): {(0, 0): 1},
                      (0, 1): {(0, 0): 1}, (1, 1): {(1, 0): 1}})
# Printed entries coincide with TABLE7; the caption describes a different box.
TABLE8 = TABLE7

TABLES = {
    "table2": TABLE2, "table3": TABLE3, "table4": TABLE4, "table5": TABLE5,
    "table6": TABLE6, "table7": TABLE7, "table8": TABLE8,
}
TABLE_NOTES = {
    "table8": "as-printed, caption inconsistent: entries equal table7",
}

PR_BOX = TABLE4
UNIFORM = TABLE6


def pr_orbit() -> list:
    return orbit(TABLE4)


def local_orbit() -> list:
    return orbit(TABLE3)
