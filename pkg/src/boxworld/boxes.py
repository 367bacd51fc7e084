"""Simulated nonlocal boxes: PR boxes, Bohm boxes and quantum boxes.

Every round consumes two 64-bit words from an :class:`~boxworld.rng.RngState`:
the first supplies the inputs (bit 0 is ``x``, bit 1 is ``y``; the
guessing game also reads bit 2), the second drives the box. A PR box
takes Alice's output from the top bit, a Bohm box draws its hidden
variable as the top 53 bits read as a dyadic rational, and a quantum box
reads the same 53 bits as a uniform variate for inverse-CDF sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .correlations import (
    INPUT_PAIRS, TABLE3, TABLE4, CorrelationArray, chsh, from_function,
    make_array,
)
from .errors import BoxConsumed, LambdaOutOfRange
from .rng import RngState, dyadic_numerators, top_bit, unit_floats

ORDERS = ("alice-first", "bob-first", "simultaneous")
KINDS = ("pr", "bohm", "quantum", "classical")


# --- PR box ------------------------------------------------------------------

def pr_sample(x: int, y: int, rng: RngState) -> tuple:
    """One use of a fresh PR box: uniform ``a`` and ``b = a ^ x*y``."""
    a = rng.bit()
    return a, a ^ (x & y)


@dataclass
class PrBoxRound:
    """A single PR box. Each side may input once; whoever goes second is
    constrained by the first output."""

    rng: RngState
    x: int | None = None
    y: int | None = None
    a: int | None = None
    b: int | None = None

    @property
    def consumed(self) -> bool:
        return self.a is not None and self.b is not None

    def alice(self, x: int) -> int:
        if self.a is not None:
            raise BoxConsumed("Alice already used this PR box")
        self.x = x
        self.a = self.rng.bit() if self.b is None else self.b ^ (x & self.y)
        return self.a

    def bob(self, y: int) -> int:
        if self.b is not None:
            raise BoxConsumed("Bob already used this PR box")
        self.y = y
        self.b = self.rng.bit() if self.a is None else self.a ^ (self.x & y)
        return self.b


# --- Bohm box ----------------------------------------------------------------

def _check_lambda(lam) -> Fraction:
    lam = Fraction(lam)
    if not 0 <= lam < 1:
        raise LambdaOutOfRange(f"lambda must lie in [0, 1), got {lam}")
    return lam


def bohm_outputs(lam, x: int, y: int, order: str) -> tuple:
    """Outputs of the order-register mechanism at hidden variable ``lam``."""
    lam = _check_lambda(lam)
    xy = x & y
    half = Fraction(1, 2)
    if order == "alice-first":
        return (0, xy) if lam < half else (1, xy ^ 1)
    if order == "bob-first":
        return (xy, 0) if lam < half else (xy ^ 1, 1)
    if order == "simultaneous":
        if lam < Fraction(1, 4):
            return 0, xy
        if lam < half:
            return 1, xy ^ 1
        if lam < Fraction(3, 4):
            return xy, 0
        return xy ^ 1, 1
    raise ValueError(f"unknown order {order!r}; expected one of {ORDERS}")


def bohm_conditional_array(lam, order: str) -> CorrelationArray:
    """Deterministic array the Bohm box realises at a fixed ``lam``."""
    lam = _check_lambda(lam)
    table = {(x, y): bohm_outputs(lam, x, y, order) for x, y in INPUT_PAIRS}
    return from_function(lambda x, y, a, b: Fraction(int(table[x, y] == (a, b))))


BOHM_BREAKPOINTS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def bohm_average(order: str, breakpoints=BOHM_BREAKPOINTS) -> CorrelationArray:
    """Exact average over lambda; the mechanism is constant on each interval."""
    entries = [Fraction(0)] * 16
    for lo, hi in zip(breakpoints, breakpoints[1:]):
        cond = bohm_conditional_array((lo + hi) / 2, order)
        for i, v in enumerate(cond.p):
            entries[i] += (hi - lo) * v
    return make_array(entries)


class BohmBox:
    """One Bohm box with its hidden variable fixed at construction."""

    def __init__(self, rng: RngState | None = None, lam=None):
        if lam is None:
            lam = (rng or RngState()).dyadic()
        self.lam = _check_lambda(lam)
        self.first = None  # (party, input) of whichever side went first
        self.order = None
        self.x = self.y = self.a = self.b = None

    def alice(self, x: int) -> int:
        if self.a is not None:
            raise BoxConsumed("Alice already used this Bohm box")
        self.x = x
        if self.b is None:
            self.order = "alice-first"
            self.first = ("alice", x)
            self.a = 0 if self.lam < Fraction(1, 2) else 1
        else:
            self.a = bohm_outputs(self.lam, x, self.y, self.order)[0]
        return self.a

    def bob(self, y: int) -> int:
        if self.b is not None:
            raise BoxConsumed("Bob already used this Bohm box")
        self.y = y
        if self.a is None:
            self.order = "bob-first"
            self.first = ("bob", y)
            self.b = 0 if self.lam < Fraction(1, 2) else 1
        else:
            self.b = bohm_outputs(self.lam, self.x, y, self.order)[1]
        return self.b

    def simultaneous(self, x: int, y: int) -> tuple:
        if self.a is not None or self.b is not None:
            raise BoxConsumed("this Bohm box already received an input")
        self.order = "simultaneous"
        self.first = ("both", (x, y))
        self.x, self.y = x, y
        self.a, self.b = bohm_outputs(self.lam, x, y, "simultaneous")
        return self.a, self.b


# --- quantum box -------------------------------------------------------------

@dataclass(frozen=True)
class QuantumBoxSettings:
    """Measurement angles in radians for a maximally entangled pair."""

    alpha0: float
    alpha1: float
    beta0: float
    beta1: float

    def correlator(self, x: int, y: int) -> float:
        alpha = (self.alpha0, self.alpha1)[x]
        beta = (self.beta0, self.beta1)[y]
        return math.cos(alpha - beta)


TSIRELSON_SETTINGS = QuantumBoxSettings(0.0, math.pi / 2, math.pi / 4, -math.pi / 4)


def quantum_array(settings: QuantumBoxSettings) -> CorrelationArray:
    """``p(a,b|x,y) = (1 + (-1)^(a^b) cos(alpha_x - beta_y)) / 4`` as floats."""
    return from_function(
        lambda x, y, a, b: (1 + (-1) ** (a ^ b) * settings.correlator(x, y)) / 4)


def quantum_array_rational(settings: QuantumBoxSettings, max_den: int = 10**6) -> CorrelationArray:
    """Exact array from rationalised correlators; marginals stay exactly 1/2."""
    corr = {xy: Fraction(settings.correlator(*xy)).limit_denominator(max_den)
            for xy in INPUT_PAIRS}
    return from_function(lambda x, y, a, b: (1 + (-1) ** (a ^ b) * corr[x, y]) / 4,
                         inexact_input=True)


def _cdf_table(arr: CorrelationArray) -> np.ndarray:
    """Cumulative probabilities per input pair over outputs 00, 01, 10, 11."""
    p = np.array([float(v) for v in arr.p]).reshape(2, 2, 4)
    return np.cumsum(p, axis=-1)


def _sample_from(cdf: np.ndarray, x, y, u):
    idx = (u[..., None] >= cdf[x, y][..., :3]).sum(axis=-1)
    return (idx >> 1).astype(np.int8), (idx & 1).astype(np.int8)


def quantum_sample(settings: QuantumBoxSettings, x: int, y: int, rng: RngState) -> tuple:
    cdf = _cdf_table(quantum_array(settings))
    a, b = _sample_from(cdf, np.array(x), np.array(y), unit_floats(rng.words(1))[0])
    return int(a), int(b)


# --- sessions ----------------------------------------------------------------

def analytic_array(kind: str, settings: QuantumBoxSettings | None = None) -> CorrelationArray:
    """The array a box kind reproduces on average."""
    if kind in ("pr", "bohm"):
        return TABLE4
    if kind == "classical":
        return TABLE3
    if kind == "quantum":
        return quantum_array(settings or TSIRELSON_SETTINGS)
    raise ValueError(f"unknown box kind {kind!r}; expected one of {KINDS}")


def _box_outputs(kind, x, y, words, order, settings):
    """Vectorised outputs for one box per round; returns (a, b, lam_numerators)."""
    lam = None
    if kind == "pr":
        a = top_bit(words)
        b = a ^ (x & y)
    elif kind == "bohm":
        lam = dyadic_numerators(words)
        quartile = (lam >> np.uint64(51)).astype(np.int8)
        xy = x & y
        low = quartile < 2
        if order == "alice-first":
            a = np.where(low, 0, 1).astype(np.int8)
            b = np.where(low, xy, xy ^ 1).astype(np.int8)
        elif order == "bob-first":
            b = np.where(low, 0, 1).astype(np.int8)
            a = np.where(low, xy, xy ^ 1).astype(np.int8)
        elif order == "simultaneous":
            a = np.choose(quartile, [np.zeros_like(xy), np.ones_like(xy), xy, xy ^ 1])
            b = np.choose(quartile, [xy, xy ^ 1, np.zeros_like(xy), np.ones_like(xy)])
        else:
            raise ValueError(f"unknown order {order!r}; expected one of {ORDERS}")
    elif kind in ("quantum", "classical"):
        cdf = _cdf_table(analytic_array(kind, settings))
        a, b = _sample_from(cdf, x, y, unit_floats(words))
    else:
        raise ValueError(f"unknown box kind {kind!r}; expected one of {KINDS}")
    return a.astype(np.int8), b.astype(np.int8), lam


@dataclass
class BoxSession:
    kind: str
    seed: int
    x: np.ndarray
    y: np.ndarray
    a: np.ndarray
    b: np.ndarray
    lam: np.ndarray | None = None  # 53-bit numerators; only kept when disclosed
    order: str | None = None
    settings: QuantumBoxSettings | None = None
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.x)

    def lambdas(self) -> np.ndarray:
        """Disclosed hidden variables as exact doubles."""
        if self.lam is None:
            raise ValueError("lambda was not disclosed for this session")
        return self.lam.astype(np.float64) / float(2**53)

    def rounds(self) -> list:
        cols = [self.x, self.y, self.a, self.b]
        rows = [tuple(int(v) for v in r) for r in zip(*cols)]
        if self.lam is not None:
            lams = self.lambdas()
            rows = [r + (float(l),) for r, l in zip(rows, lams)]
        return rows

    def same_as(self, other: "BoxSession") -> bool:
        cols = ("x", "y", "a", "b")
        if (self.kind, self.seed, self.order, self.settings) != \
                (other.kind, other.seed, other.order, other.settings):
            return False
        if not all(np.array_equal(getattr(self, c), getattr(other, c)) for c in cols):
            return False
        if (self.lam is None) != (other.lam is None):
            return False
        return self.lam is None or np.array_equal(self.lam, other.lam)


def run_session(kind: str, rounds: int, seed: int = 0, *, order: str = "alice-first",
                settings: QuantumBoxSettings | None = None, disclose_lambda: bool = False,
                inputs: tuple | None = None) -> BoxSession:
    """Play ``rounds`` fresh boxes of one kind.

    Inputs are independent and uniform unless ``inputs`` fixes the pair.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    if kind == "quantum" and settings is None:
        settings = TSIRELSON_SETTINGS
    rng = RngState(seed)
    words = rng.words(2 * rounds).reshape(rounds, 2)
    if inputs is None:
        x = (words[:, 0] & np.uint64(1)).astype(np.int8)
        y = ((words[:, 0] >> np.uint64(1)) & np.uint64(1)).astype(np.int8)
    else:
        x = np.full(rounds, inputs[0], dtype=np.int8)
        y = np.full(rounds, inputs[1], dtype=np.int8)
    a, b, lam = _box_outputs(kind, x, y, words[:, 1], order, settings)
    return BoxSession(kind, seed, x, y, a, b,
                      lam=lam if disclose_lambda else None,
                      order=order if kind == "bohm" else None,
                      settings=settings if kind == "quantum" else None)


@dataclass(frozen=True)
class EmpiricalArray:
    p: np.ndarray       # shape (2, 2, 2, 2) indexed [x, y, a, b]
    stderr: np.ndarray  # same shape, sqrt(p (1 - p) / n_xy)
    counts: np.ndarray  # rounds per input pair, shape (2, 2)

    def total_variation(self, target: CorrelationArray) -> float:
        """Largest per-cell total-variation distance to ``target``."""
        q = np.array([float(v) for v in target.p]).reshape(2, 2, 2, 2)
        return float((0.5 * np.abs(self.p - q).sum(axis=(2, 3))).max())


def empirical_array(session: BoxSession) -> EmpiricalArray:
    counts = np.zeros((2, 2, 2, 2))
    np.add.at(counts, (session.x, session.y, session.a, session.b), 1)
    n_xy = counts.sum(axis=(2, 3))
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(n_xy[..., None, None] > 0, counts / n_xy[..., None, None], 0.0)
        se = np.sqrt(p * (1 - p) / np.maximum(n_xy, 1)[..., None, None])
    return EmpiricalArray(p, se, n_xy.astype(int))


# --- the n = 1 guessing game -------------------------------------------------

@dataclass(frozen=True)
class GameResult:
    kind: str
    rounds: int
    seed: int
    successes: int
    empirical: float
    stderr: float
    analytic: float


def guessing_game_n1(kind: str, rounds: int, seed: int = 0, *,
                     settings: QuantumBoxSettings | None = None,
                     order: str = "alice-first") -> GameResult:
    """Bob guesses bit ``k`` of Alice's two bits from one sent bit and a box.

    Alice holds ``a0, a1``, inputs ``x = a0 ^ a1`` and sends ``m = a0 ^ a``;
    Bob inputs ``y = k`` and guesses ``m ^ b``.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    if kind == "quantum" and settings is None:
        settings = TSIRELSON_SETTINGS
    rng = RngState(seed)
    words = rng.words(2 * rounds).reshape(rounds, 2)
    w = words[:, 0]
    a0 = (w & np.uint64(1)).astype(np.int8)
    a1 = ((w >> np.uint64(1)) & np.uint64(1)).astype(np.int8)
    k = ((w >> np.uint64(2)) & np.uint64(1)).astype(np.int8)
    x, y = a0 ^ a1, k
    a, b, _ = _box_outputs(kind, x, y, words[:, 1], order, settings)
    guess = (a0 ^ a) ^ b
    target = np.where(k == 0, a0, a1)
    successes = int((guess == target).sum())
    rate = successes / rounds
    E = float(chsh(analytic_array(kind, settings)).E)
    return GameResult(kind, rounds, seed, successes, rate,
                      math.sqrt(rate * (1 - rate) / rounds), (1 + E) / 2)
