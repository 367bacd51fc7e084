"""High-precision checks of the information-causality bound.

With ``N = 2**n`` bits and guess probability ``P = (1 + E**n) / 2`` the
bound is violated when ``h(P) < 1 - 2**-n``. Near ``n ~ 100`` both sides
differ from 1 by far less than double precision resolves, so everything
here runs on mpmath at an explicit precision and the sign of the deficit
``(1 - 2**-n) - h(P)`` is certified with interval arithmetic.
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import iv, mp

from .errors import DomainError, PrecisionExhausted

DEFAULT_PREC = 300
MAX_PREC = 4096
SERIES_RADIUS = Fraction(1, 1000)


@contextmanager
def _ivprec(prec: int):
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


def _lo(x):
    return mp.make_mpf(x._mpi_[0])


def _hi(x):
    return mp.make_mpf(x._mpi_[1])


# --- exact-ish scalars -------------------------------------------------------

@dataclass(frozen=True)
class Scalar:
    """``q`` or ``q / sqrt(2)`` with rational ``q``; enough for every E we need."""

    q: Fraction
    over_sqrt2: bool = False

    def interval(self, ctx=iv):
        v = ctx.mpf(self.q.numerator) / self.q.denominator
        return v / ctx.sqrt(2) if self.over_sqrt2 else v

    def value(self, prec: int = DEFAULT_PREC):
        with mp.workprec(prec):
            return +self.interval(mp)

    def __float__(self):
        return float(self.value(64))

    def __str__(self):
        base = str(self.q)
        return f"{base}/sqrt2" if self.over_sqrt2 else base


INV_SQRT2 = Scalar(Fraction(1), True)
_SQRT2_FORM = re.compile(r"^\s*([^/]*?)\s*/\s*sqrt\(?2\)?\s*$")


def parse_scalar(v) -> Scalar:
    """Accept ``Scalar``, ints, Fractions, floats (exactly), mpf, or strings
    like ``"0.708"``, ``"3/4"``, ``"1/sqrt2"``."""
    if isinstance(v, Scalar):
        return v
    if isinstance(v, str):
        m = _SQRT2_FORM.match(v)
        if m:
            return Scalar(Fraction(m.group(1) or "1"), True)
        return Scalar(Fraction(v.strip()))
    if isinstance(v, mpmath.mpf):
        man, exp = v.man_exp
        return Scalar(Fraction(man) * Fraction(2) ** exp)
    return Scalar(Fraction(v))


# --- binary entropy ----------------------------------------------------------

def _h_direct(ctx, p):
    return -(p * ctx.log(p) + (1 - p) * ctx.log(1 - p)) / ctx.ln2


def _one_minus_h_series(ctx, t, prec):
    """``1 - h(1/2 + e)`` from ``t = (2e)**2``, plus a rigorous tail bound.

    Terms are ``t**k / (2k (2k-1))``; stop once a term drops below
    ``2**-(prec+8)`` relative to the first, then bound the rest by a
    geometric series.
    """
    total = ctx.mpf(0)
    if (_hi(t) if ctx is iv else t) == 0:
        return total, ctx.mpf(0)
    term = t
    k = 1
    rel = ctx.mpf(2) ** -(prec + 8)
    while True:
        total += term / (2 * k * (2 * k - 1))
        if ctx is iv:
            small = _hi(term / t) < _lo(rel)
        else:
            small = term / t < rel
        if small:
            break
        term = term * t
        k += 1
    # remaining sum <= t**(k+1) / ((2k+2)(2k+1)) / (1 - t)
    tail = term * t / ((2 * k + 2) * (2 * k + 1)) / (1 - t)
    return total / ctx.ln2, tail / ctx.ln2


def _to_mp(p):
    if isinstance(p, mpmath.mpf):
        return p
    if isinstance(p, (str, Fraction, int)):
        f = Fraction(p)
        return mp.mpf(f.numerator) / f.denominator
    return mp.mpf(p)


def _check_prob(p):
    if not 0 <= p <= 1:
        raise DomainError(f"probability {p} outside [0, 1]")


def binary_entropy_direct(p, prec: int = DEFAULT_PREC):
    with mp.workprec(prec):
        p = _to_mp(p)
        _check_prob(p)
        if p == 0 or p == 1:
            return mp.mpf(0)
        return _h_direct(mp, p)


def binary_entropy_series(p, prec: int = DEFAULT_PREC):
    """Cancellation-free form for ``p`` near 1/2."""
    with mp.workprec(prec + 20):
        p = _to_mp(p)
        _check_prob(p)
        two_eps = 2 * p - 1
        s, tail = _one_minus_h_series(mp, two_eps * two_eps, prec)
        out = 1 - (s + tail / 2)
    with mp.workprec(prec):
        return +out


def binary_entropy(p, prec: int = DEFAULT_PREC):
    """``h(p)`` in bits, with ``0 log 0 = 0``.

    Uses the series when ``|p - 1/2| < 1e-3`` and the direct formula
    otherwise.
    """
    with mp.workprec(prec):
        pm = _to_mp(p)
        _check_prob(pm)
        near_half = abs(pm - mp.mpf(1) / 2) < mp.mpf(SERIES_RADIUS.numerator) / SERIES_RADIUS.denominator
    if near_half:
        return binary_entropy_series(pm, prec)
    return binary_entropy_direct(pm, prec)


def guess_probability(E, n: int, prec: int = DEFAULT_PREC):
    """``(1 + E**n) / 2``."""
    E = parse_scalar(E)
    _check_args(E, n)
    with mp.workprec(prec):
        return (1 + E.interval(mp) ** n) / 2


def _check_args(E: Scalar, n: int):
    if E.q < 0 or _square(E) > 1:
        raise DomainError(f"E = {E} outside [0, 1]")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")


def _square(E: Scalar) -> Fraction:
    return E.q * E.q / 2 if E.over_sqrt2 else E.q * E.q


# --- reports -----------------------------------------------------------------

@dataclass(frozen=True)
class ICReport:
    E: object
    n: int
    P_k: object
    entropy: object
    bound: object
    deficit: object       # bound - entropy
    violated: bool
    precision: int
    deficit_lower: object  # certified enclosure of the deficit
    deficit_upper: object


def _deficit_interval(E_n, n, prec):
    """Enclosure of ``(1 - 2**-n) - h((1 + E_n)/2)`` and of ``1 - h``."""
    near_half = _hi(E_n) < 2 * SERIES_RADIUS.numerator / mp.mpf(SERIES_RADIUS.denominator)
    if _lo(E_n) == 1:
        one_minus_h = iv.mpf(1)
        series = False
    elif near_half:
        s, tail = _one_minus_h_series(iv, E_n * E_n, prec)
        one_minus_h = s + iv.mpf([0, _hi(tail)])
        series = True
    else:
        one_minus_h = 1 - _h_direct(iv, (1 + E_n) / 2)
        series = False
    return one_minus_h - iv.mpf(2) ** -n, one_minus_h, series


def _certain(lo, hi, n, prec, series) -> bool:
    if lo == 0 and hi == 0:
        return True
    if lo <= 0 <= hi:
        return False
    # direct path loses absolute precision, series path only relative
    scale = mp.mpf(2) ** -(prec // 2)
    if series:
        scale = scale * mp.mpf(2) ** -n
    return min(abs(lo), abs(hi)) >= scale


def ic_report(E, n: int, prec: int = DEFAULT_PREC, *, _power=None) -> ICReport:
    """Full report for ``(E, n)`` with the violation sign certified.

    Precision doubles from ``prec`` until the deficit enclosure excludes
    zero by a safe margin, up to :data:`MAX_PREC`.
    """
    E = parse_scalar(E)
    _check_args(E, n)
    while True:
        with _ivprec(prec):
            E_n = _power if _power is not None else E.interval(iv) ** n
            deficit, one_minus_h, series = _deficit_interval(E_n, n, prec)
            lo, hi = _lo(deficit), _hi(deficit)
        with mp.workprec(prec):
            ok = _certain(lo, hi, n, prec, series)
        if ok:
            break
        _power = None
        prec *= 2
        if prec > MAX_PREC:
            raise PrecisionExhausted(f"deficit sign for E={E}, n={n} unresolved at {MAX_PREC} bits")
    with mp.workprec(prec):
        E_mid = E.interval(mp)
        P = (1 + E_mid ** n) / 2
        bound = 1 - mp.mpf(2) ** -n
        mid_lo, mid_hi = +lo, +hi
        deficit_mid = (mid_lo + mid_hi) / 2
        one_minus_h_mid = deficit_mid + mp.mpf(2) ** -n
        entropy = 1 - one_minus_h_mid
    return ICReport(E=E_mid, n=n, P_k=P, entropy=entropy, bound=bound,
                    deficit=deficit_mid, violated=mid_lo > 0, precision=prec,
                    deficit_lower=mid_lo, deficit_upper=mid_hi)


def ic_scan(E, n_max: int, prec: int = DEFAULT_PREC, *, stop_at_violation: bool = False):
    """Reports for ``n = 1 .. n_max`` with powers of E accumulated incrementally."""
    E = parse_scalar(E)
    _check_args(E, n_max)
    reports = []
    with _ivprec(prec):
        E_iv = E.interval(iv)
        power = iv.mpf(1)
    for n in range(1, n_max + 1):
        with _ivprec(prec):
            power = power * E_iv
        rep = ic_report(E, n, prec, _power=power)
        reports.append(rep)
        if stop_at_violation and rep.violated:
            break
    return reports


def minimal_violation_n(E, n_max: int, prec: int = DEFAULT_PREC):
    """Smallest ``n <= n_max`` whose report is violated, else None.

    Scans every n in order; no monotonicity in n is assumed.
    """
    reports = ic_scan(E, n_max, prec, stop_at_violation=True)
    last = reports[-1]
    return last.n if last.violated else None


# --- strength bands ----------------------------------------------------------

def classify_strength(E) -> str:
    """``classical`` for ``|E| <= 1/2``, ``quantum`` up to ``1/sqrt2``,
    ``superquantum`` above. Decided exactly."""
    E = parse_scalar(E)
    sq = _square(E)
    if sq > 1:
        raise DomainError(f"|E| = {E} exceeds 1")
    if sq <= Fraction(1, 4):
        return "classical"
    if sq <= Fraction(1, 2):
        return "quantum"
    return "superquantum"
