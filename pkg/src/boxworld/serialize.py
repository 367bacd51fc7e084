"""JSON forms: the ``corr-array-v1`` array format, verdicts, and the catalog."""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .boxes import TSIRELSON_SETTINGS, quantum_array
from .correlations import (
    BITS, FLOAT_TOL, INDEX, INPUT_PAIRS, TABLE_NOTES, TABLES, UNIFORM, PR_BOX,
    CorrelationArray, make_array,
)
from .errors import ParseError, UnknownCatalogEntry
from .polytope import Decomposition, MembershipVerdict, SeparatingInequality

FORMAT = "corr-array-v1"
MAX_DEN = 10**6


def rat(v) -> str:
    """``"num/den"`` (or a bare integer) for a rational."""
    return str(Fraction(v))


def num(v):
    """JSON value for an entry: exact string, or a float for inexact entries."""
    return rat(v) if isinstance(v, (Fraction, int)) else float(v)


# --- catalog -----------------------------------------------------------------

CATALOG_NAMES = tuple(TABLES) + ("uniform", "pr", "quantum-tsirelson")


def catalog(name: str) -> CorrelationArray:
    if name in TABLES:
        return TABLES[name]
    if name == "uniform":
        return UNIFORM
    if name == "pr":
        return PR_BOX
    if name == "quantum-tsirelson":
        return quantum_array(TSIRELSON_SETTINGS)
    raise UnknownCatalogEntry(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG_NAMES)}")


# --- arrays ------------------------------------------------------------------

def array_to_json(arr: CorrelationArray, note: str | None = None) -> dict:
    out = {"format": FORMAT, "p": [[[[num(arr[x, y, a, b]) for b in BITS] for a in BITS]
                                    for y in BITS] for x in BITS]}
    if arr.inexact_input:
        out["flags"] = ["inexact-input"]
    if note:
        out["note"] = note
    return out


def catalog_json(name: str) -> dict:
    return array_to_json(catalog(name), TABLE_NOTES.get(name))


def _snap_nosignaling(vals: list) -> list | None:
    """Exact no-signaling entries near ``vals``, or None if ``vals`` signal.

    Rebuilds from the rationalised marginals ``p(a=0|x)``, ``p(b=0|y)`` and
    ``p(00|xy)``, so the result is exactly normalised and no-signaling.
    """
    def p(x, y, a, b):
        return vals[8 * x + 4 * y + 2 * a + b]

    alice = {(x, y): p(x, y, 0, 0) + p(x, y, 0, 1) for x, y in INPUT_PAIRS}
    bob = {(x, y): p(x, y, 0, 0) + p(x, y, 1, 0) for x, y in INPUT_PAIRS}
    if any(abs(alice[x, 0] - alice[x, 1]) > FLOAT_TOL for x in BITS):
        return None
    if any(abs(bob[0, y] - bob[1, y]) > FLOAT_TOL for y in BITS):
        return None

    def q(v):
        return Fraction(v).limit_denominator(MAX_DEN)

    pa = [q((alice[x, 0] + alice[x, 1]) / 2) for x in BITS]
    pb = [q((bob[0, y] + bob[1, y]) / 2) for y in BITS]
    out = []
    for x, y, a, b in INDEX:
        c = q(p(x, y, 0, 0))
        out.append({(0, 0): c, (0, 1): pa[x] - c, (1, 0): pb[y] - c,
                    (1, 1): 1 - pa[x] - pb[y] + c}[a, b])
    return out if all(v >= 0 for v in out) else None


def rationalize(values) -> CorrelationArray:
    """Exact array from inexact entries, flagged ``inexact-input``.

    Entries go to the nearest rational with denominator at most 10**6.
    When the floats are normalised and no-signaling within
    :data:`~boxworld.correlations.FLOAT_TOL`, the result is snapped to an
    exactly no-signaling array; otherwise each cell is renormalised if it
    was within tolerance of summing to 1.
    """
    vals = [float(v) for v in values]
    cells_ok = all(abs(sum(vals[8 * x + 4 * y:8 * x + 4 * y + 4]) - 1) <= FLOAT_TOL
                   for x, y in INPUT_PAIRS)
    nonneg = all(v >= -FLOAT_TOL for v in vals)
    if cells_ok and nonneg:
        snapped = _snap_nosignaling(vals)
        if snapped is not None:
            return make_array(snapped, inexact_input=True)
    q = [Fraction(v).limit_denominator(MAX_DEN) for v in vals]
    if cells_ok:
        for x, y in INPUT_PAIRS:
            i = 8 * x + 4 * y
            total = sum(q[i:i + 4])
            q[i:i + 4] = [v / total for v in q[i:i + 4]]
    return make_array(q, inexact_input=True)


def _entry(v):
    if isinstance(v, bool):
        raise ParseError("booleans are not probabilities")
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational {v!r}") from exc
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ParseError(f"non-finite entry {v}")
        return v
    raise ParseError(f"unsupported entry {v!r}")


def array_from_json(obj) -> CorrelationArray:
    """Parse ``corr-array-v1`` from a dict or JSON text.

    Structural problems raise :class:`ParseError`; probability violations
    raise the validation errors of :func:`~boxworld.correlations.make_array`.
    """
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or obj.get("format") != FORMAT:
        raise ParseError(f'expected an object with "format": "{FORMAT}"')
    p = obj.get("p")
    try:
        vals = [_entry(p[x][y][a][b]) for x, y, a, b in INDEX]
        shape_ok = len(p) == 2 and all(len(p[x]) == 2 for x in BITS) and all(
            len(p[x][y]) == 2 and all(len(p[x][y][a]) == 2 for a in BITS)
            for x, y in INPUT_PAIRS)
    except (TypeError, IndexError, KeyError) as exc:
        raise ParseError("p must be nested 2x2x2x2 arrays indexed p[x][y][a][b]") from exc
    if not shape_ok:
        raise ParseError("p must be nested 2x2x2x2 arrays indexed p[x][y][a][b]")
    if any(isinstance(v, float) for v in vals):
        return rationalize(vals)
    return make_array(vals, inexact_input="inexact-input" in obj.get("flags", ()))


def exact_view(arr: CorrelationArray) -> CorrelationArray:
    """Exact arrays pass through; float arrays are rationalized."""
    return arr if arr.exact else rationalize(arr.p)


# --- verdicts ----------------------------------------------------------------

def decomposition_json(dec: Decomposition) -> dict:
    return {"type": "decomposition", "weights": {vid: rat(w) for vid, w in dec.weights}}


def inequality_json(ineq: SeparatingInequality) -> dict:
    return {"type": "inequality", "label": ineq.label,
            "coefficients": [rat(c) for c in ineq.coefficients],
            "bound": rat(ineq.bound), "value": rat(ineq.value_at_target)}


def certificate_json(cert) -> dict:
    if isinstance(cert, Decomposition):
        return decomposition_json(cert)
    return inequality_json(cert)


def verdict_json(verdict: MembershipVerdict) -> dict:
    return {"inside": verdict.inside, "certificate": certificate_json(verdict.certificate)}


def dumps(obj, compact: bool = False) -> str:
    if compact:
        return json.dumps(obj, separators=(",", ":"))
    return json.dumps(obj, indent=2)
