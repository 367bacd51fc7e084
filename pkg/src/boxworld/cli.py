"""Command-line entry point: ``boxworld <subcommand> ...``.

Results go to stdout as JSON (or CSV where ``--format csv`` applies);
diagnostics go to stderr. Exit codes: 0 success, 2 unreadable input,
3 input that parses but is not a valid correlation array, 1 otherwise.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import mpmath

from . import boxes, correlations, infocausality, nogo, polytope, serialize
from .errors import (
    BoxworldError, CellNotNormalized, DomainError, NegativeProbability, ParseError,
    UnknownCatalogEntry,
)

EXIT_PARSE = 2
EXIT_INVALID = 3


class CliError(Exception):
    def __init__(self, message, code=1):
        super().__init__(message)
        self.code = code


# --- input helpers -----------------------------------------------------------

def load_array(source: str) -> correlations.CorrelationArray:
    """Catalog name, inline JSON, a file path, or ``-`` for stdin."""
    if source in serialize.CATALOG_NAMES:
        arr = serialize.catalog(source)
        return serialize.exact_view(arr)
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith("{"):
        text = source
    elif os.path.exists(source):
        with open(source) as fh:
            text = fh.read()
    else:
        raise UnknownCatalogEntry(
            f"{source!r} is not a catalog name, JSON object or file; "
            f"catalog: {', '.join(serialize.CATALOG_NAMES)}")
    return serialize.array_from_json(text)


def _angles(text):
    if text is None:
        return None
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise CliError(f"bad --angles {text!r}", EXIT_PARSE) from exc
    if len(vals) != 4 or not all(math.isfinite(v) for v in vals):
        raise CliError("--angles needs four finite numbers a0,a1,b0,b1", EXIT_PARSE)
    return boxes.QuantumBoxSettings(*vals)


def _mp(v, digits=30):
    return mpmath.nstr(v, digits)


def _emit(obj, fmt="json", rows=None, header=None):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(serialize.dumps(obj) + "\n")


# --- subcommands -------------------------------------------------------------

def classify_array(arr: correlations.CorrelationArray) -> dict:
    report = correlations.signaling_report(arr)
    stats = correlations.chsh(arr)
    ns = polytope.membership_nosignaling(arr)
    if report.no_signaling:
        local = polytope.membership_local(arr)
    else:
        # the signaling witness separates the local vertices too
        local = polytope.MembershipVerdict(False, ns.certificate)
    out = {
        "valid": True,
        "flags": ["inexact-input"] if arr.inexact_input else [],
        "signaling": {
            "bob_to_alice": report.bob_to_alice,
            "alice_to_bob": report.alice_to_bob,
            "witnesses": [
                {"party": w.party, "outcome": w.outcome, "local_input": w.local_input,
                 "values": [serialize.rat(v) for v in w.values]}
                for w in report.witnesses],
        },
        "expectations": {f"{x}{y}": serialize.rat(v) for (x, y), v in stats.expectations.items()},
        "K": serialize.rat(stats.K),
        "E": serialize.rat(stats.E),
        "sim_success": serialize.rat(correlations.sim_success_probability(arr)),
        "local": local.inside,
        "nosignaling": ns.inside,
        "certificates": {"local": serialize.certificate_json(local.certificate),
                         "nosignaling": serialize.certificate_json(ns.certificate)},
    }
    if report.no_signaling:
        out["chsh_facets"] = [{"id": i, "value": serialize.rat(v), "satisfied": ok}
                              for i, v, ok in polytope.chsh_facet_check(arr)]
    return out


def cmd_classify(args):
    _emit(classify_array(load_array(args.input)))


def cmd_catalog(args):
    if args.name is None:
        _emit({"entries": list(serialize.CATALOG_NAMES)})
        return
    obj = serialize.catalog_json(args.name)
    if args.format == "csv":
        arr = serialize.catalog(args.name)
        rows = [(x, y, a, b, serialize.num(arr[x, y, a, b])) for x, y, a, b in correlations.INDEX]
        _emit(None, "csv", rows, ("x", "y", "a", "b", "p"))
    else:
        sys.stdout.write(serialize.dumps(obj, compact=True) + "\n")


def cmd_decompose(args):
    arr = load_array(args.input)
    vset = polytope.vertex_set(args.vertices)
    if not polytope.in_hull(arr, vset).feasible:
        raise CliError(f"array lies outside the hull of the {args.vertices!r} vertices", 1)
    out = {"vertices": args.vertices,
           "decomposition": serialize.decomposition_json(polytope.decompose(arr, vset))}
    if args.two:
        res = polytope.two_decompositions(arr, vset)
        if isinstance(res, polytope.Unique):
            out["unique"] = True
        else:
            out["unique"] = False
            out["alternatives"] = [serialize.decomposition_json(d) for d in res]
    _emit(out)


def cmd_vertices(args):
    rows = []
    for v in correlations.enumerate_vertices():
        if args.set == "local" and v.tag != "local":
            continue
        outs = "".join(f"{a}{b}" for a, b in v.outputs)
        rows.append((v.id, outs, v.tag, v.local_label or ""))
    if args.set == "nosignaling":
        rows = [r for r in rows if r[2] == "local"]
        rows += [(f"pr{k}", "", "pr", "") for k in range(len(correlations.pr_orbit()))]
    header = ("id", "outputs", "tag", "label")
    obj = {"set": args.set, "count": len(rows),
           "vertices": [dict(zip(header, r)) for r in rows]}
    _emit(obj, args.format, rows, header)


def cmd_dimension(args):
    vset = polytope.vertex_set(args.set)
    _emit({"set": args.set, "vertices": len(vset), "dimension": polytope.affine_dimension(vset)})


def cmd_simulate(args):
    settings = _angles(args.angles)
    if args.kind == "quantum" and settings is None:
        settings = boxes.TSIRELSON_SETTINGS
    session = boxes.run_session(args.kind, args.rounds, args.seed, order=args.order,
                                settings=settings, disclose_lambda=args.disclose_lambda)
    header = ("x", "y", "a", "b") + (("lambda",) if session.lam is not None else ())
    if args.format == "csv":
        _emit(None, "csv", session.rounds(), header)
        return
    emp = boxes.empirical_array(session)
    target = boxes.analytic_array(args.kind, settings)
    out = {
        "kind": args.kind, "seed": args.seed, "rounds": args.rounds,
        "order": session.order,
        "angles": None if session.settings is None else [
            session.settings.alpha0, session.settings.alpha1,
            session.settings.beta0, session.settings.beta1],
        "disclose_lambda": session.lam is not None,
        "columns": list(header),
        "log": [list(r) for r in session.rounds()],
        "empirical": {"p": emp.p.tolist(), "stderr": emp.stderr.tolist(),
                      "counts": emp.counts.tolist()},
        "max_cell_tv_to_analytic": emp.total_variation(target),
    }
    _emit(out)


def cmd_game(args):
    res = boxes.guessing_game_n1(args.kind, args.rounds, args.seed,
                                 settings=_angles(args.angles), order=args.order)
    _emit({"kind": res.kind, "seed": res.seed, "rounds": res.rounds,
           "successes": res.successes, "P_k": res.empirical, "stderr": res.stderr,
           "analytic": res.analytic})


def _report_json(rep) -> dict:
    return {"E": _mp(rep.E), "n": rep.n, "P_k": _mp(rep.P_k), "entropy": _mp(rep.entropy),
            "bound": _mp(rep.bound), "deficit": _mp(rep.deficit),
            "violated": rep.violated, "precision": rep.precision}


def cmd_ic(args):
    rep = infocausality.ic_report(args.E, args.n, args.precision)
    out = _report_json(rep)
    out["strength"] = infocausality.classify_strength(args.E)
    _emit(out)


def cmd_ic_scan(args):
    reports = infocausality.ic_scan(args.E, args.n_max, args.precision)
    first = next((r.n for r in reports if r.violated), None)
    rows = [(r.n, _mp(r.P_k), _mp(r.entropy), _mp(r.bound), _mp(r.deficit), r.violated)
            for r in reports]
    header = ("n", "P_k", "entropy", "bound", "deficit", "violated")
    obj = {"E": args.E, "n_max": args.n_max, "minimal_violation_n": first,
           "rows": [dict(zip(header, r)) for r in rows]}
    _emit(obj, args.format, rows, header)


def _read_vector(path):
    with open(path) as fh:
        data = json.load(fh)
    return [complex(re, im) for re, im in data]


def _read_matrix(path):
    with open(path) as fh:
        data = json.load(fh)
    return [[complex(re, im) for re, im in row] for row in data]


def cmd_nogo(args):
    if args.what == "pbr":
        table = nogo.pbr_table()
        preps = [name for name, _ in nogo.PBR_PREPARATIONS]
        outs = [name for name, _ in nogo.PBR_OUTCOMES]
        zeros = [[bool(v < 1e-10) for v in row] for row in table]
        if args.format == "csv":
            rows = [(preps[i],) + tuple(f"{v:.17g}" + ("*" if zeros[i][j] else "")
                                        for j, v in enumerate(row))
                    for i, row in enumerate(table)]
            _emit(None, "csv", rows, ("preparation",) + tuple(outs))
        else:
            _emit({"preparations": preps, "outcomes": outs, "probabilities": table.tolist(),
                   "zero": zeros, "row_sums": table.sum(axis=1).tolist()})
        return
    if not args.state or not args.observable:
        raise CliError("nogo project needs --state and --observable", EXIT_PARSE)
    try:
        e = _read_vector(args.state)
        R = _read_matrix(args.observable)
    except (OSError, ValueError, TypeError) as exc:
        raise CliError(f"cannot read state/observable: {exc}", EXIT_PARSE) from exc
    branches = nogo.preferred_projections(e, R)
    _emit({"branches": [{"eigenvalue": b.eigenvalue, "weight": b.weight,
                         "state": [[z.real, z.imag] for z in b.state]} for b in branches]})


# --- parser ------------------------------------------------------------------

def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _pos_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxworld",
        description="Exact analysis of two-party binary-input/binary-output correlations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="signaling, CHSH and polytope membership of an array")
    p.add_argument("input", help="catalog name, corr-array-v1 JSON, file path, or - for stdin")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("catalog", help="emit a built-in array as compact JSON")
    p.add_argument("name", nargs="?", choices=serialize.CATALOG_NAMES)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("decompose", help="convex decomposition over a vertex set")
    p.add_argument("input")
    p.add_argument("--vertices", choices=("local", "nosignaling", "all"), default="local")
    p.add_argument("--two", action="store_true", help="also look for a second decomposition")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("vertices", help="list deterministic (and PR) vertices")
    p.add_argument("--set", choices=("all", "local", "nosignaling"), default="all")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("dimension", help="affine dimension of a vertex set")
    p.add_argument("--set", choices=("all", "local", "nosignaling"), default="all")
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("simulate", help="seeded box session with empirical array")
    p.add_argument("--kind", choices=("pr", "bohm", "quantum"), required=True)
    p.add_argument("--rounds", type=_pos_int, required=True)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--disclose-lambda", action="store_true")
    p.add_argument("--order", choices=boxes.ORDERS, default="alice-first")
    p.add_argument("--angles", help="a0,a1,b0,b1 in radians (quantum only)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("game", help="n=1 guessing game with one box per round")
    p.add_argument("--kind", choices=boxes.KINDS, required=True)
    p.add_argument("--rounds", type=_pos_int, default=100000)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--order", choices=boxes.ORDERS, default="alice-first")
    p.add_argument("--angles")
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("ic", help="information-causality report for one (E, n)")
    p.add_argument("--E", required=True, help='decimal, fraction, or "1/sqrt2"')
    p.add_argument("--n", type=_pos_int, required=True)
    p.add_argument("--precision", type=_pos_int, default=infocausality.DEFAULT_PREC)
    p.set_defaults(func=cmd_ic)

    p = sub.add_parser("ic-scan", help="information-causality deficits for n = 1..n-max")
    p.add_argument("--E", required=True)
    p.add_argument("--n-max", type=_pos_int, required=True)
    p.add_argument("--precision", type=_pos_int, default=infocausality.DEFAULT_PREC)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_ic_scan)

    p = sub.add_parser("nogo", help="PBR table or preferred-observable projection")
    p.add_argument("what", choices=("pbr", "project"))
    p.add_argument("--state", help="JSON list of [re, im] amplitudes")
    p.add_argument("--observable", help="JSON row-major matrix of [re, im] entries")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_nogo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"boxworld: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, UnknownCatalogEntry, DomainError) as exc:
        print(f"boxworld: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NegativeProbability, CellNotNormalized) as exc:
        print(f"boxworld: invalid array: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (BoxworldError, ValueError) as exc:
        print(f"boxworld: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
