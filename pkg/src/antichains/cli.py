"""Command-line entry point: ``antichains {count,bounds,chains,verify,report}``.

Exit codes: 0 success, 1 an inequality violation was found, 2 usage or size error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import bounds, chains, report, suites
from .counting import (CountCache, WeightAssignment, count_antichains_dp,
                       count_antichains_oracle, default_cache_dir, grid_alpha,
                       weighted_antichain_sum)
from .poset import (DEFAULT_NODE_BUDGET, Point, PosetFormatError, PosetSizeError, build_grid,
                    load_poset)
from .rounding import DEFAULT_PRECISION, short_count

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("antichains")


class UsageError(Exception):
    pass


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _threads(text):
    if text == "auto":
        return os.cpu_count() or 1
    return _positive_int(text)


def _precision(text):
    value = int(text)
    if value < 24:
        raise argparse.ArgumentTypeError("precision must be at least 24 bits")
    return value


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from exc


def parse_range(text):
    """'2..5' -> [2, 3, 4, 5]; '1,3,7' -> [1, 3, 7]; '4' -> [4]."""
    text = text.strip()
    if ".." in text:
        lo, hi = (int(x) for x in text.split("..", 1))
        values = list(range(lo, hi + 1))
    else:
        values = [int(x) for x in text.split(",") if x.strip()]
    if any(v < 1 for v in values):
        raise UsageError(f"range {text!r} contains values below 1")
    return values


def _common(parser):
    parser.add_argument("--cache-dir", type=Path, default=None,
                        help="count cache directory (default: $ANTICHAIN_CACHE_DIR or ~/.cache/antichains)")
    parser.add_argument("--precision", type=_precision, default=DEFAULT_PRECISION,
                        help="working precision in bits for bound arithmetic (default 128)")
    parser.add_argument("--node-budget", type=_positive_int, default=DEFAULT_NODE_BUDGET,
                        help="largest grid that may be materialized (default 1e6 points)")
    parser.add_argument("--threads", type=_threads, default=1, help="worker threads, or 'auto'")
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    _common(common)
    parser = argparse.ArgumentParser(prog="antichains", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="exact antichain count or weighted sum")
    p.add_argument("--t", type=_positive_int)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--poset", type=Path, help="graded-poset JSON file instead of a grid")
    p.add_argument("--engine", choices=["dp", "oracle", "weighted"], default="dp")
    p.add_argument("--lambda", dest="lam", default=None,
                   help="comma-separated per-level weights for --engine weighted")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("bounds", parents=[common], help="closed-form bounds for [t]^n")
    p.add_argument("--t", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--C", type=_fraction, default=Fraction(15))
    p.add_argument("--epsilon", type=_fraction, default=Fraction(1, 10))
    p.add_argument("--epsilon-prime", type=_fraction, default=Fraction(1, 10))
    p.add_argument("--format", choices=["table", "json"], default="table")

    p = sub.add_parser("chains", parents=[common], help="bracket-matching chain partition")
    p.add_argument("--t", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--verify", action="store_true", help="print the verification report")
    p.add_argument("--emit", default=None, help="write the chains as JSON to a file ('-' for stdout)")
    p.add_argument("--point", default=None, help="comma-separated point whose chain is printed")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=[*suites.SUITES, "all"])
    p.add_argument("--seed", type=int, default=suites.DEFAULT_SEED)
    p.add_argument("--trials", type=_positive_int, default=None)
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--out-dir", type=Path, default=Path("counterexamples"),
                   help="where counterexamples are written (default ./counterexamples)")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("report", parents=[common], help="bounds against exact counts over a grid")
    p.add_argument("--t", default="2..3")
    p.add_argument("--n", default="1..4")
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _cache(args):
    return CountCache(args.cache_dir or default_cache_dir())


def cmd_count(args, out):
    if args.poset is not None:
        if args.t or args.n:
            raise UsageError("give either --poset or --t/--n, not both")
        P, grid = load_poset(args.poset), None
    else:
        if not (args.t and args.n):
            raise UsageError("--t and --n are required without --poset")
        P, grid = None, (args.t, args.n)
    start = time.perf_counter()
    cached = False
    if args.engine == "weighted":
        if P is None:
            P = build_grid(*grid, node_budget=args.node_budget)
        levels = [_fraction(x) for x in args.lam.split(",")] if args.lam else [1] * P.k
        if len(levels) == 1:
            levels = levels * P.k
        value = weighted_antichain_sum(P, WeightAssignment(tuple(levels)))
    elif args.engine == "oracle":
        if P is None:
            P = build_grid(*grid, node_budget=args.node_budget)
        value = count_antichains_oracle(P)
    elif P is not None:
        value = count_antichains_dp(P)
    else:
        cache = _cache(args)
        cached = cache.get(*grid) is not None
        value = grid_alpha(*grid, cache, node_budget=args.node_budget)
    elapsed = time.perf_counter() - start
    if args.format == "json":
        doc = {"engine": args.engine, "value": str(value), "cache_hit": cached,
               "seconds": round(elapsed, 6)}
        if grid:
            doc.update(t=grid[0], n=grid[1])
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        out.write(f"{value}\n")
    return EXIT_OK


def cmd_bounds(args, out):
    params = bounds.Section4Params(args.t, args.n, args.C, args.epsilon, args.epsilon_prime,
                                   args.precision)
    alpha = _cache(args).get(args.t, args.n)
    rep = bounds.closed_form_bounds(args.t, args.n, params, alpha, args.precision)
    if args.format == "json":
        doc = rep.to_dict()
        doc["violations"] = rep.violations()
        out.write(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    else:
        rows = [("bound", "kind", "of", "value", "applicable", "anchor")]
        for e in rep.entries:
            rows.append((e.name, e.kind, e.quantity, e.decimal() or "-", "yes" if e.applicable else "no",
                         e.anchor))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        for r in rows:
            out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
        out.write(f"\nN({args.t},{args.n}) = {short_count(rep.N)}\n")
        if alpha is not None:
            out.write(f"exact alpha = {alpha}, log2 alpha = {rep.to_dict()['log2_alpha']}\n")
        else:
            out.write("exact alpha not cached (run `antichains count` first)\n")
        d = rep.section4.to_dict() if rep.section4 is not None else {}
        out.write("\nlarge-n assembly:\n")
        for key in ("applicable", "p", "s", "low_point_bound", "low_points_exact", "tilde_bound",
                    "hat_bound", "assembled", "main_bound", "ok", "note"):
            if key in d and d[key] not in (None, ""):
                out.write(f"  {key}: {d[key]}\n")
    return EXIT_VIOLATION if rep.violations() else EXIT_OK


def cmd_chains(args, out):
    D = chains.decompose(args.t, args.n, node_budget=args.node_budget, check=False)
    rep = chains.verify_decomposition(D)
    if args.emit:
        doc = json.dumps(D.to_dict()) + "\n"
        if args.emit == "-":
            out.write(doc)
        else:
            Path(args.emit).write_text(doc)
    if args.point:
        coords = tuple(int(x) for x in args.point.split(","))
        x = Point(coords, args.t)
        if x.n != args.n:
            raise UsageError(f"point has {x.n} coordinates, expected {args.n}")
        out.write(json.dumps({"point": list(coords), "chain": [list(y) for y in D.chain_of(x)]}) + "\n")
    if args.verify or not (args.emit or args.point):
        doc = rep.to_dict()
        doc["sizes"] = D.sizes()
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_verify(args, out):
    results = suites.run_suite(args.suite, seed=args.seed, trials=args.trials, n=args.n,
                               out_dir=args.out_dir, precision=args.precision,
                               cache=_cache(args))
    if args.format == "json":
        out.write(suites.results_json(results) + "\n")
    else:
        for r in results:
            out.write(r.summary() + "\n")
            if not r.ok:
                out.write(f"  first counterexample: {json.dumps(r.counterexample, default=str)}\n")
    return EXIT_OK if all(r.ok for r in results) else EXIT_VIOLATION


def cmd_report(args, out):
    ts, ns = parse_range(args.t), parse_range(args.n)
    if not ts or not ns:
        raise UsageError("empty --t or --n range")
    rows = report.build_report(ts, ns, _cache(args), args.threads, args.precision)
    text = report.to_csv(rows) if args.format == "csv" else report.to_json(rows)
    if args.out == "-":
        out.write(text)
    else:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc
    return EXIT_OK


COMMANDS = {"count": cmd_count, "bounds": cmd_bounds, "chains": cmd_chains,
            "verify": cmd_verify, "report": cmd_report}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, PosetSizeError, PosetFormatError, ValueError, OSError) as exc:
        print(f"antichains {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
