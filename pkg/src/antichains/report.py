"""Grid report: exact log2 alpha([t]^n) next to every closed-form bound.

Rows are computed concurrently and assembled in (t, n) order, so the output
bytes depend only on the inputs.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor

from . import bounds
from .counting import DP_MAX_WIDTH, grid_alpha
from .poset import PosetSizeError
from .rounding import DEFAULT_PRECISION, Interval, exact_digits, format_up, nearest

COLUMNS = ["t", "n", "N", "log2_alpha", "lower_trivial", "thm11", "thm12", "thm14", "thm15",
           "tightest", "ratio"]
BOUND_COLUMNS = ["thm11", "thm12", "thm14", "thm15"]


def _mid(x):
    with nearest(x.precision):
        return format(x.mid, ".6g")


def report_row(t, n, cache=None, precision=DEFAULT_PRECISION, max_width=DP_MAX_WIDTH):
    """One row as a dict of strings; cells that do not apply are empty.

    ``ratio`` is log2(alpha) / N, empty when alpha is out of reach.
    """
    try:
        alpha = grid_alpha(t, n, cache, max_width=max_width)
    except PosetSizeError:
        alpha = None
    rep = bounds.closed_form_bounds(t, n, alpha=alpha, precision=precision)
    N = exact_digits(rep.N)
    row = {"t": str(t), "n": str(n), "N": N, "lower_trivial": N}
    la = None
    if alpha is not None:
        la = Interval(alpha, precision=precision).log2()
        row["log2_alpha"] = _mid(la)
        row["ratio"] = _mid(la / rep.N)
    else:
        row["log2_alpha"] = row["ratio"] = ""
    for name in BOUND_COLUMNS:
        e = rep.entry(name)
        row[name] = e.decimal() if e.applicable and e.value is not None else ""
    best = rep.tightest_upper()
    row["tightest"] = format_up(best.value.hi, 6) if best is not None else ""
    return row


def build_report(t_values, n_values, cache=None, threads=1, precision=DEFAULT_PRECISION):
    cells = [(t, n) for t in t_values for n in n_values]
    if not cells:
        raise ValueError("empty t or n range")
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda c: report_row(*c, cache, precision), cells))
    return [report_row(t, n, cache, precision) for t, n in cells]


def to_csv(rows):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def to_json(rows):
    doc = [{k: (row[k] if row[k] != "" else None) for k in COLUMNS} for row in rows]
    return json.dumps(doc, indent=1) + "\n"
