"""Upper and lower bounds on antichain counts, evaluated with directed rounding.

All bounds on alpha are expressed in log2 scale.  Upper bounds report the
upper endpoint of an outward-rounded interval, lower bounds the lower one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .counting import WeightAssignment, count_antichains_dp
from .poset import (INFINITY, SubposetSpec, build_grid, lower_part, middle_layer_size,
                    neighbors_in_level, subposet)
from .rounding import (DEFAULT_PRECISION, Interval, UpperReal, down, exact_digits, format_down,
                       format_up, nearest, short_count, to_mpq, up)


class _Indexed:
    """Bitmask view of a LeveledPoset: node i <-> bit i."""

    def __init__(self, P):
        self.P = P
        self.nodes = P.nodes()
        self.index = {v: i for i, v in enumerate(self.nodes)}
        self.level = [P.level_of(v) for v in self.nodes]
        self.level_mask = [0] * P.k
        self.up = [0] * len(self.nodes)
        self.down = [0] * len(self.nodes)
        for i, v in enumerate(self.nodes):
            self.level_mask[self.level[i]] |= 1 << i
            for w in P.up(v):
                self.up[i] |= 1 << self.index[w]
            for w in P.down(v):
                self.down[i] |= 1 << self.index[w]
        self.full = (1 << len(self.nodes)) - 1

    def mask(self, nodes):
        m = 0
        for v in nodes:
            m |= 1 << self.index[v]
        return m

    def strictly_below(self, i, within):
        acc = 0
        frontier = self.down[i] & within
        while frontier:
            acc |= frontier
            nxt = 0
            for j in _bits(frontier):
                nxt |= self.down[j]
            frontier = nxt & within & ~acc
        return acc


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _level_weights(P, lam):
    if lam is None:
        lam = WeightAssignment.uniform(P.k)
    if isinstance(lam, WeightAssignment):
        if lam.overrides:
            raise ValueError("f_P takes per-level weights only")
        lam = lam.levels
    lam = tuple(Fraction(x) for x in lam)
    if len(lam) < P.k:
        raise ValueError(f"{len(lam)} weights given for {P.k} levels")
    if any(x < 0 for x in lam):
        raise ValueError("level weights must be nonnegative")
    return lam


class FEvaluator:
    """Evaluates the recursive functional f on induced subposets of ``P``.

    The top level of a (sub)poset is its highest nonempty level.  For each top
    node v with lower covers, the factor is
    ((1+lam_top)^d + f(below v) - 1)^(1/d) where d is the least number of
    upper covers (inside the subposet) among v's lower covers; a top node
    with no lower covers contributes 1+lam_top.  The empty poset has f = 1.
    Results are memoized on the node bitmask.
    """

    def __init__(self, P, lam=None, precision=DEFAULT_PRECISION, rounding="up"):
        if rounding not in ("up", "down"):
            raise ValueError("rounding must be 'up' or 'down'")
        self.ix = _Indexed(P)
        self.lam = _level_weights(P, lam)
        self.precision = precision
        self.rounding = rounding
        with self._ctx():
            self.one_plus = [mpfr(to_mpq(1 + x)) for x in self.lam]
        self.memo = {0: mpfr(1)}

    def _ctx(self):
        return up(self.precision) if self.rounding == "up" else down(self.precision)

    def value(self, mask=None):
        if mask is None:
            mask = self.ix.full
        with self._ctx():
            return self._f(mask)

    def _f(self, mask):
        hit = self.memo.get(mask)
        if hit is not None:
            return hit
        ix = self.ix
        top = max(lvl for lvl in range(len(ix.level_mask)) if ix.level_mask[lvl] & mask)
        result = mpfr(1)
        for v in _bits(ix.level_mask[top] & mask):
            lower = ix.down[v] & mask
            if not lower:
                result *= self.one_plus[top]
                continue
            d = min(gmpy2.popcount(ix.up[w] & mask) for w in _bits(lower))
            inner = self._f(ix.strictly_below(v, mask))
            result *= gmpy2.root(self.one_plus[top] ** d + inner - 1, d)
        self.memo[mask] = result
        return result


def f_P(P, lam=None, precision_bits=DEFAULT_PRECISION):
    """Upward-rounded value of the recursive bound f_P(lam_1, ..., lam_k)."""
    return UpperReal(FEvaluator(P, lam, precision_bits, "up").value(), precision_bits)


def f_P_interval(P, lam=None, precision_bits=DEFAULT_PRECISION):
    lo = FEvaluator(P, lam, precision_bits, "down").value()
    hi = FEvaluator(P, lam, precision_bits, "up").value()
    return Interval(lo, hi, precision_bits)


def inherited_below_values(P, lam=None, precision=DEFAULT_PRECISION):
    """Upward-rounded g(v) for every node, with degrees inherited from ``P``.

    g(v) = prod over lower covers u of v of ((1+lam_u)^d + g(u) - 1)^(1/d),
    where d is the least up-degree in ``P`` among u's lower covers; a lower
    cover with nothing below it contributes 1+lam_u.  This is the recursion
    for f on the part below v, except that degrees are never recomputed
    inside the smaller poset (recomputing can only shrink them, which makes
    the value larger).
    """
    lam = _level_weights(P, lam)
    out = {}
    with up(precision):
        one_plus = [mpfr(to_mpq(1 + x)) for x in lam]
        for level in P.levels:
            for v in level:
                g = mpfr(1)
                for u in P.down(v):
                    lu = P.level_of(u)
                    if not P.down(u):
                        g *= one_plus[lu]
                        continue
                    d = min(len(P.up(w)) for w in P.down(u))
                    g *= gmpy2.root(one_plus[lu] ** d + out[u] - 1, d)
                out[v] = g
    return out


def thm31_rhs(G, precision_bits=DEFAULT_PRECISION):
    """Product over v in A of [(1+mu)^d + prod_{u in N(v)} (1+lam_u) - 1]^(1/d).

    d is the least degree among v's neighbours; an isolated v contributes
    1+mu.  Vertices of B without neighbours are not accounted for, matching
    the covering hypothesis of the inequality.
    """
    if G.mu < 1 or any(x < 1 for x in G.lam.values()):
        raise ValueError("the two-level bound requires every weight >= 1")
    degree = {u: G.degree(u) for u in G.B}
    with up(precision_bits):
        one_mu = mpfr(to_mpq(1 + G.mu))
        result = mpfr(1)
        for v in G.A:
            nbrs = G.neighbors(v)
            if not nbrs:
                result *= one_mu
                continue
            d = min(degree[u] for u in nbrs)
            prod = mpfr(1)
            for u in sorted(nbrs, key=repr):
                prod *= mpfr(to_mpq(1 + G.lam[u]))
            result *= gmpy2.root(one_mu ** d + prod - 1, d)
    return UpperReal(result, precision_bits)


# ---------------------------------------------------------------------------
# closed forms


def _dec(x):
    return Fraction(str(x))


@dataclass
class Section4Params:
    t: int
    n: int
    C: Fraction = Fraction(15)
    epsilon: Fraction = Fraction(1, 10)
    epsilon_prime: Fraction = Fraction(1, 10)
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        self.C = _dec(self.C)
        self.epsilon = _dec(self.epsilon)
        self.epsilon_prime = _dec(self.epsilon_prime)
        if self.t < 1 or self.n < 1:
            raise ValueError(f"need t >= 1 and n >= 1, got t={self.t}, n={self.n}")

    @property
    def applicable(self):
        """t < n / (100 log2 n), decided with certainty (n >= 2)."""
        return large_n_applicable(self.t, self.n, self.precision)


def large_n_applicable(t, n, precision=DEFAULT_PRECISION):
    if n < 2:
        return False
    return (Interval(100 * t, precision=precision) * Interval(n, precision=precision).log2()).hi < n


@dataclass
class BoundEntry:
    name: str
    anchor: str
    kind: str          # "upper", "lower" or "approx"
    quantity: str      # "log2_alpha" or "N"
    value: Interval | int | None
    applicable: bool
    note: str = ""

    def decimal(self, digits=6):
        if self.value is None:
            return ""
        if isinstance(self.value, int):
            return short_count(self.value)
        if self.kind == "upper":
            return format_up(self.value.hi, digits)
        if self.kind == "lower":
            return format_down(self.value.lo, digits)
        with nearest(self.value.precision):
            return format(self.value.mid, f".{digits}g")

    def to_dict(self):
        return {"name": self.name, "anchor": self.anchor, "kind": self.kind,
                "quantity": self.quantity, "value": self.decimal(),
                "applicable": self.applicable, "note": self.note}


@dataclass
class BoundReport:
    t: int
    n: int
    N: int
    entries: list
    alpha: int | None = None
    section4: object = None

    @property
    def log2_alpha(self):
        return None if self.alpha is None else Interval(self.alpha).log2()

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def tightest_upper(self):
        best = None
        for e in self.entries:
            if e.kind == "upper" and e.quantity == "log2_alpha" and e.applicable:
                if best is None or e.value.hi < best.value.hi:
                    best = e
        return best

    def violations(self):
        """Applicable bounds contradicted by the exact count (empty when alpha unknown)."""
        if self.alpha is None:
            return []
        la = self.log2_alpha
        bad = []
        for e in self.entries:
            if not e.applicable or e.quantity != "log2_alpha":
                continue
            if e.kind == "upper" and not la.lo <= (e.value.hi if isinstance(e.value, Interval) else e.value):
                bad.append(e.name)
            if e.kind == "lower":
                lower = e.value if isinstance(e.value, int) else e.value.lo
                if not lower <= la.hi:
                    bad.append(e.name)
        return bad

    def to_dict(self):
        doc = {"t": self.t, "n": self.n, "N": exact_digits(self.N),
               "bounds": [e.to_dict() for e in self.entries],
               "alpha": None if self.alpha is None else str(self.alpha),
               "log2_alpha": None if self.alpha is None else format(self.log2_alpha.mid, ".6g")}
        if self.section4 is not None:
            doc["section4"] = self.section4.to_dict()
        return doc


def _I(x, precision):
    return Interval(x, precision=precision)


def closed_form_bounds(t, n, params=None, alpha=None, precision=DEFAULT_PRECISION):
    """All closed-form bounds for [t]^n, each with its applicability flag."""
    if params is None:
        params = Section4Params(t, n, precision=precision)
    N = middle_layer_size(t, n)
    I = lambda x: _I(x, precision)  # noqa: E731
    NI = I(N)
    entries = [BoundEntry("lower_trivial", "every subset of a middle layer is an antichain",
                          "lower", "log2_alpha", N, True)]

    if 1 < t < n:
        g = I(11 * t * t) * I(t).log2() * I(n).log2() ** Fraction(3, 2) / I(n) ** Fraction(1, 4)
        entries.append(BoundEntry("thm11", "Carroll-Cooper-Tetali bound", "upper", "log2_alpha",
                                  (1 + g) * NI, True))
    else:
        entries.append(BoundEntry("thm11", "Carroll-Cooper-Tetali bound", "upper", "log2_alpha",
                                  None, False, "requires 1 < t < n"))

    entries.append(BoundEntry("thm12", "Tsai bound N log2(t+1)", "upper", "log2_alpha",
                              NI * I(t + 1).log2(), True))

    thm14 = (1 + 4 * I(3).log2() / n) * NI
    entries.append(BoundEntry("thm14", "[3]^n entropy bound (1 + 4 log2(3)/n) N", "upper",
                              "log2_alpha", thm14 if t == 3 else None, t == 3,
                              "" if t == 3 else "only for t = 3"))

    applicable15 = params.applicable
    if n >= 2:
        g15 = (I(t) * I(n).log2() ** 3 / n).sqrt()
        thm15 = (1 + I(params.C) * g15) * NI
    else:
        thm15 = None
    entries.append(BoundEntry("thm15", "large-n entropy bound (1 + C (t log^3 n / n)^(1/2)) N",
                              "upper", "log2_alpha", thm15, applicable15,
                              f"C = {params.C} (absolute constant not determined)"
                              + ("" if applicable15 else "; requires t < n/(100 log2 n)")))

    lem = 2 * I(t) ** (n - 1) / (3 * I(n).sqrt())
    entries.append(BoundEntry("lemma42", "middle layer lower bound 2 t^(n-1) / (3 sqrt n)",
                              "lower", "N", lem, True))
    if t >= 2:
        with down(precision):
            pi_lo = gmpy2.const_pi()
        with up(precision):
            pi_hi = gmpy2.const_pi()
        pi = Interval(pi_lo, pi_hi, precision)
        approx = I(t) ** n * (6 / (pi * (t * t - 1) * n)).sqrt()
        entries.append(BoundEntry("eq12", "asymptotic middle layer size", "approx", "N", approx,
                                  True, "asymptotic in n; not a bound"))
    else:
        entries.append(BoundEntry("eq12", "asymptotic middle layer size", "approx", "N", None,
                                  False, "undefined for t = 1"))

    diag = section4_diagnostics(params) if t >= 2 else Section4Diagnostics.inapplicable(params)
    return BoundReport(t, n, N, entries, alpha, diag)


# ---------------------------------------------------------------------------
# large-n assembly


@dataclass
class Section4Diagnostics:
    t: int
    n: int
    applicable: bool
    p: Interval | None = None
    s: Interval | None = None
    low_point_bound: Interval | None = None
    low_points_exact: int | None = None
    tilde_bound: Interval | None = None
    hat_bound: Interval | None = None
    assembled: Interval | None = None
    main_bound: Interval | None = None
    scale: Interval | None = None     # (t log^3 n / n)^(1/2)
    N: int | None = None
    ok: bool | None = None
    note: str = ""

    @classmethod
    def inapplicable(cls, params, note="t = 1: p is undefined"):
        return cls(params.t, params.n, False, note=note)

    def to_dict(self):
        def up_(x):
            return None if x is None else format_up(x.hi, 6)

        def mid(x):
            return None if x is None else format(x.mid, ".6g")

        return {"applicable": self.applicable, "p": mid(self.p), "s": mid(self.s),
                "low_point_bound": up_(self.low_point_bound),
                "low_points_exact": None if self.low_points_exact is None else str(self.low_points_exact),
                "tilde_bound": up_(self.tilde_bound), "hat_bound": up_(self.hat_bound),
                "assembled": up_(self.assembled),
                "main_bound": None if self.main_bound is None else format_down(self.main_bound.lo, 6),
                "ok": self.ok, "note": self.note}


LOW_POINT_EXACT_MAX_N = 200


def section4_diagnostics(params):
    """Evaluate the closed-form pieces of the large-n entropy argument."""
    from .poset import count_low_points

    t, n, prec = params.t, params.n, params.precision
    if t < 2:
        return Section4Diagnostics.inapplicable(params)
    if (t - 1) * n < 2:
        return Section4Diagnostics.inapplicable(params, "(t-1) n = 1: p = 0 and s is undefined")
    I = lambda x: _I(x, prec)  # noqa: E731
    N = middle_layer_size(t, n)
    NI = I(N)
    log_n = I(n).log2()
    L1 = I((t - 1) * n).log2()                      # log((t-1)n)
    L2 = (I(t).sqrt() * ((t - 1) * n)).log2()       # log(t^(1/2)(t-1)n)
    p = (I(t) * L1 / n).sqrt()
    s = L2 / p
    low = (t - 1) * I(t) ** n * (I(-n) / (8 * t)).exp()
    root_tn = I(t).sqrt() / I(n).sqrt()
    tilde = (2 + I(params.epsilon)) * NI * root_tn * L1 ** Fraction(3, 2)
    hat = NI * (1 + (4 + 2 * I(params.epsilon_prime)) * root_tn * L2 ** Fraction(3, 2))
    assembled = tilde + hat
    scale = (I(t) * log_n ** 3 / n).sqrt()
    main = (1 + I(params.C) * scale) * NI
    exact_low = count_low_points(t, n) if n <= LOW_POINT_EXACT_MAX_N else None
    applicable = params.applicable
    return Section4Diagnostics(t, n, applicable, p, s, low, exact_low, tilde, hat, assembled,
                               main, scale, N, assembled.hi <= main.lo,
                               "" if applicable else "t < n/(100 log2 n) fails; values are informative only")


def minimal_empirical_C(grid, epsilon=Fraction(1, 10), epsilon_prime=Fraction(1, 10),
                        precision=DEFAULT_PRECISION, decimals=3):
    """Least multiple C of 10^-decimals with assembled <= main bound on all of ``grid``.

    Found by bisection on the monotone predicate; every grid point must satisfy
    the applicability condition.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    diags = []
    for t, n in grid:
        params = Section4Params(t, n, 0, epsilon, epsilon_prime, precision)
        if not params.applicable:
            raise ValueError(f"(t={t}, n={n}) violates t < n/(100 log2 n)")
        diags.append(section4_diagnostics(params))

    def holds(C):
        Ci = Interval(Fraction(C), precision=precision)
        return all(d.assembled.hi <= ((1 + Ci * d.scale) * d.N).lo for d in diags)

    # bisect over multiples of 10^-decimals
    step = Fraction(1, 10**decimals)
    if holds(0):
        return 0.0
    lo, hi = 0, 1
    while not holds(hi * step):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid * step):
            hi = mid
        else:
            lo = mid
    answer = hi * step
    return float(answer)


# ---------------------------------------------------------------------------
# [3]^n checks


def bottom_half(n):
    return lower_part(build_grid(3, n), n)


@dataclass
class Lemma35Report:
    n: int
    Y: frozenset
    M_size: int
    alpha: int
    log2_bound: Interval
    outer_ok: bool
    inner_ok: bool
    degree_ok: bool
    failures: list = field(default_factory=list)
    # nodes where f recomputed on the part below v (own degrees) exceeds the
    # per-node bound; informative only
    intrinsic_exceedances: int = 0

    @property
    def ok(self):
        return self.outer_ok and self.inner_ok and self.degree_ok


def lemma35_check(n, Y, P=None, precision=DEFAULT_PRECISION):
    """Check the bottom-half bound alpha(bar P_Y) <= 2^{|M(Y)| (1 + 2 log2(3)/n)} for [3]^n.

    Also checks, for every node v of R = bar P_Y on level j >= 1, that the
    value of f on the part of R below v, with degrees inherited from R, is at
    most 2^{d^{j-1}(v) (1 + 1/d_N(v))} (right side degrees taken in the bottom
    half), and that every top node has min neighbour up-degree >= n/2.
    ``P`` may pass a prebuilt bottom half.
    """
    if P is None:
        P = bottom_half(n)
    Y = frozenset(Y)
    bad = [y for y in Y if y not in P or P.level_of(y) != n]
    if bad:
        raise ValueError(f"Y must be a subset of level {n}; offending nodes {bad[:3]!r}")
    R = subposet(P, SubposetSpec("bar_P_Y", Y, level=n))
    m = len(R.levels[n])
    alpha = count_antichains_dp(R)
    # alpha <= 2^{m(1 + 2 log2 3 / n)}  <=>  alpha^n <= 2^{mn} 3^{2m}
    outer_ok = alpha**n <= 2 ** (m * n) * 3 ** (2 * m)
    log2_bound = m * (1 + 2 * Interval(3, precision=precision).log2() / n)

    failures = []
    inherited = inherited_below_values(R, None, precision)
    evaluator = FEvaluator(R, None, precision, "up")
    ix = evaluator.ix
    inner_ok = True
    intrinsic_exceed = 0
    for v in R.nodes():
        j = R.level_of(v)
        if j == 0:
            continue
        dj = len(neighbors_in_level(P, v, j - 1))
        dn = min(len(P.up(w)) for w in P.down(v))
        rhs = Interval(Fraction(dj) * (1 + Fraction(1, dn)), precision=precision).exp2()
        if not inherited[v] <= rhs.lo:
            inner_ok = False
            failures.append(("inner", v, format_up(inherited[v], 8), format_down(rhs.lo, 8)))
        if not evaluator.value(ix.strictly_below(ix.index[v], ix.full)) <= rhs.lo:
            intrinsic_exceed += 1

    degree_ok = True
    for v in R.levels[n]:
        dn = min(len(P.up(w)) for w in P.down(v)) if P.down(v) else INFINITY
        if 2 * dn < n:
            degree_ok = False
            failures.append(("degree", v, dn))
    if not outer_ok:
        failures.append(("outer", alpha, m))
    return Lemma35Report(n, Y, m, alpha, log2_bound, outer_ok, inner_ok, degree_ok, failures,
                         intrinsic_exceed)


def thm14_holds(n, alpha):
    """Exact check of log2(alpha) <= (1 + 4 log2(3)/n) N(3, n) and N(3, n) <= log2(alpha)."""
    N = middle_layer_size(3, n)
    upper = alpha**n <= 2 ** (n * N) * 3 ** (4 * N)
    lower = 2**N <= alpha
    return upper, lower


def structural_fact_violations(n, P=None):
    """Nodes x of [3]^n on level i >= 1 with min-neighbour up-degree - d^{i-1}(x) < n - i."""
    if P is None:
        P = build_grid(3, n)
    bad = []
    for i in range(1, P.k):
        for x in P.levels[i]:
            dn = min(len(P.up(w)) for w in P.down(x))
            if dn - len(P.down(x)) < n - i:
                bad.append((x, i, dn, len(P.down(x))))
    return bad
