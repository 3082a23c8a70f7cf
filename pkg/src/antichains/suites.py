"""Seeded verification suites: each runs one family of checks and reports the first failure.

Every trial draws from its own generator seeded by (seed, suite, trial), so
results do not depend on the order in which trials run.  Counterexamples are
written in the graded-poset JSON format when an output directory is given.
"""
from __future__ import annotations

import itertools
import json
import time
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds, chains, entropy
from .counting import (BipartiteGraph, WeightAssignment, count_antichains_dp,
                       count_antichains_oracle, grid_alpha, independence_poly,
                       weighted_antichain_sum)
from .poset import (LeveledPoset, Point, SubposetSpec, build_grid, count_low_points, dump_poset,
                    is_low, middle_layer_size, subposet)
from .rounding import DEFAULT_PRECISION, Interval

DEFAULT_SEED = int.from_bytes(b"DEDEK1ND", "big")
ENTROPY_TOL = 1e-9


def trial_rng(seed, suite, trial):
    return np.random.default_rng([seed, zlib.crc32(suite.encode()), trial])


# ---------------------------------------------------------------------------
# random instances


def random_leveled_poset(rng, max_nodes=12, max_levels=4, edge_prob=0.5, saturated=False):
    """A random graded poset with nonempty levels and integer node ids.

    With ``saturated`` every node below the top level gets at least one upper
    cover.
    """
    k = int(rng.integers(1, max_levels + 1))
    total = int(rng.integers(k, max_nodes + 1))
    # split total into k positive parts
    cuts = sorted(rng.choice(np.arange(1, total), size=k - 1, replace=False)) if k > 1 else []
    sizes = np.diff([0, *cuts, total])
    levels, nxt = [], 0
    for s in sizes:
        levels.append(list(range(nxt, nxt + int(s))))
        nxt += int(s)
    covers = []
    for i in range(k - 1):
        for a in levels[i]:
            ups = [b for b in levels[i + 1] if rng.random() < edge_prob]
            if saturated and not ups:
                ups = [levels[i + 1][int(rng.integers(len(levels[i + 1])))]]
            covers.extend((a, b) for b in ups)
    return LeveledPoset(levels, covers)


def random_weights(rng, count, lo=1, hi=4, denominator=4):
    """Rationals with the given denominator, uniform on [lo, hi]."""
    return tuple(Fraction(int(rng.integers(lo * denominator, hi * denominator + 1)), denominator)
                 for _ in range(count))


def random_bipartite(rng, max_side=6, edge_prob=0.5):
    """Random bipartite graph in which every B vertex has a neighbour in A."""
    p = int(rng.integers(1, max_side + 1))
    q = int(rng.integers(1, max_side + 1))
    A = [f"a{i}" for i in range(p)]
    B = [f"b{j}" for j in range(q)]
    edges = set()
    for b in B:
        nbrs = [a for a in A if rng.random() < edge_prob]
        if not nbrs:
            nbrs = [A[int(rng.integers(p))]]
        edges.update((a, b) for a in nbrs)
    (mu,) = random_weights(rng, 1)
    lam = dict(zip(B, random_weights(rng, q)))
    return BipartiteGraph(A, B, edges, mu, lam)


def _dirichlet(rng, size, sparsity=0.0):
    w = rng.exponential(size=size)
    if sparsity:
        w[rng.random(size) < sparsity] = 0.0
        if not w.any():
            w[int(rng.integers(size))] = 1.0
    return w / w.sum()


# ---------------------------------------------------------------------------
# results


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    violations: int = 0
    counterexample: dict | None = None
    counterexample_file: str | None = None
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self):
        return self.violations == 0

    def fail(self, example):
        self.violations += 1
        if self.counterexample is None:
            self.counterexample = example

    def to_dict(self):
        return {"suite": self.name, "ok": self.ok, "checks": self.checks,
                "violations": self.violations, "counterexample": self.counterexample,
                "counterexample_file": self.counterexample_file, "details": self.details}

    def summary(self):
        verdict = "PASS" if self.ok else "FAIL"
        line = f"{self.name}: {verdict} ({self.checks} checks, {self.violations} violations)"
        if self.counterexample_file:
            line += f"; counterexample written to {self.counterexample_file}"
        return line


def _persist(result, out_dir, seed, document):
    if out_dir is None or result.counterexample_file is not None:
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"counterexample_{result.name}_{seed}.json"
    path.write_text(document)
    result.counterexample_file = str(path)


def _fr(x):
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# suites


def suite_engines(seed=DEFAULT_SEED, trials=200, out_dir=None, **_):
    """DP engine against the backtracking oracle: small grids and random posets."""
    res = SuiteResult("engines")
    grids = [(t, n) for t in range(1, 33) for n in range(1, 6) if t**n <= 32 and (t > 1 or n == 1)]
    for t, n in grids:
        P = build_grid(t, n)
        a, b = count_antichains_dp(P), count_antichains_oracle(P)
        res.checks += 1
        if a != b:
            res.fail({"grid": [t, n], "dp": str(a), "oracle": str(b)})
    for trial in range(trials):
        P = random_leveled_poset(trial_rng(seed, "engines", trial))
        a, b = count_antichains_dp(P), count_antichains_oracle(P)
        res.checks += 1
        if a != b:
            res.fail({"trial": trial, "dp": str(a), "oracle": str(b)})
            _persist(res, out_dir, seed, dump_poset(P, dp=str(a), oracle=str(b)))
    res.details["grids"] = len(grids)
    return res


def suite_thm33(seed=DEFAULT_SEED, trials=1000, out_dir=None, precision=DEFAULT_PRECISION, **_):
    """Weighted antichain sum <= f_P for random saturated posets and weights in [1, 4]."""
    res = SuiteResult("thm33")
    for trial in range(trials):
        rng = trial_rng(seed, "thm33", trial)
        P = random_leveled_poset(rng, saturated=True)
        lam = random_weights(rng, P.k)
        Z = weighted_antichain_sum(P, lam)
        f = bounds.f_P(P, lam, precision)
        res.checks += 1
        if not f.dominates(Z):
            ex = {"trial": trial, "weights": [_fr(x) for x in lam], "sum": _fr(Z),
                  "f_P": f.decimal(12)}
            res.fail(ex)
            _persist(res, out_dir, seed, dump_poset(P, **ex))
    return res


def suite_thm31(seed=DEFAULT_SEED, trials=1000, out_dir=None, precision=DEFAULT_PRECISION, **_):
    """Independence polynomial <= the two-level product bound on random bipartite graphs."""
    res = SuiteResult("thm31")
    for trial in range(trials):
        G = random_bipartite(trial_rng(seed, "thm31", trial))
        Z = independence_poly(G)
        rhs = bounds.thm31_rhs(G, precision)
        res.checks += 1
        if not rhs.dominates(Z):
            ex = {"trial": trial, "mu": _fr(G.mu), "lam": {u: _fr(x) for u, x in G.lam.items()},
                  "Z": _fr(Z), "bound": rhs.decimal(12)}
            res.fail(ex)
            P = LeveledPoset([list(G.B), list(G.A)], [(b, a) for a, b in G.edges])
            _persist(res, out_dir, seed, dump_poset(P, **ex))
    return res


def suite_prop32(seed=DEFAULT_SEED, trials=1000, out_dir=None, precision=DEFAULT_PRECISION, **_):
    """f of bar P_Y never exceeds f_P, for random saturated P and Y inside the top level."""
    res = SuiteResult("prop32")
    for trial in range(trials):
        rng = trial_rng(seed, "prop32", trial)
        P = random_leveled_poset(rng, saturated=True)
        lam = random_weights(rng, P.k)
        top = P.k - 1
        Y = [v for v in P.levels[top] if rng.random() < 0.5]
        Q = subposet(P, SubposetSpec("bar_P_Y", Y, level=top))
        fq = bounds.f_P_interval(Q, lam[:Q.k], precision)
        fp = bounds.f_P_interval(P, lam, precision)
        res.checks += 1
        # flag only a certain violation
        if fq.lo > fp.hi:
            ex = {"trial": trial, "weights": [_fr(x) for x in lam], "Y": sorted(Y),
                  "f_sub": format(fq.lo, ".12Dg"), "f_P": format(fp.hi, ".12Ug")}
            res.fail(ex)
            _persist(res, out_dir, seed, dump_poset(P, **ex))
    return res


def suite_lemma35(seed=DEFAULT_SEED, trials=20, out_dir=None, n=None, precision=DEFAULT_PRECISION,
                  **_):
    """Bottom half of [3]^n: outer count bound, per-node inner bound and the top-degree fact.

    Without ``n``, runs n = 2 and n = 3 over every Y.  For n >= 4, ``trials``
    random Y are sampled.
    """
    res = SuiteResult("lemma35")
    ns = [2, 3] if n is None else [n]
    intrinsic = 0
    for m in ns:
        P = bounds.bottom_half(m)
        mid = P.levels[m]
        if m <= 3:
            choices = [Y for r in range(len(mid) + 1) for Y in itertools.combinations(mid, r)]
        else:
            choices = []
            for trial in range(trials):
                rng = trial_rng(seed, f"lemma35-{m}", trial)
                choices.append([v for v in mid if rng.random() < 0.5])
        for Y in choices:
            rep = bounds.lemma35_check(m, Y, P, precision)
            res.checks += 1
            intrinsic += rep.intrinsic_exceedances
            if not rep.ok:
                ex = {"n": m, "Y": [list(y) for y in sorted(Y)],
                      "failures": [[str(x) for x in f] for f in rep.failures[:5]]}
                res.fail(ex)
                R = subposet(P, SubposetSpec("bar_P_Y", Y, level=m))
                _persist(res, out_dir, seed, dump_poset(R, **ex))
    res.details["n"] = ns
    res.details["intrinsic_degree_exceedances"] = intrinsic
    return res


def suite_thm14(seed=DEFAULT_SEED, cache=None, n=None, **_):
    """log2 alpha([3]^n) against (1 + 4 log2(3)/n) N(3, n) and the trivial lower bound."""
    res = SuiteResult("thm14")
    for m in ([n] if n else range(1, 5)):
        alpha = grid_alpha(3, m, cache)
        upper, lower = bounds.thm14_holds(m, alpha)
        res.checks += 2
        if not (upper and lower):
            res.fail({"n": m, "alpha": str(alpha), "upper_ok": upper, "lower_ok": lower})
        res.details[f"alpha_3_{m}"] = str(alpha)
    return res


def eq12_within(t, n, tol=Fraction(1, 20), precision=DEFAULT_PRECISION):
    """|N(t, n) / approx - 1| <= tol, decided with interval arithmetic."""
    entry = bounds.closed_form_bounds(t, n, precision=precision).entry("eq12")
    ratio = Interval(middle_layer_size(t, n), precision=precision) / entry.value
    return (ratio - 1).hi <= tol and (1 - ratio).hi <= tol


def lemma42_holds(t, n):
    """N(t, n) >= 2 t^(n-1) / (3 sqrt n), squared and compared exactly."""
    N = middle_layer_size(t, n)
    return 9 * n * N * N >= 4 * t ** (2 * n - 2)


GRID_LARGE_N = [(2, 2**k) for k in range(14, 25)]


def suite_section4(seed=DEFAULT_SEED, precision=DEFAULT_PRECISION, **_):
    """Low-point counts, the assembled large-n estimate at C = 15, and middle-layer estimates."""
    res = SuiteResult("section4")
    for t in range(2, 7):
        for n in range(1, 15):
            exact = count_low_points(t, n)
            bound = (t - 1) * Interval(t, precision=precision) ** n * \
                (Interval(-n, precision=precision) / (8 * t)).exp()
            res.checks += 1
            if not exact <= bound.hi:
                res.fail({"check": "low_points", "t": t, "n": n, "exact": exact,
                          "bound": format(bound.hi, ".6Ug")})
            if t**n <= 10**5:
                enum = sum(is_low(Point(x, t)) for x in itertools.product(range(t), repeat=n))
                res.checks += 1
                if enum != exact:
                    res.fail({"check": "low_points_enum", "t": t, "n": n, "enum": enum,
                              "dp": exact})
    for t, n in GRID_LARGE_N:
        d = bounds.section4_diagnostics(bounds.Section4Params(t, n, precision=precision))
        res.checks += 1
        if not (d.applicable and d.ok):
            res.fail({"check": "assembled", "t": t, "n": n, "applicable": d.applicable,
                      "assembled": d.to_dict()["assembled"], "main": d.to_dict()["main_bound"]})
    for t in range(2, 6):
        for n in range(50, 201, 50):
            res.checks += 1
            if not eq12_within(t, n, precision=precision):
                res.fail({"check": "eq12", "t": t, "n": n})
    for t in range(1, 11):
        for n in range(1, 61):
            res.checks += 1
            if not lemma42_holds(t, n):
                res.fail({"check": "lemma42", "t": t, "n": n})
    return res


WORKED_POINT = (0, 2, 1, 3, 2, 1)
WORKED_CLASS = [(0, 2, 1, 3, 0, 1), (0, 2, 1, 3, 1, 1), (0, 2, 1, 3, 2, 1),
                  (0, 2, 1, 3, 2, 2), (0, 2, 1, 3, 2, 3)]


def suite_chains(seed=DEFAULT_SEED, **_):
    """Bracket decomposition for 2 <= t <= 5, 1 <= n <= 5, plus the worked [4]^6 class."""
    res = SuiteResult("chains")
    for t in range(2, 6):
        for n in range(1, 6):
            rep = chains.verify_decomposition(chains.decompose(t, n, check=False))
            res.checks += 1
            if not rep.ok:
                res.fail({"t": t, "n": n, **rep.to_dict()})
    got = chains.chain_class(Point(WORKED_POINT, 4))
    res.checks += 1
    if got != WORKED_CLASS:
        res.fail({"worked_class": [list(x) for x in got]})
    return res


def suite_structure(seed=DEFAULT_SEED, n=None, **_):
    """min neighbour up-degree - down-degree >= n - i on every level i >= 1 of [3]^n."""
    res = SuiteResult("structure")
    for m in ([n] if n else range(1, 7)):
        P = build_grid(3, m)
        bad = bounds.structural_fact_violations(m, P)
        res.checks += len(P) - len(P.levels[0])
        for x, i, dn, d in bad:
            res.fail({"n": m, "x": list(x), "level": i, "min_updegree": dn, "downdegree": d})
    return res


def _random_joint(rng, k, sparsity=0.2):
    labels = list(itertools.product((0, 1), repeat=k))
    w = _dirichlet(rng, len(labels), sparsity)
    return entropy.FiniteDistribution(list(zip(labels, w.tolist())))


def _random_cover(rng, k):
    subsets = [s for r in range(1, k + 1) for s in itertools.combinations(range(k), r)]
    chosen = [subsets[i] for i in rng.choice(len(subsets), size=int(rng.integers(1, len(subsets) + 1)),
                                               replace=False)]
    cover = {s: float(rng.uniform(0.1, 1.0)) for s in chosen}
    for i in range(k):
        if not any(i in s for s in cover):
            cover[(i,)] = 1.0
    loads = [sum(w for s, w in cover.items() if i in s) for i in range(k)]
    scale = 1 / min(loads)
    return {s: w * scale * (1 + 1e-12) for s, w in cover.items()}


def suite_entropy(seed=DEFAULT_SEED, trials=1000, **_):
    """Randomized margins of the entropy inequalities, plus their equality cases."""
    res = SuiteResult("entropy")
    worst = {}

    def record(name, margin, example):
        res.checks += 1
        margin = float(margin)
        worst[name] = min(worst.get(name, margin), margin)
        if margin < -ENTROPY_TOL:
            res.fail({"check": name, "margin": margin, **example})

    for trial in range(trials):
        rng = trial_rng(seed, "entropy", trial)
        k = int(rng.integers(1, 5))
        X = _random_joint(rng, k)
        record("shearer", entropy.shearer_check(X, _random_cover(rng, k)), {"trial": trial})
        record("subadditivity", entropy.subadditivity_margin(_random_joint(rng, 3)), {"trial": trial})

        size = int(rng.integers(1, 10))
        D = entropy.FiniteDistribution(list(enumerate(_dirichlet(rng, size, 0.2).tolist())))
        record("max_entropy", entropy.max_entropy_margin(D), {"trial": trial})
        if D[0] < 1:
            res.checks += 1
            r = float(entropy.fact22_residual(D))
            worst["fact22_residual"] = max(worst.get("fact22_residual", 0.0), r)
            if r > ENTROPY_TOL:
                res.fail({"check": "fact22", "residual": r, "trial": trial})

        base = list(range(int(rng.integers(1, 5))))
        family = [frozenset(s) for r in range(len(base) + 1)
                  for s in itertools.combinations(base, r)]
        family = [family[i] for i in sorted(rng.choice(len(family), size=int(rng.integers(1, len(family) + 1)),
                                                       replace=False))]
        lam = {x: float(rng.uniform(0.25, 4)) for x in base}
        p = entropy.FiniteDistribution(list(zip(family, _dirichlet(rng, len(family), 0.3).tolist())))
        record("gibbs", entropy.gibbs_check(p, lam, family), {"trial": trial})

        K = entropy.FiniteDistribution(list(enumerate(_dirichlet(rng, 9, 0.3).tolist())))
        kk = int(rng.integers(1, 9))
        q = min(1.0, sum(pr for x, pr in K.items() if x >= kk))
        record("pippenger", entropy.pippenger_check(K, kk, q, 8), {"trial": trial, "k": kk})

    # equality cases, exact arithmetic
    tight = {
        "max_entropy_uniform": entropy.max_entropy_margin(entropy.FiniteDistribution.uniform(range(7))),
        "shearer_cube": entropy.shearer_check(
            entropy.FiniteDistribution.uniform(itertools.product((0, 1), repeat=3)),
            {(0, 1): Fraction(1, 2), (0, 2): Fraction(1, 2), (1, 2): Fraction(1, 2)}),
        "pippenger_uniform": entropy.pippenger_check(entropy.FiniteDistribution.uniform(range(5)), 5, 0, 9),
    }
    fam = [frozenset(s) for r in range(3) for s in itertools.combinations("xy", r)]
    lam = {"x": Fraction(3), "y": Fraction(1, 2)}
    W = sum(np.prod([lam[c] for c in S]) if S else 1 for S in fam)
    gibbs_p = entropy.FiniteDistribution(
        [(S, Fraction(np.prod([lam[c] for c in S]) if S else 1) / W) for S in fam])
    tight["gibbs_proportional"] = entropy.gibbs_check(gibbs_p, lam)
    for name, margin in tight.items():
        res.checks += 1
        if abs(float(margin)) > ENTROPY_TOL:
            res.fail({"check": name, "margin": float(margin)})

    # h1: the small-q estimate on a grid and midpoint concavity
    qs = [i / 20000 for i in range(1, 10001)]
    for q in qs:
        record("h1_bound", entropy.h1_bound_margin(q), {"q": q})
    grid = [i / 10000 for i in range(10001)]
    vals = [float(entropy.h1(q)) for q in grid]
    for i in range(1, len(grid) - 1):
        record("h1_concave", vals[i] - (vals[i - 1] + vals[i + 1]) / 2, {"q": grid[i]})
    res.details["worst_margin"] = {k: float(v) for k, v in sorted(worst.items())}
    return res


SUITES = {
    "engines": suite_engines,
    "thm33": suite_thm33,
    "thm31": suite_thm31,
    "prop32": suite_prop32,
    "lemma35": suite_lemma35,
    "thm14": suite_thm14,
    "section4": suite_section4,
    "chains": suite_chains,
    "structure": suite_structure,
    "entropy": suite_entropy,
}


def run_suite(name, **options):
    """Run one suite (or ``"all"``) and return a list of SuiteResult."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    out = []
    for nm in names:
        opts = {k: v for k, v in options.items() if v is not None}
        if name == "all":
            opts.pop("n", None)
        start = time.perf_counter()
        result = SUITES[nm](**opts)
        result.seconds = time.perf_counter() - start
        out.append(result)
    return out


def results_json(results):
    return json.dumps([r.to_dict() for r in results], indent=1, sort_keys=True, default=str)
