"""Acceptance criteria 1 to 10, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""
import io
import time
from fractions import Fraction

import pytest

from antichains import bounds, cli, suites
from antichains.bounds import closed_form_bounds, f_P, minimal_empirical_C, thm31_rhs
from antichains.counting import (BipartiteGraph, CountCache, count_antichains_dp,
                                 count_antichains_oracle, grid_alpha, independence_poly,
                                 weighted_antichain_sum)
from antichains.poset import LeveledPoset, build_grid, middle_layer_size

REL = Fraction(1, 2**120)


def run_checked(name, limit=None, **options):
    start = time.perf_counter()
    (res,) = suites.run_suite(name, **options)
    elapsed = time.perf_counter() - start
    assert res.checks > 0
    assert res.violations == 0, res.counterexample
    if limit is not None:
        assert elapsed < limit
    return res


def test_criterion_01_engine_equivalence(goldens):
    start = time.perf_counter()
    res = run_checked("engines", trials=200)
    assert res.checks == res.details["grids"] + 200
    for key, value in goldens["alpha"].items():
        t, n = map(int, key.split(","))
        P = build_grid(t, n)
        assert count_antichains_dp(P) == int(value)
        if t**n <= 32:
            assert count_antichains_oracle(P) == int(value)
    assert time.perf_counter() - start < 60


def test_criterion_02_ternary_grid_bounds(tmp_path):
    start = time.perf_counter()
    cache = CountCache(tmp_path)
    for n in range(1, 5):
        alpha = grid_alpha(3, n, cache)
        assert bounds.thm14_holds(n, alpha) == (True, True)
    assert max(len(level) for level in build_grid(3, 4).levels) == 19
    assert time.perf_counter() - start < 300


def test_criterion_03_weighted_bound_suites():
    for name in ("thm33", "thm31", "prop32"):
        res = run_checked(name, trials=1000)
        assert res.checks == 1000
    for k in range(1, 6):
        P = LeveledPoset([[i] for i in range(k)], [(i, i + 1) for i in range(k - 1)])
        lam = tuple(Fraction(i + 2, 3) for i in range(k))
        exact = weighted_antichain_sum(P, lam)
        f = f_P(P, lam)
        assert f.dominates(exact) and f.rel_diff(exact) <= REL
    f = f_P(build_grid(2, 2))
    assert f.dominates(6) and f.rel_diff(6) <= REL
    K = BipartiteGraph.complete(2, 2)
    assert independence_poly(K) == 7
    r = thm31_rhs(K)
    assert r.dominates(7) and r.rel_diff(7) <= REL


def test_criterion_04_bottom_half_lemma():
    start = time.perf_counter()
    for n, cases in ((2, 8), (3, 128)):
        res = run_checked("lemma35", n=n)
        assert res.checks == cases
    assert time.perf_counter() - start < 120


def test_criterion_05_chain_decomposition():
    res = run_checked("chains", limit=120)
    assert res.checks == 4 * 5 + 1


def test_criterion_06_structural_fact():
    for n in range(1, 7):
        run_checked("structure", n=n)


def test_criterion_07_large_n_consistency(goldens):
    res = run_checked("section4")
    assert res.checks > 0
    grid = suites.GRID_LARGE_N
    for t, n in grid:
        d = bounds.section4_diagnostics(bounds.Section4Params(t, n))
        assert d.applicable and d.ok
    assert minimal_empirical_C(grid) == goldens["minimal_empirical_C"]["value"]


def test_criterion_08_middle_layer_estimates():
    for t in range(2, 6):
        for n in range(50, 201, 50):
            assert suites.eq12_within(t, n, tol=Fraction(1, 20))
            approx = float(closed_form_bounds(t, n).entry("eq12").value.mid)
            assert abs(middle_layer_size(t, n) / approx - 1) <= 0.05
    for t in range(1, 11):
        for n in range(1, 61):
            assert suites.lemma42_holds(t, n)


def test_criterion_09_entropy_inequalities():
    res = run_checked("entropy", trials=1000)
    worst = res.details["worst_margin"]
    assert all(v >= -suites.ENTROPY_TOL for k, v in worst.items() if k != "fact22_residual")
    assert worst.get("fact22_residual", 0.0) <= suites.ENTROPY_TOL


def test_criterion_10_report_determinism(tmp_path):
    outputs = []
    for threads in ("1", "4"):
        path = tmp_path / f"report_{threads}.csv"
        code = cli.main(["report", "--t", "2..3", "--n", "1..4", "--threads", threads,
                         "--cache-dir", str(tmp_path / f"cache_{threads}"), "--out", str(path)],
                        out=io.StringIO())
        assert code == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0].count(b"\n") == 9


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
