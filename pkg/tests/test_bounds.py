import itertools
import math
from fractions import Fraction

import pytest

from antichains import bounds
from antichains.bounds import (Section4Params, closed_form_bounds, f_P, f_P_interval,
                               lemma35_check, minimal_empirical_C, section4_diagnostics,
                               thm31_rhs)
from antichains.counting import (BipartiteGraph, count_antichains_dp, independence_poly,
                                 weighted_antichain_sum)
from antichains.poset import LeveledPoset, build_grid, count_low_points

REL = Fraction(1, 2**120)


def chain(k):
    return LeveledPoset([[i] for i in range(k)], [(i, i + 1) for i in range(k - 1)])


def test_f_single_level():
    for m in range(5):
        P = LeveledPoset([list(range(m))])
        assert f_P(P, (Fraction(3, 2),)).value == Fraction(5, 2) ** m


@pytest.mark.parametrize("k", range(1, 6))
def test_f_tight_on_chains(k):
    lam = tuple(Fraction(i + 2, 3) for i in range(k))
    f = f_P(chain(k), lam)
    exact = weighted_antichain_sum(chain(k), lam)
    assert exact == 1 + sum(lam)
    assert f.dominates(exact) and f.rel_diff(exact) <= REL


def test_f_tight_on_diamond():
    D = build_grid(2, 2)
    f = f_P(D)
    assert f.dominates(6) and f.rel_diff(6) <= REL
    iv = f_P_interval(D)
    assert iv.lo <= 6 <= iv.hi


def test_f_empty_and_isolated_top():
    empty = LeveledPoset([[]])
    assert f_P(empty).value == 1
    P = LeveledPoset([["a"], ["b", "c"]], [("a", "b")])
    # c has no lower covers and contributes exactly 1 + lambda
    assert f_P(P, (1, 1)).value == (2 + 2 - 1) * 2


def test_f_at_least_one():
    for trial in range(40):
        from antichains.suites import random_leveled_poset, random_weights, trial_rng
        rng = trial_rng(3, "fge1", trial)
        P = random_leveled_poset(rng)
        assert f_P(P, random_weights(rng, P.k, lo=0)).value >= 1


def test_f_rejects_bad_weights():
    with pytest.raises(ValueError):
        f_P(chain(2), (1,))
    with pytest.raises(ValueError):
        f_P(chain(1), (-1,))


def test_thm31_examples():
    edge = BipartiteGraph(["a"], ["b"], {("a", "b")})
    assert thm31_rhs(edge).value == 3 == independence_poly(edge)
    for m in range(1, 5):
        G = BipartiteGraph.complete(1, m, mu=2, lam=Fraction(3, 2))
        Z = independence_poly(G)
        assert Z == 2 + Fraction(5, 2) ** m
        r = thm31_rhs(G)
        assert r.dominates(Z) and r.rel_diff(Z) <= REL
    K = BipartiteGraph.complete(2, 2)
    r = thm31_rhs(K)
    assert r.dominates(7) and r.rel_diff(7) <= REL


def test_thm31_requires_weights_at_least_one():
    with pytest.raises(ValueError):
        thm31_rhs(BipartiteGraph.complete(1, 1, mu=Fraction(1, 2)))


def test_closed_forms_3_3():
    rep = closed_form_bounds(3, 3, alpha=980)
    assert rep.entry("thm14").decimal() == "21.793"
    assert abs(float(rep.entry("thm14").value.hi) - (1 + 4 * math.log2(3) / 3) * 7) < 1e-12
    assert float(rep.entry("thm12").value.hi) == pytest.approx(14)
    assert rep.entry("lower_trivial").value == 7
    assert not rep.entry("thm11").applicable
    assert not rep.violations()
    assert rep.tightest_upper().name == "thm12"
    assert rep.to_dict()["log2_alpha"] == "9.93664"


def test_eq12_example():
    rep = closed_form_bounds(2, 20)
    approx = float(rep.entry("eq12").value.mid)
    assert approx == pytest.approx(2**20 * math.sqrt(2 / (20 * math.pi)), rel=1e-12)
    assert approx / math.comb(20, 10) == pytest.approx(1.0125, abs=5e-4)


@pytest.mark.parametrize("t,n", [(2, 1), (2, 2), (2, 5), (2, 6), (3, 1), (3, 2), (3, 4), (4, 3)])
def test_bounds_consistent_with_exact(t, n):
    alpha = count_antichains_dp(build_grid(t, n))
    rep = closed_form_bounds(t, n, alpha=alpha)
    assert rep.violations() == []


def test_flags_and_t1():
    rep = closed_form_bounds(1, 10)
    assert not rep.section4.applicable
    assert not rep.entry("eq12").applicable
    assert not rep.entry("thm14").applicable
    assert closed_form_bounds(2, 1).section4.applicable is False


def test_large_n_applicability():
    assert Section4Params(2, 65536).applicable
    assert not Section4Params(2, 1024).applicable


def test_section4_example():
    d = section4_diagnostics(Section4Params(2, 65536))
    assert float(d.p.mid) == pytest.approx(math.sqrt(2 * 16 / 65536), rel=1e-12)
    assert d.applicable and d.ok
    small = section4_diagnostics(Section4Params(2, 4))
    assert small.low_points_exact == 1 == count_low_points(2, 4)
    # (t-1) t^n e^{-n/(8t)} = 16 e^{-1/4}
    assert float(small.low_point_bound.hi) == pytest.approx(16 * math.exp(-0.25), rel=1e-12)
    assert small.low_points_exact <= small.low_point_bound.lo


def test_minimal_C(goldens):
    grid = [(2, 2**k) for k in range(14, 25)]
    C = minimal_empirical_C(grid)
    assert C == goldens["minimal_empirical_C"]["value"]
    assert C <= 15
    # C is the least value on the 3-decimal grid
    step = Fraction(1, 1000)
    for cand, expect in ((Fraction(str(C)), True), (Fraction(str(C)) - step, False)):
        ok = all(section4_diagnostics(Section4Params(t, n, cand)).ok for t, n in grid)
        assert ok is expect


def test_minimal_C_single_point_and_monotone():
    point = [(2, 2**16)]
    C = Fraction(str(minimal_empirical_C(point)))
    d = section4_diagnostics(Section4Params(2, 2**16, C))
    gap = (d.main_bound.lo - d.assembled.hi) / d.N
    assert 0 <= gap <= Fraction(1, 1000) * d.scale.hi
    bigger = minimal_empirical_C(point, epsilon=Fraction(1, 2))
    assert bigger >= float(C)


def test_minimal_C_contract():
    with pytest.raises(ValueError):
        minimal_empirical_C([])
    with pytest.raises(ValueError):
        minimal_empirical_C([(2, 1024)])


def test_lemma35_examples():
    rep = lemma35_check(2, set())
    assert rep.alpha == 14 and rep.M_size == 3 and rep.ok
    # 2^{3 (1 + log2 3)} = 2^3 3^3
    assert float(2 ** rep.log2_bound.mid) == pytest.approx(216, rel=1e-12)
    top = bounds.bottom_half(2).levels[2]
    full = lemma35_check(2, top)
    assert full.alpha == 1 and full.M_size == 0 and full.ok


def test_lemma35_rejects_wrong_level():
    with pytest.raises(ValueError):
        lemma35_check(2, {(0, 0)})


def test_lemma35_exhaustive_n3():
    P = bounds.bottom_half(3)
    mid = P.levels[3]
    for r in range(len(mid) + 1):
        for Y in itertools.combinations(mid, r):
            assert lemma35_check(3, Y, P).ok


def test_inherited_values_below_own_degree_values():
    # degrees inherited from R are at least the ones recomputed below v, and a
    # larger degree gives a smaller root, so the inherited value is the smaller one
    R = bounds.bottom_half(3)
    inherited = bounds.inherited_below_values(R)
    ev = bounds.FEvaluator(R, None, 128, "up")
    ix = ev.ix
    strict = 0
    for v in R.nodes():
        own = ev.value(ix.strictly_below(ix.index[v], ix.full))
        assert inherited[v] <= own * (1 + Fraction(1, 2**100))
        strict += own - inherited[v] > 2**-60
    assert strict > 0


def test_thm14_and_structure():
    for n, alpha in [(1, 4), (2, 20), (3, 980), (4, 17792748)]:
        assert bounds.thm14_holds(n, alpha) == (True, True)
    for n in range(1, 7):
        assert bounds.structural_fact_violations(n) == []
