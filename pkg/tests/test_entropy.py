import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antichains.entropy import (FiniteDistribution, binary_entropy, conditional_entropy, entropy,
                                fact22_residual, gibbs_check, h1, h1_bound_margin, marginal,
                                max_entropy_margin, pippenger_check, shearer_check,
                                subadditivity_margin)

TOL = 1e-9
CUBE = list(itertools.product((0, 1), repeat=3))


def close(x, y, tol=TOL):
    return abs(float(x) - float(y)) <= tol


def test_distribution_validation():
    with pytest.raises(ValueError):
        FiniteDistribution({0: F(1, 2)})
    with pytest.raises(ValueError):
        FiniteDistribution({0: 0.5, 1: 0.4})
    with pytest.raises(ValueError):
        FiniteDistribution({0: F(3, 2), 1: F(-1, 2)})
    assert FiniteDistribution({0: 0.5, 1: 0.5 + 1e-13}).exact is False
    assert FiniteDistribution([(0, F(1, 2)), (0, F(1, 2))])[0] == 1


def test_entropy_examples():
    assert binary_entropy(F(1, 2)) == 1
    assert binary_entropy(0) == 0 and binary_entropy(1) == 0
    assert entropy(FiniteDistribution.uniform(range(4))) == 2
    assert entropy({0: F(1, 2), 1: F(1, 4), 2: F(1, 4)}) == F(3, 2)
    assert close(entropy({0: 0.5, 1: 0.25, 2: 0.25}), 1.5, 1e-15)


def test_zero_log_zero():
    assert entropy({0: F(0), 1: F(1)}) == 0
    assert entropy({0: 0.0, 1: 1.0}) == 0.0


def test_conditional_entropy_and_marginal():
    X = FiniteDistribution({(0, 0): F(1, 4), (0, 1): F(1, 4), (1, 1): F(1, 2)})
    assert marginal(X, (0,))[(0,)] == F(1, 2)
    # given X_0 = 0 the second coordinate is uniform, given X_0 = 1 it is fixed
    assert close(conditional_entropy(X, (0,)), 0.5)
    # chain rule H(X) = H(X_0) + H(X_1 | X_0)
    assert close(entropy(X), entropy(marginal(X, (0,))) + conditional_entropy(X, (0,)))
    with pytest.raises(ValueError):
        marginal(FiniteDistribution({0: 1}), (0,))


def test_h1_examples():
    assert h1(F(3, 4)) == 1
    assert h1(0) == 0
    assert close(h1(F(1, 4)), 0.811278, 1e-6)
    assert close(h1(0.5 - 1e-12), 1, 1e-9) and h1(0.5) == 1
    with pytest.raises(ValueError):
        h1(1.5)


def test_shearer_examples():
    U = FiniteDistribution.uniform(CUBE)
    pairs = {(0, 1): F(1, 2), (0, 2): F(1, 2), (1, 2): F(1, 2)}
    assert close(shearer_check(U, pairs), 0)
    one = FiniteDistribution({(0,): F(1, 3), (1,): F(2, 3)})
    assert shearer_check(one, {(0,): 1}) == 0
    copy = FiniteDistribution({(0, 0): F(1, 3), (1, 1): F(2, 3)})
    assert close(shearer_check(copy, {(0,): 1, (1,): 1}), entropy(marginal(copy, (0,))))


def test_shearer_rejects_non_cover():
    U = FiniteDistribution.uniform(CUBE)
    with pytest.raises(ValueError, match="coordinate 2"):
        shearer_check(U, {(0, 1): 1})
    with pytest.raises(ValueError):
        shearer_check(U, {(0, 1, 2): -1})


def test_fact22_examples():
    assert close(fact22_residual({0: F(1, 2), 1: F(1, 4), 2: F(1, 4)}), 0, 1e-12)
    assert close(fact22_residual({0: F(0), 1: F(1, 2), 2: F(1, 2)}), 0, 1e-12)
    for q in (0.1, 0.37, 0.9):
        assert fact22_residual({0: q, 1: 1 - q}) <= 1e-12
    with pytest.raises(ValueError):
        fact22_residual({0: 1})


def test_gibbs_examples():
    fam = [frozenset(s) for r in range(3) for s in itertools.combinations("ab", r)]
    lam = {"a": F(2), "b": F(5, 3)}
    W = sum(math.prod(lam[x] for x in S) for S in fam)
    q = FiniteDistribution([(S, math.prod(lam[x] for x in S) / W) for S in fam])
    assert close(gibbs_check(q, lam), 0)
    ones = {"a": 1, "b": 1}
    assert close(gibbs_check(FiniteDistribution.uniform(fam), ones), 0)
    point = FiniteDistribution([(S, F(int(S == fam[0]))) for S in fam])
    assert gibbs_check(point, ones) == 2
    assert gibbs_check(point, ones, family=fam[:2]) == 1


def test_pippenger_examples():
    for k in range(1, 6):
        U = FiniteDistribution.uniform(range(k))
        assert close(pippenger_check(U, k, 0, 9), 0)
    for q in (F(0), F(1, 5), F(1, 2), F(1)):
        m = pippenger_check({0: 1}, 1, q, 7)
        assert close(m, h1(q) + q * math.log2(7))
    with pytest.raises(ValueError, match="hypothesis"):
        pippenger_check(FiniteDistribution.uniform(range(4)), 2, F(1, 4), 3)


def test_max_entropy_and_subadditivity():
    assert max_entropy_margin(FiniteDistribution.uniform(range(6))) == 0
    assert max_entropy_margin({0: F(1, 2), 1: F(1, 4), 2: F(1, 4)}) > 0
    assert close(subadditivity_margin(FiniteDistribution.uniform(CUBE)), 0)


def test_h1_bound_grid():
    assert all(h1_bound_margin(i / 10**4 / 2) >= -TOL for i in range(1, 10**4 + 1))


prob_vectors = st.lists(st.floats(0, 1), min_size=2, max_size=8).filter(lambda v: sum(v) > 1e-3)


def _dist(weights, labels=None):
    total = math.fsum(weights)
    labels = labels or range(len(weights))
    return FiniteDistribution(list(zip(labels, (w / total for w in weights))))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=8, max_size=8).filter(lambda v: sum(v) > 1e-3))
def test_subadditivity_property(w):
    assert subadditivity_margin(_dist(w, CUBE)) >= -TOL


@settings(max_examples=200, deadline=None)
@given(prob_vectors)
def test_max_entropy_property(w):
    D = _dist(w)
    assert max_entropy_margin(D) >= -TOL
    if D[0] < 1 - 1e-6:
        assert fact22_residual(D) <= TOL


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=9, max_size=9).filter(lambda v: sum(v) > 1e-3),
       st.integers(1, 8))
def test_pippenger_property(w, k):
    D = _dist(w)
    q = min(1.0, math.fsum(p for x, p in D.items() if x >= k))
    assert pippenger_check(D, k, q, 8) >= -TOL


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.5), st.floats(0, 0.5))
def test_h1_midpoint_concave(a, b):
    assert h1((a + b) / 2) >= (h1(a) + h1(b)) / 2 - TOL
