"""Base-2 entropy utilities and the margins of the classical entropy inequalities.

A distribution is either exact (all probabilities are rationals, summing to
exactly 1) or floating (doubles summing to 1 within 1e-12).  Exact
distributions evaluate logarithms in MPFR at ``ENTROPY_PRECISION`` bits and
return ``mpfr`` values; floating ones return Python floats.  Every margin is
"right side minus left side", so a valid inequality gives a margin >= 0.
"""
from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .rounding import nearest, to_mpq

ENTROPY_PRECISION = 128
FLOAT_SUM_TOL = 1e-12


def _is_exact(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class FiniteDistribution:
    """Probability masses on hashable labels; joint distributions use tuple labels."""

    def __init__(self, atoms):
        if isinstance(atoms, dict):
            atoms = atoms.items()
        merged = {}
        for label, prob in atoms:
            merged[label] = merged.get(label, 0) + prob
        if not merged:
            raise ValueError("a distribution needs at least one atom")
        self.exact = all(_is_exact(p) for p in merged.values())
        if self.exact:
            merged = {k: Fraction(v) for k, v in merged.items()}
            total = sum(merged.values())
            if total != 1:
                raise ValueError(f"probabilities sum to {total}, not 1")
        else:
            merged = {k: float(v) for k, v in merged.items()}
            if any(math.isnan(p) for p in merged.values()):
                raise ValueError("probabilities must be numbers")
            total = math.fsum(merged.values())
            if abs(total - 1) > FLOAT_SUM_TOL:
                raise ValueError(f"probabilities sum to {total!r}, not 1")
        if any(p < 0 for p in merged.values()):
            raise ValueError("probabilities must be nonnegative")
        self.atoms = merged

    @classmethod
    def uniform(cls, labels, exact=True):
        labels = list(labels)
        p = Fraction(1, len(labels)) if exact else 1 / len(labels)
        return cls([(x, p) for x in labels])

    def __getitem__(self, label):
        return self.atoms.get(label, 0)

    def __len__(self):
        return len(self.atoms)

    def items(self):
        return self.atoms.items()

    @property
    def support(self):
        return [x for x, p in self.atoms.items() if p > 0]

    @property
    def components(self):
        """Number of coordinates of a joint distribution (labels must be equal-length tuples)."""
        sizes = {len(x) for x in self.atoms if isinstance(x, tuple)}
        if len(sizes) != 1 or not all(isinstance(x, tuple) for x in self.atoms):
            raise ValueError("not a joint distribution: labels must be tuples of one length")
        return sizes.pop()

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"FiniteDistribution({len(self.atoms)} atoms, {kind})"


def _as_dist(D):
    return D if isinstance(D, FiniteDistribution) else FiniteDistribution(D)


def _log2(x, exact):
    if exact:
        return gmpy2.log2(mpfr(to_mpq(x)))
    return math.log2(x)


def _neg_plogp(p, exact):
    # 0 log 0 = 0
    if p == 0:
        return mpfr(0) if exact else 0.0
    if exact:
        q = mpfr(to_mpq(p))
        return -q * gmpy2.log2(q)
    return -p * math.log2(p)


def _sum(values, exact):
    if exact:
        total = mpfr(0)
        for v in values:
            total += v
        return total
    return math.fsum(values)


def binary_entropy(p):
    if not 0 <= p <= 1:
        raise ValueError(f"binary entropy needs p in [0, 1], got {p}")
    exact = _is_exact(p)
    with nearest(ENTROPY_PRECISION):
        return _neg_plogp(p, exact) + _neg_plogp(1 - p, exact)


def entropy(D):
    D = _as_dist(D)
    with nearest(ENTROPY_PRECISION):
        return _sum((_neg_plogp(p, D.exact) for p in D.atoms.values()), D.exact)


def marginal(joint, coords):
    """Distribution of the sub-tuple at positions ``coords`` (0-based)."""
    joint = _as_dist(joint)
    k = joint.components
    coords = tuple(coords)
    if any(not 0 <= c < k for c in coords):
        raise ValueError(f"coordinates {coords} outside 0..{k - 1}")
    out = defaultdict(int)
    for label, p in joint.items():
        out[tuple(label[c] for c in coords)] += p
    return FiniteDistribution(out)


def conditional_entropy(joint, given):
    """H(X_rest | X_given): per-condition entropies averaged by the marginal of the condition."""
    joint = _as_dist(joint)
    k = joint.components
    given = tuple(given)
    rest = tuple(i for i in range(k) if i not in given)
    groups = defaultdict(lambda: defaultdict(int))
    for label, p in joint.items():
        groups[tuple(label[c] for c in given)][tuple(label[c] for c in rest)] += p
    with nearest(ENTROPY_PRECISION):
        terms = []
        for cond in groups.values():
            w = sum(cond.values())
            if w == 0:
                continue
            terms.append(_sum((w * _neg_plogp(p / w, joint.exact) for p in cond.values()),
                              joint.exact))
        return _sum(terms, joint.exact)


def h1(q):
    """Binary entropy on [0, 1/2], clipped to 1 on [1/2, 1]."""
    if not 0 <= q <= 1:
        raise ValueError(f"h1 needs q in [0, 1], got {q}")
    if 2 * q >= 1:
        return mpfr(1) if _is_exact(q) else 1.0
    return binary_entropy(q)


def max_entropy_margin(D):
    """log2 |support| - H(D)."""
    D = _as_dist(D)
    with nearest(ENTROPY_PRECISION):
        return _log2(len(D.support), D.exact) - entropy(D)


def subadditivity_margin(joint):
    """sum_i H(X_i) - H(X)."""
    joint = _as_dist(joint)
    with nearest(ENTROPY_PRECISION):
        parts = [entropy(marginal(joint, (i,))) for i in range(joint.components)]
        return _sum(parts, joint.exact) - entropy(joint)


def _normalize_cover(cover, k):
    out = {}
    for subset, weight in dict(cover).items():
        subset = tuple(sorted(set(subset)))
        if any(not 0 <= i < k for i in subset):
            raise ValueError(f"cover set {subset} uses coordinates outside 0..{k - 1}")
        if weight < 0:
            raise ValueError(f"cover weight {weight} for {subset} is negative")
        out[subset] = out.get(subset, 0) + weight
    for i in range(k):
        load = sum(w for s, w in out.items() if i in s)
        short = load < 1 if _is_exact(load) else load < 1 - FLOAT_SUM_TOL
        if short:
            raise ValueError(f"coordinate {i} is covered with total weight {load} < 1")
    return out


def shearer_check(joint, cover):
    """sum_A alpha_A H(X_A) - H(X) for a fractional cover {A: alpha_A} of the coordinates.

    Coordinates are 0-based.  Raises ValueError when some coordinate has
    total cover weight below 1.
    """
    joint = _as_dist(joint)
    cover = _normalize_cover(cover, joint.components)
    with nearest(ENTROPY_PRECISION):
        terms = []
        for subset, w in cover.items():
            if w == 0:
                continue
            h = entropy(marginal(joint, subset))
            terms.append(h * (mpfr(to_mpq(w)) if joint.exact and _is_exact(w) else float(w)))
        return _sum(terms, joint.exact) - entropy(joint)


def fact22_residual(D):
    """|H(X | X != 0) - (H(X) - H(P(X=0))) / (1 - P(X=0))| for X with an atom at 0."""
    D = _as_dist(D)
    p0 = D[0]
    if p0 == 1:
        raise ValueError("P(X = 0) = 1: conditioning on X != 0 is undefined")
    rest = [(x, p / (1 - p0)) for x, p in D.items() if x != 0]
    conditioned = FiniteDistribution(rest)
    with nearest(ENTROPY_PRECISION):
        lhs = entropy(conditioned)
        rhs = (entropy(D) - binary_entropy(p0)) / (1 - (to_mpq(p0) if D.exact else p0))
        return abs(lhs - rhs)


def gibbs_check(p, lam, family=None):
    """log2(sum_S prod_{x in S} lam_x) - sum_S p_S (log2(1/p_S) + sum_{x in S} log2 lam_x).

    ``p`` is a distribution whose labels are sets; the family defaults to
    all of its labels (zero-probability atoms included).
    """
    p = _as_dist(p)
    family = list(p.atoms) if family is None else list(family)
    missing = [S for S in p.support if S not in family]
    if missing:
        raise ValueError(f"p charges sets outside the family: {missing[:3]!r}")
    if any(w < 0 for w in lam.values()):
        raise ValueError("weights must be nonnegative")
    exact = p.exact and all(_is_exact(w) for w in lam.values())

    def weight(S):
        out = Fraction(1) if exact else 1.0
        for x in S:
            out *= lam[x] if exact else float(lam[x])
        return out

    with nearest(ENTROPY_PRECISION):
        Z = sum(weight(S) for S in family)
        lhs_terms = []
        for S in p.support:
            w = weight(S)
            if w == 0:
                # a charged set of weight zero sends the left side to -infinity
                return mpfr("inf") if exact else math.inf
            ps = p[S]
            lhs_terms.append(_neg_plogp(ps, exact) + (to_mpq(ps) if exact else ps) * _log2(w, exact))
        return _log2(Z, exact) - _sum(lhs_terms, exact)


def pippenger_check(D, k, q, n=None):
    """h1(q) + log2 k + q log2 n - H(K) for K supported on {0, ..., n} with P(K >= k) <= q.

    ``n`` defaults to the largest label.  A failing hypothesis raises
    ValueError; it is not a counterexample.
    """
    D = _as_dist(D)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    labels = list(D.atoms)
    if any(not isinstance(x, int) or x < 0 for x in labels):
        raise ValueError("K must take nonnegative integer values")
    if n is None:
        n = max(labels)
    if max(labels) > n:
        raise ValueError(f"K takes values above n = {n}")
    if n < 1:
        raise ValueError("n must be >= 1")
    tail = sum(p for x, p in D.items() if x >= k)
    slack = 0 if _is_exact(tail) and _is_exact(q) else FLOAT_SUM_TOL
    if tail > q + slack:
        raise ValueError(f"hypothesis fails: P(K >= {k}) = {tail} > q = {q}")
    exact = D.exact and _is_exact(q)
    with nearest(ENTROPY_PRECISION):
        qv = to_mpq(q) if exact else float(q)
        rhs = h1(q) + _log2(k, exact) + qv * _log2(n, exact)
        return rhs - entropy(D)


def h1_bound_margin(q):
    """-2 q log2 q - h1(q), the slack of the small-q estimate (q in (0, 1/2])."""
    if not 0 < q <= 0.5:
        raise ValueError(f"need 0 < q <= 1/2, got {q}")
    exact = _is_exact(q)
    with nearest(ENTROPY_PRECISION):
        return 2 * _neg_plogp(q, exact) - h1(q)
