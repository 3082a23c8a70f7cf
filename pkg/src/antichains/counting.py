"""Exact antichain counts, weighted antichain sums and bipartite independence polynomials.

Antichains are counted through the bijection with downsets (an antichain is
the set of maximal elements of a downset).  The DP sweeps levels bottom-up;
the state is the intersection of the downset with the current level.
"""
from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import kernels
from .poset import PosetSizeError

log = logging.getLogger(__name__)

ENGINE_VERSION = "dp1"
ORACLE_MAX_NODES = 32
DP_MAX_WIDTH = 24
INDEPENDENCE_MAX_NODES = 26


def _comparability_masks(P, order):
    """Bitmask (over ``order`` positions) of the nodes comparable to each node."""
    pos = {v: i for i, v in enumerate(order)}
    masks = [0] * len(order)
    for v in order:
        for w in P.below(v):
            masks[pos[v]] |= 1 << pos[w]
            masks[pos[w]] |= 1 << pos[v]
    return masks


def count_antichains_oracle(P, max_nodes=ORACLE_MAX_NODES):
    """Count antichains (the empty one included) by backtracking."""
    size = len(P)
    if size > max_nodes:
        raise PosetSizeError(
            f"oracle refuses {size} nodes (limit {max_nodes}); use the dp engine instead")
    order = P.nodes()
    comp = _comparability_masks(P, order)

    def extend(i, forbidden):
        if i == size:
            return 1
        total = extend(i + 1, forbidden)
        if not forbidden >> i & 1:
            total += extend(i + 1, forbidden | comp[i])
        return total

    return extend(0, 0)


def _check_widths(P, max_width):
    widest = max(range(P.k), key=lambda i: len(P.levels[i]))
    if len(P.levels[widest]) > max_width:
        raise PosetSizeError(
            f"level {widest} has width {len(P.levels[widest])} > cap {max_width}")


def _downset_dp(P, dtype, backend):
    m0 = len(P.levels[0])
    counts = np.ones(1 << m0, dtype=dtype)
    for i in range(1, P.k):
        if not kernels.superset_sum(counts, backend):
            return None
        req = kernels.requirement_table(P.down_masks(i), backend)
        counts = kernels.gather(counts, req, backend)
    if not kernels.superset_sum(counts, backend):
        return None
    return int(counts[0])


def count_antichains_dp(P, max_width=DP_MAX_WIDTH, backend=None, exact_only=False):
    """Count antichains of ``P`` with the level-sweep downset DP.

    Runs in int64 while every state count stays below 2**62 and restarts on
    Python integers otherwise; ``exact_only`` skips the int64 attempt.
    """
    _check_widths(P, max_width)
    if not exact_only:
        result = _downset_dp(P, np.int64, backend)
        if result is not None:
            return result
        log.info("int64 ceiling reached; recomputing with big integers")
    return _downset_dp(P, object, "numpy")


@dataclass
class WeightAssignment:
    """Per-level weights with optional per-node overrides (exact rationals)."""

    levels: tuple
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        self.levels = tuple(Fraction(w) for w in self.levels)
        self.overrides = {v: Fraction(w) for v, w in self.overrides.items()}
        if any(w < 0 for w in self.levels) or any(w < 0 for w in self.overrides.values()):
            raise ValueError("weights must be nonnegative")

    @classmethod
    def uniform(cls, k, value=1):
        return cls((value,) * k)

    def weight(self, node, level):
        if node in self.overrides:
            return self.overrides[node]
        return self.levels[level]

    def per_level(self):
        return not self.overrides


def _as_weights(P, w):
    if w is None:
        return WeightAssignment.uniform(P.k)
    if not isinstance(w, WeightAssignment):
        w = WeightAssignment(tuple(w))
    if len(w.levels) < P.k:
        raise ValueError(f"{len(w.levels)} level weights given for {P.k} levels")
    return w


def weighted_antichain_sum_enum(P, w=None, max_nodes=ORACLE_MAX_NODES):
    """Sum over antichains of the product of node weights, by backtracking."""
    w = _as_weights(P, w)
    size = len(P)
    if size > max_nodes:
        raise PosetSizeError(f"enumeration refuses {size} nodes (limit {max_nodes})")
    order = P.nodes()
    comp = _comparability_masks(P, order)
    weights = [w.weight(v, P.level_of(v)) for v in order]

    def extend(i, forbidden):
        if i == size:
            return Fraction(1)
        total = extend(i + 1, forbidden)
        if not forbidden >> i & 1:
            total += weights[i] * extend(i + 1, forbidden | comp[i])
        return total

    return extend(0, 0)


def weighted_antichain_sum_dp(P, w=None, max_width=16):
    """Weighted antichain sum via the downset DP with weighted superset sums.

    A node of the current level is a maximal element of the downset exactly
    when it lies outside the requirement set of the next level's state, so the
    transition is a superset sum that multiplies in the weight of each node
    dropped from the mask.
    """
    w = _as_weights(P, w)
    _check_widths(P, max_width)
    table = np.empty(1 << len(P.levels[0]), dtype=object)
    table[:] = Fraction(1)
    for i in range(1, P.k):
        prev = [w.weight(v, i - 1) for v in P.levels[i - 1]]
        kernels.weighted_superset_sum(table, prev)
        req = kernels.requirement_table(P.down_masks(i), "numpy")
        table = table[req]
    top = [w.weight(v, P.k - 1) for v in P.levels[-1]]
    kernels.weighted_superset_sum(table, top)
    return Fraction(table[0])


def weighted_antichain_sum(P, w=None, method="auto"):
    """Exact sum over antichains I of prod_{x in I} weight(x)."""
    if method == "auto":
        method = "enumerate" if len(P) <= 20 else "dp"
    if method == "enumerate":
        return weighted_antichain_sum_enum(P, w)
    if method == "dp":
        return weighted_antichain_sum_dp(P, w)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class BipartiteGraph:
    """Bipartite graph on A and B; A carries a uniform weight ``mu``, B per-node weights."""

    A: tuple
    B: tuple
    edges: frozenset
    mu: Fraction = Fraction(1)
    lam: dict = field(default_factory=dict)

    def __post_init__(self):
        self.A = tuple(self.A)
        self.B = tuple(self.B)
        self.edges = frozenset((a, b) for a, b in self.edges)
        self.mu = Fraction(self.mu)
        self.lam = {u: Fraction(self.lam.get(u, 1)) for u in self.B}
        sa, sb = set(self.A), set(self.B)
        if sa & sb:
            raise ValueError("A and B must be disjoint")
        for a, b in self.edges:
            if a not in sa or b not in sb:
                raise ValueError(f"edge {(a, b)!r} must join A to B")

    def neighbors(self, v):
        if v in self.lam:
            return frozenset(a for a, b in self.edges if b == v)
        return frozenset(b for a, b in self.edges if a == v)

    def degree(self, v):
        return len(self.neighbors(v))

    @classmethod
    def complete(cls, p, q, mu=1, lam=1):
        A = tuple(f"a{i}" for i in range(p))
        B = tuple(f"b{j}" for j in range(q))
        return cls(A, B, {(a, b) for a in A for b in B}, mu, {b: lam for b in B})


def independence_poly(G):
    """Z(G, lambda): sum over independent sets of the product of vertex weights."""
    if len(G.A) + len(G.B) > INDEPENDENCE_MAX_NODES:
        raise PosetSizeError(
            f"graph has {len(G.A) + len(G.B)} vertices (limit {INDEPENDENCE_MAX_NODES})")
    # enumerate subsets of the smaller side; the other side is then free
    if len(G.A) <= len(G.B):
        side, weights = G.A, [G.mu] * len(G.A)
        other, other_w = G.B, G.lam
    else:
        side, weights = G.B, [G.lam[u] for u in G.B]
        other, other_w = G.A, {a: G.mu for a in G.A}
    pos = {u: j for j, u in enumerate(other)}
    nbr = []
    for v in side:
        m = 0
        for u in G.neighbors(v):
            m |= 1 << pos[u]
        nbr.append(m)
    free_factor = [Fraction(1) + other_w[u] for u in other]

    total = Fraction(0)
    for subset in range(1 << len(side)):
        blocked = 0
        weight = Fraction(1)
        for j in range(len(side)):
            if subset >> j & 1:
                blocked |= nbr[j]
                weight *= weights[j]
        for j, f in enumerate(free_factor):
            if not blocked >> j & 1:
                weight *= f
        total += weight
    return total


class CountCache:
    """JSON cache of exact grid antichain counts, keyed by ``"t,n,engineVersion"``.

    Unreadable files and malformed entries are ignored (and recomputed).
    """

    _lock = threading.Lock()

    def __init__(self, cache_dir):
        self.path = Path(cache_dir) / "alpha_cache.json"

    @staticmethod
    def key(t, n, version=ENGINE_VERSION):
        return f"{t},{n},{version}"

    def _load(self):
        try:
            doc = json.loads(self.path.read_text())
            alpha = doc.get("alpha", {})
            return alpha if isinstance(alpha, dict) else {}
        except (OSError, ValueError, AttributeError):
            return {}

    def get(self, t, n, version=ENGINE_VERSION):
        with self._lock:
            raw = self._load().get(self.key(t, n, version))
        if isinstance(raw, str) and raw.isdigit():
            return int(raw)
        return None

    def put(self, t, n, value, version=ENGINE_VERSION):
        with self._lock:
            alpha = {k: v for k, v in self._load().items() if isinstance(v, str) and v.isdigit()}
            alpha[self.key(t, n, version)] = str(int(value))
            self.path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self.path.with_suffix(f".tmp{os.getpid()}")
            tmp.write_text(json.dumps({"alpha": alpha}, indent=1, sort_keys=True))
            os.replace(tmp, self.path)


def default_cache_dir():
    env = os.environ.get("ANTICHAIN_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "antichains"


def grid_alpha(t, n, cache=None, max_width=DP_MAX_WIDTH, backend=None, node_budget=None):
    """alpha([t]^n) via the DP engine, reading and filling ``cache`` when given."""
    from .poset import DEFAULT_NODE_BUDGET, build_grid, middle_layer_size

    if cache is not None:
        hit = cache.get(t, n)
        if hit is not None:
            return hit
    if middle_layer_size(t, n) > max_width:
        raise PosetSizeError(
            f"[{t}]^{n} has level width {middle_layer_size(t, n)} > cap {max_width}")
    grid = build_grid(t, n, node_budget or DEFAULT_NODE_BUDGET)
    value = count_antichains_dp(grid, max_width=max_width, backend=backend)
    if cache is not None:
        cache.put(t, n, value)
    return value
