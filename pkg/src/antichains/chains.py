"""Bracket-matching chain partition of [t]^n.

Each point x becomes a string of n blocks of t-1 symbols: block i holds x_i
right parentheses followed by t-1-x_i left parentheses.  Points with the same
set of matched parenthesis pairs form one saturated chain, and there are
exactly N(t, n) such chains.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass

from .poset import DEFAULT_NODE_BUDGET, Point, PosetSizeError, middle_layer_size

RIGHT, LEFT = ")", "("


class InternalConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class BracketConfig:
    symbols: tuple
    block_of: tuple
    matched: tuple  # (open, close) position pairs, 1-based, sorted

    def __str__(self):
        return "".join(self.symbols)

    @property
    def unmatched(self):
        used = {p for pair in self.matched for p in pair}
        return tuple(i for i in range(1, len(self.symbols) + 1) if i not in used)


def _coords(x):
    if isinstance(x, Point):
        return x.coords, x.t
    raise TypeError(f"expected a Point, got {type(x).__name__}")


def bracket_symbols(coords, t):
    symbols = []
    block_of = []
    for i, c in enumerate(coords, start=1):
        symbols.extend([RIGHT] * c + [LEFT] * (t - 1 - c))
        block_of.extend([i] * (t - 1))
    return tuple(symbols), tuple(block_of)


def matched_pairs(coords, t):
    """Maximal bracket matching of the configuration of ``coords``."""
    stack = []
    pairs = []
    pos = 0
    for c in coords:
        for s in range(t - 1):
            pos += 1
            if s >= c:
                stack.append(pos)
            elif stack:
                pairs.append((stack.pop(), pos))
    pairs.sort()
    return tuple(pairs)


def bracket_config(x):
    coords, t = _coords(x)
    symbols, block_of = bracket_symbols(coords, t)
    return BracketConfig(symbols, block_of, matched_pairs(coords, t))


def _check_budget(t, n, node_budget):
    if t**n > node_budget:
        raise PosetSizeError(f"[{t}]^{n} has {t**n} points, over the node budget {node_budget}")


def chain_class(x, node_budget=DEFAULT_NODE_BUDGET):
    """All points with the same matched set as ``x``, sorted by rank."""
    coords, t = _coords(x)
    n = len(coords)
    _check_budget(t, n, node_budget)
    target = matched_pairs(coords, t)
    members = [y for y in itertools.product(range(t), repeat=n) if matched_pairs(y, t) == target]
    members.sort(key=lambda y: (sum(y), y))
    return members


@dataclass
class ChainDecomposition:
    t: int
    n: int
    chains: list
    signature_index: dict

    def chain_of(self, x):
        coords = x.coords if isinstance(x, Point) else tuple(x)
        return self.chains[self.signature_index[matched_pairs(coords, self.t)]]

    def sizes(self):
        return sorted((len(c) for c in self.chains), reverse=True)

    def to_dict(self):
        return {"t": self.t, "n": self.n, "chains": [[list(p) for p in c] for c in self.chains]}


@dataclass
class DecompositionReport:
    points: int
    chains: int
    expected_chains: int
    partition: bool
    saturated: bool
    count_matches: bool
    unique_membership: bool
    counterexample: str | None = None

    @property
    def ok(self):
        return self.partition and self.saturated and self.count_matches and self.unique_membership

    def to_dict(self):
        return {
            "points": self.points,
            "chains": self.chains,
            "expected_chains": self.expected_chains,
            "partition": self.partition,
            "saturated_covers": self.saturated,
            "chain_count_is_N": self.count_matches,
            "unique_membership": self.unique_membership,
            "counterexample": self.counterexample,
        }


def decompose(t, n, node_budget=DEFAULT_NODE_BUDGET, check=True):
    if t < 1 or n < 1:
        raise ValueError(f"need t >= 1 and n >= 1, got t={t}, n={n}")
    _check_budget(t, n, node_budget)
    groups = defaultdict(list)
    for y in itertools.product(range(t), repeat=n):
        groups[matched_pairs(y, t)].append(y)
    signatures = sorted(groups, key=lambda s: (len(s), s))
    chains = []
    index = {}
    for sig in signatures:
        members = sorted(groups[sig], key=lambda y: (sum(y), y))
        index[sig] = len(chains)
        chains.append(members)
    D = ChainDecomposition(t, n, chains, index)
    if check:
        report = verify_decomposition(D)
        if not report.ok:
            raise InternalConsistencyError(f"bracket decomposition failed verification: {report}")
    return D


def _is_cover(y, x):
    diff = [b - a for a, b in zip(y, x)]
    return sorted(diff) == [0] * (len(diff) - 1) + [1]


def verify_decomposition(D, P=None):
    """Check partition, saturated steps, chain count N(t, n) and unique membership.

    ``P`` may be the grid as a LeveledPoset; by default the point set is
    enumerated directly.
    """
    t, n = D.t, D.n
    if P is not None:
        universe = set(P.nodes())
    else:
        universe = set(itertools.product(range(t), repeat=n))
    counterexample = None

    seen = {}
    unique = True
    for c, chain in enumerate(D.chains):
        for y in chain:
            y = tuple(y)
            if y in seen:
                unique = False
                counterexample = counterexample or f"point {y} in chains {seen[y]} and {c}"
            seen[y] = c
    covered = set(seen)
    partition = covered == universe and all(D.chains)
    if not partition and counterexample is None:
        stray = sorted(covered ^ universe)[:1]
        counterexample = f"point set mismatch at {stray}" if stray else "empty chain present"

    saturated = True
    for chain in D.chains:
        for y, x in zip(chain, chain[1:]):
            if not _is_cover(tuple(y), tuple(x)):
                saturated = False
                counterexample = counterexample or f"{tuple(y)} -> {tuple(x)} is not a cover step"
                break

    expected = middle_layer_size(t, n)
    count_ok = len(D.chains) == expected
    if not count_ok and counterexample is None:
        counterexample = f"{len(D.chains)} chains, expected N({t},{n}) = {expected}"
    return DecompositionReport(len(universe), len(D.chains), expected, partition, saturated,
                               count_ok, unique, counterexample)
