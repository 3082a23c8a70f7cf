"""Graded posets, the grid [t]^n, and the induced subposets used by the bounds.

Levels are indexed from 0.  Comparability is the transitive closure of the
cover edges, which only join adjacent levels.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import gmpy2

DEFAULT_NODE_BUDGET = 10**6
INFINITY = math.inf


class PosetSizeError(ValueError):
    """A requested structure exceeds a configured size cap."""


class PosetFormatError(ValueError):
    """A graded-poset document violates the file format or its invariants."""


@dataclass(frozen=True)
class Point:
    """A point of [t]^n; ``rank`` is the coordinate sum."""

    coords: tuple
    t: int

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")
        for i, c in enumerate(self.coords):
            if not 0 <= c <= self.t - 1:
                raise ValueError(f"coordinate {i} = {c} outside [0, {self.t - 1}]")

    @property
    def n(self):
        return len(self.coords)

    @property
    def rank(self):
        return sum(self.coords)

    def count(self, value):
        """Number of coordinates equal to ``value``."""
        return self.coords.count(value)

    def __le__(self, other):
        return all(a <= b for a, b in zip(self.coords, other.coords))

    def __lt__(self, other):
        return self.coords != other.coords and self <= other


class LeveledPoset:
    """An explicit graded poset.

    ``levels`` is a sequence of node lists (levels may be empty) and
    ``covers`` a collection of node pairs joining adjacent levels; each pair is
    stored as ``(lower, upper)`` regardless of the order given.  ``origin``
    is free-form metadata (for grids: ``{"t": t, "n": n}``).
    """

    def __init__(self, levels, covers=(), origin=None):
        self._levels = tuple(tuple(level) for level in levels)
        if not self._levels:
            raise ValueError("a leveled poset needs at least one level")
        level_of = {}
        for i, level in enumerate(self._levels):
            for node in level:
                if node in level_of:
                    raise ValueError(f"node {node!r} appears more than once")
                level_of[node] = i
        self._level_of = level_of
        normalized = set()
        for edge in covers:
            a, b = edge
            if a not in level_of or b not in level_of:
                missing = a if a not in level_of else b
                raise ValueError(f"cover {edge!r} references unknown node {missing!r}")
            la, lb = level_of[a], level_of[b]
            if abs(la - lb) != 1:
                raise ValueError(f"cover {edge!r} joins levels {la} and {lb}, not adjacent ones")
            normalized.add((a, b) if la < lb else (b, a))
        self._covers = frozenset(normalized)
        self.origin = dict(origin) if origin else {}

    @property
    def levels(self):
        return self._levels

    @property
    def covers(self):
        return self._covers

    @property
    def k(self):
        return len(self._levels)

    def __len__(self):
        return len(self._level_of)

    def __contains__(self, node):
        return node in self._level_of

    def __repr__(self):
        return f"LeveledPoset(level_sizes={self.level_sizes}, covers={len(self._covers)})"

    @property
    def level_sizes(self):
        return tuple(len(level) for level in self._levels)

    def nodes(self):
        return [v for level in self._levels for v in level]

    def level_of(self, node):
        return self._level_of[node]

    @cached_property
    def _adjacency(self):
        up = {v: [] for v in self._level_of}
        down = {v: [] for v in self._level_of}
        for a, b in sorted(self._covers, key=lambda e: (self._level_of[e[0]], repr(e))):
            up[a].append(b)
            down[b].append(a)
        return ({v: tuple(ws) for v, ws in up.items()},
                {v: tuple(ws) for v, ws in down.items()})

    def up(self, node):
        """Upper covers of ``node``."""
        return self._adjacency[0][node]

    def down(self, node):
        """Lower covers of ``node``."""
        return self._adjacency[1][node]

    @cached_property
    def _position(self):
        return {v: j for level in self._levels for j, v in enumerate(level)}

    def position(self, node):
        """Index of ``node`` inside its own level."""
        return self._position[node]

    def down_masks(self, i):
        """Bitmasks over level ``i-1`` positions of each level-``i`` node's lower covers."""
        return self._down_masks[i]

    @cached_property
    def _down_masks(self):
        pos = self._position
        masks = [[0] * len(self._levels[0])]
        for i in range(1, self.k):
            row = []
            for v in self._levels[i]:
                m = 0
                for w in self.down(v):
                    m |= 1 << pos[w]
                row.append(m)
            masks.append(row)
        return masks

    def below(self, node):
        """All nodes strictly below ``node``."""
        return self._closure([node], self.down)

    def above(self, node):
        return self._closure([node], self.up)

    def down_closure(self, nodes):
        """All nodes strictly below some node of ``nodes``."""
        return self._closure(nodes, self.down)

    @staticmethod
    def _closure(start, step):
        seen = set()
        frontier = set(start)
        while frontier:
            nxt = set()
            for v in frontier:
                nxt.update(step(v))
            nxt -= seen
            seen |= nxt
            frontier = nxt
        return frozenset(seen)

    def comparable(self, a, b):
        if a == b:
            return False
        la, lb = self._level_of[a], self._level_of[b]
        if la == lb:
            return False
        lo, hi = (a, b) if la < lb else (b, a)
        return lo in self.below(hi)

    def induced(self, keep, origin=None):
        """Induced subposet on ``keep`` with the original level indices."""
        keep = set(keep)
        levels = [[v for v in level if v in keep] for level in self._levels]
        covers = [(a, b) for a, b in self._covers if a in keep and b in keep]
        meta = dict(self.origin)
        if origin:
            meta.update(origin)
        return LeveledPoset(levels, covers, meta)

    def to_dict(self):
        levels = [[_jsonable(v) for v in level] for level in self._levels]
        covers = sorted([_jsonable(a), _jsonable(b)] for a, b in self._covers)
        return {"k": self.k, "levels": levels, "covers": covers}


def _jsonable(node):
    if isinstance(node, tuple):
        return [_jsonable(x) for x in node]
    return node


def _from_json_node(node):
    if isinstance(node, list):
        return tuple(_from_json_node(x) for x in node)
    return node


def build_grid(t, n, node_budget=DEFAULT_NODE_BUDGET):
    """The poset [t]^n; nodes are coordinate tuples and level index = rank."""
    if t < 1 or n < 1:
        raise ValueError(f"need t >= 1 and n >= 1, got t={t}, n={n}")
    if t**n > node_budget:
        raise PosetSizeError(f"[{t}]^{n} has {t**n} nodes, over the node budget {node_budget}")
    levels = [[] for _ in range((t - 1) * n + 1)]
    for x in itertools.product(range(t), repeat=n):
        levels[sum(x)].append(x)
    covers = []
    for level in levels:
        for x in level:
            for i, c in enumerate(x):
                if c + 1 < t:
                    covers.append((x, x[:i] + (c + 1,) + x[i + 1:]))
    return LeveledPoset(levels, covers, {"t": t, "n": n})


@lru_cache(maxsize=512)
def rank_sizes(t, n):
    """Coefficients of (1 + x + ... + x^{t-1})^n as exact integers."""
    if t < 1 or n < 0:
        raise ValueError(f"need t >= 1 and n >= 0, got t={t}, n={n}")
    coeffs = [1]
    for _ in range(n):
        prefix = [0]
        for c in coeffs:
            prefix.append(prefix[-1] + c)
        width = len(coeffs) + t - 1
        coeffs = [prefix[min(r + 1, len(coeffs))] - prefix[max(r - t + 1, 0)]
                  for r in range(width)]
    return tuple(coeffs)


@lru_cache(maxsize=512)
def middle_layer_size(t, n):
    """N(t, n): the number of points of [t]^n with rank floor((t-1)n/2)."""
    if t < 1 or n < 1:
        raise ValueError(f"need t >= 1 and n >= 1, got t={t}, n={n}")
    if t == 1:
        return 1
    middle = (t - 1) * n // 2
    if t == 2:
        return int(gmpy2.comb(n, middle))
    return rank_sizes(t, n)[middle]


def neighbors_in_level(P, v, i):
    """N^i(v): nodes of level ``i`` comparable to ``v``."""
    lv = P.level_of(v)
    if not 0 <= i < P.k:
        raise ValueError(f"level {i} outside 0..{P.k - 1}")
    if i == lv:
        return frozenset()
    step = P.down if i < lv else P.up
    frontier = {v}
    for _ in range(abs(lv - i)):
        nxt = set()
        for w in frontier:
            nxt.update(step(w))
        frontier = nxt
    return frozenset(frontier)


def level_degree(P, v, i):
    """d^i(v) = |N^i(v)|."""
    return len(neighbors_in_level(P, v, i))


def min_neighbor_updegree(P, v):
    """min over lower covers w of v of the number of upper covers of w.

    Returns ``INFINITY`` when v has no lower covers.
    """
    down = P.down(v)
    if not down:
        return INFINITY
    return min(len(P.up(w)) for w in down)


@dataclass(frozen=True)
class SubposetSpec:
    """Which induced subposet to take relative to a node set X inside one level.

    mode is one of ``"P_X"`` (levels below X's level, minus everything below
    X), ``"M_X"`` (X's level minus X), ``"below_closure"`` (everything below
    X) and ``"bar_P_Y"`` (the union of the P_X and M_X parts).  ``level`` must
    be given when ``nodes`` is empty.
    """

    mode: str
    nodes: frozenset = field(default_factory=frozenset)
    level: int | None = None

    MODES = ("P_X", "M_X", "below_closure", "bar_P_Y")

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        if self.mode not in self.MODES:
            raise ValueError(f"unknown subposet mode {self.mode!r}")


def subposet(P, spec):
    X = spec.nodes
    missing = [x for x in X if x not in P]
    if missing:
        raise ValueError(f"nodes not in poset: {missing[:3]!r}")
    levels = {P.level_of(x) for x in X}
    if spec.level is not None:
        levels.add(spec.level)
    if len(levels) != 1:
        if not levels:
            raise ValueError("empty node set needs an explicit level")
        raise ValueError(f"node set spans levels {sorted(levels)}; it must lie in one level")
    (j,) = levels
    if not 0 <= j < P.k:
        raise ValueError(f"level {j} outside 0..{P.k - 1}")

    shadow = P.down_closure(X)
    lower = [v for i in range(j) for v in P.levels[i]]
    if spec.mode == "below_closure":
        keep = shadow
    elif spec.mode == "P_X":
        keep = [v for v in lower if v not in shadow]
    elif spec.mode == "M_X":
        keep = [v for v in P.levels[j] if v not in X]
    else:
        keep = [v for v in lower if v not in shadow] + [v for v in P.levels[j] if v not in X]
    top = j if spec.mode in ("M_X", "bar_P_Y") else j - 1
    keep = set(keep)
    sub_levels = [[v for v in P.levels[i] if v in keep] for i in range(max(top, 0) + 1)]
    if top < 0:
        sub_levels = [[]]
    covers = [(a, b) for a, b in P.covers if a in keep and b in keep]
    return LeveledPoset(sub_levels, covers, dict(P.origin, mode=spec.mode, level=j))


def lower_part(P, j):
    """P restricted to levels 0..j."""
    return subposet(P, SubposetSpec("bar_P_Y", frozenset(), level=j))


def is_low(x):
    """True when some value l in 1..t-1 occurs fewer than n/(2t) times in x."""
    n, t = x.n, x.t
    return any(2 * t * x.count(l) < n for l in range(1, t))


@lru_cache(maxsize=1024)
def count_low_points(t, n):
    """Exact number of low points of [t]^n, without enumerating them."""
    if t < 1 or n < 1:
        raise ValueError(f"need t >= 1 and n >= 1, got t={t}, n={n}")
    if t == 1:
        return 0
    c = -(-n // (2 * t))  # high needs every count >= ceil(n / 2t)
    # seqs[m]: words of length m over the t-1 nonzero values, each used >= c times
    seqs = [1] + [0] * n
    for _ in range(t - 1):
        nxt = [0] * (n + 1)
        for m in range(n + 1):
            total = 0
            for d in range(c, m + 1):
                total += math.comb(m, d) * seqs[m - d]
            nxt[m] = total
        seqs = nxt
    high = sum(math.comb(n, m) * seqs[m] for m in range(n + 1))
    return t**n - high


def load_poset(source):
    """Parse a graded-poset JSON document (a string, or a path-like object).

    Node identifiers may be JSON scalars or arrays (arrays become tuples).
    """
    if hasattr(source, "read_text"):
        text = source.read_text()
    elif isinstance(source, str) and not source.lstrip().startswith("{"):
        with open(source) as fh:
            text = fh.read()
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PosetFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return poset_from_dict(doc)


def poset_from_dict(doc):
    if not isinstance(doc, dict):
        raise PosetFormatError("top level: expected a JSON object")
    for key in ("k", "levels", "covers"):
        if key not in doc:
            raise PosetFormatError(f"field {key!r}: missing")
    k, levels, covers = doc["k"], doc["levels"], doc["covers"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise PosetFormatError(f"field 'k': expected an integer >= 1, got {k!r}")
    if not isinstance(levels, list) or len(levels) != k:
        raise PosetFormatError(f"field 'levels': expected a list of {k} levels")
    parsed_levels = []
    seen = {}
    for i, level in enumerate(levels):
        if not isinstance(level, list):
            raise PosetFormatError(f"levels[{i}]: expected a list of node ids")
        row = []
        for j, node in enumerate(level):
            node = _from_json_node(node)
            if isinstance(node, (dict, float)) or node is None:
                raise PosetFormatError(f"levels[{i}][{j}]: invalid node id {node!r}")
            if node in seen:
                raise PosetFormatError(f"levels[{i}][{j}]: node {node!r} already in levels[{seen[node]}]")
            seen[node] = i
            row.append(node)
        parsed_levels.append(row)
    if not isinstance(covers, list):
        raise PosetFormatError("field 'covers': expected a list of [a, b] pairs")
    parsed_covers = []
    for e, edge in enumerate(covers):
        if not isinstance(edge, list) or len(edge) != 2:
            raise PosetFormatError(f"covers[{e}]: expected a pair [a, b]")
        a, b = (_from_json_node(x) for x in edge)
        for node in (a, b):
            if node not in seen:
                raise PosetFormatError(f"covers[{e}]: unknown node {node!r}")
        if abs(seen[a] - seen[b]) != 1:
            raise PosetFormatError(
                f"covers[{e}]: joins levels {seen[a]} and {seen[b]}, which are not consecutive")
        parsed_covers.append((a, b))
    extra = {key: doc[key] for key in doc if key not in ("k", "levels", "covers")}
    return LeveledPoset(parsed_levels, parsed_covers, extra.get("origin"))


def dump_poset(P, **extra):
    doc = P.to_dict()
    doc.update(extra)
    return json.dumps(doc, sort_keys=True)
