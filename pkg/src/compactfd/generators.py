"""Instance builders seeded from classic hard problems.

Each builder embeds a source combinatorial problem (integer partition, exact
cover by fixed-size sets, diameter-bounded subgraph search) into a fair
division instance whose yes/no status equals the source's, so generated
corpora come with known answers.  The rational value tables of the
constructions are scaled to integers by the least common multiple of their
denominators; every agent's total value then equals that denominator.

The companion brute-force checkers (`has_partition`, `has_exact_cover`,
`has_beta_club`) answer the source problems directly and independently.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm
from typing import Sequence

from .compactness import Graph, diameter, induced_subgraph
from .model import Instance


@dataclass(frozen=True)
class PartitionSource:
    """Non-negative integers with an even sum."""

    numbers: tuple[int, ...]

    def __post_init__(self):
        if any(x < 0 for x in self.numbers):
            raise ValueError("numbers must be non-negative")
        if sum(self.numbers) % 2 != 0:
            raise ValueError("sum must be even")


@dataclass(frozen=True)
class XacSource:
    """Exact-cover source: universe of size alpha*s, family of alpha-sized sets.

    More sets than needed (r > s) is required; smaller families decide
    themselves trivially and the embedding assumes the slack.
    """

    universe: tuple[int, ...]
    family: tuple[frozenset[int], ...]

    def __post_init__(self):
        uni = set(self.universe)
        if len(uni) != len(self.universe):
            raise ValueError("universe has duplicates")
        sizes = {len(f) for f in self.family}
        if len(sizes) != 1:
            raise ValueError("all family sets must have one common size")
        alpha = sizes.pop()
        if alpha < 1 or len(uni) % alpha != 0:
            raise ValueError("universe size must be a multiple of the set size")
        for f in self.family:
            if not f <= uni:
                raise ValueError("family sets must be subsets of the universe")
        if len(self.family) <= len(uni) // alpha:
            raise ValueError("need more sets than an exact cover uses (r > s)")

    @property
    def alpha(self) -> int:
        return len(self.family[0])

    @property
    def s(self) -> int:
        return len(self.universe) // self.alpha

    @property
    def r(self) -> int:
        return len(self.family)


@dataclass(frozen=True)
class ClubSource:
    """Graph H with a target size k and radius beta: does H contain exactly k
    vertices inducing a subgraph of diameter at most beta?"""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    k: int
    beta: int

    def __post_init__(self):
        if not (1 < self.k < self.num_vertices):
            raise ValueError("need 1 < k < |V(H)|")
        if self.beta < 1:
            raise ValueError("beta must be >= 1")
        Graph(range(self.num_vertices), self.edges)  # validates the edge list

    def graph(self) -> Graph:
        return Graph(range(self.num_vertices), self.edges)


# ---------------------------------------------------------------------------
# source brute forces


def has_partition(numbers: Sequence[int]) -> bool:
    total = sum(numbers)
    if total % 2 != 0:
        return False
    target = total // 2
    reachable = 1
    for x in numbers:
        reachable |= reachable << x
    return bool((reachable >> target) & 1)


def has_exact_cover(source: XacSource) -> bool:
    uni = frozenset(source.universe)
    for picks in itertools.combinations(source.family, source.s):
        union = frozenset().union(*picks)
        if union == uni and sum(len(f) for f in picks) == len(uni):
            return True
    return False


def has_beta_club(source: ClubSource) -> bool:
    graph = source.graph()
    for subset in itertools.combinations(range(source.num_vertices), source.k):
        if diameter(induced_subgraph(graph, subset)) <= source.beta:
            return True
    return False


# ---------------------------------------------------------------------------
# builders


def gen_from_partition(source: PartitionSource) -> Instance:
    """Two agents with identical values on a clique.

    A fair split exists iff the numbers split into two halves of equal sum,
    and cliques make every bundle compact, so the compactness parameters do
    not matter (any alpha, beta >= 1).
    """
    m = len(source.numbers)
    edges = [(u, v) for u in range(m) for v in range(u + 1, m)]
    return Instance(m, edges, [list(source.numbers), list(source.numbers)])


def gen_from_xac(
    source: XacSource, alpha: int, variant: str = "prop", strong: bool = False
) -> Instance:
    """Edgeless instance whose target question encodes exact cover.

    Items: one per universe element, r - s filler items, and (prop variant
    only) one special item wanted by an extra dummy agent.  `variant` picks
    the value table: "prop" targets proportionality, "cef" and "poef" target
    envy-freeness with completeness or Pareto-optimality (both share one
    table).  Edgeless graphs make compact and strongly compact coincide, so
    `strong` changes nothing about the instance; it is accepted to mirror
    the strongly-compact reading of the same construction.

    Vertex order: universe items (sorted), fillers, then the special item.
    Agent order: one per family set, then the dummy agent (prop only).
    """
    if alpha != source.alpha:
        raise ValueError(f"alpha {alpha} does not match the family's set size {source.alpha}")
    if alpha < 3:
        raise ValueError("the construction targets alpha >= 3")
    if variant not in ("prop", "cef", "poef"):
        raise ValueError(f"unknown variant {variant!r}")
    del strong
    r, s = source.r, source.s
    uni = sorted(source.universe)
    pos = {x: k for k, x in enumerate(uni)}
    fillers = r - s
    if variant == "prop":
        denom = lcm(alpha * (r + 1), r + 1)
        set_item = denom // (alpha * (r + 1))
        filler_item = denom // (r + 1)
        special = s * denom // (r + 1)
        m = len(uni) + fillers + 1
        rows = []
        for f in source.family:
            row = [0] * m
            for x in f:
                row[pos[x]] = set_item
            for j in range(fillers):
                row[len(uni) + j] = filler_item
            row[m - 1] = special
            rows.append(row)
        dummy = [0] * m
        dummy[m - 1] = denom
        rows.append(dummy)
        return Instance(m, [], rows)
    denom = lcm(alpha * (r - s + 1), r - s + 1)
    set_item = denom // (alpha * (r - s + 1))
    filler_item = denom // (r - s + 1)
    m = len(uni) + fillers
    rows = []
    for f in source.family:
        row = [0] * m
        for x in f:
            row[pos[x]] = set_item
        for j in range(fillers):
            row[len(uni) + j] = filler_item
        rows.append(row)
    return Instance(m, [], rows)


def gen_from_club(source: ClubSource, alpha: int, variant: str = "prop") -> Instance:
    """Instance whose strongly compact target question encodes the club search.

    The club graph H is kept as-is and padded with isolated vertices: under
    the "prop" variant a special agent must grab exactly k club vertices plus
    alpha - 1 isolated helpers to reach her share, which forces a size-k set
    of diameter at most beta.  The "cef" variant swaps proportionality for
    completeness plus envy-freeness and first pads H so that
    |V(H)| + alpha - 1 is a multiple of k + alpha - 1.

    Vertex order, prop: H vertices, x_1..x_{alpha-1}, y_1..y_{s+k-1}; agent
    order: special, regulars, dummies.  Vertex order, cef: padded H vertices,
    x's, y_1..y_p, y'_1..y'_k; agent order: special, one regular per H
    vertex, dummies.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if variant not in ("prop", "cef"):
        raise ValueError(f"unknown variant {variant!r}")
    k, beta = source.k, source.beta
    del beta  # the radius parametrizes the target problem, not the instance
    if variant == "prop":
        s = source.num_vertices
        denom = 2 * alpha * k * s * (s + k - 1)
        m = s + (alpha - 1) + (s + k - 1)
        x_at = s
        y_at = s + alpha - 1
        special = [0] * m
        for i in range(s):
            special[i] = denom // (2 * alpha * k * s)
        for j in range(alpha - 1):
            special[x_at + j] = denom // (2 * alpha * s)
        for j in range(s + k - 1):
            special[y_at + j] = 2 * alpha * k * s - (s + alpha * k - k)
        rows = [special]
        for _ in range(s - k):
            reg = [0] * m
            for i in range(s):
                reg[i] = denom // (2 * s)
            for j in range(s + k - 1):
                reg[y_at + j] = denom // (2 * (s + k - 1))
            rows.append(reg)
        for j in range(s + k - 1):
            dummy = [0] * m
            dummy[y_at + j] = denom
            rows.append(dummy)
        return Instance(m, list(source.edges), rows)
    # cef: pad H with isolated vertices until s + alpha - 1 divides cleanly
    s = source.num_vertices
    while (s + alpha - 1) % (k + alpha - 1) != 0:
        s += 1
    p = (s + alpha - 1) // (k + alpha - 1)
    denom = lcm(2 * (s + alpha - 1), 2 * p, k + 1)
    x_at = s
    y_at = s + alpha - 1
    yp_at = y_at + p
    m = yp_at + k
    special = [0] * m
    for i in range(s):
        special[i] = denom // (2 * (s + alpha - 1))
    for j in range(alpha - 1):
        special[x_at + j] = denom // (2 * (s + alpha - 1))
    for j in range(p):
        special[y_at + j] = denom // (2 * p)
    rows = [special]
    for i in range(s):
        reg = [0] * m
        reg[i] = denom // (k + 1)
        for ell in range(k):
            reg[yp_at + ell] = denom // (k + 1)
        rows.append(reg)
    for j in range(p):
        dummy = [0] * m
        dummy[y_at + j] = denom
        rows.append(dummy)
    return Instance(m, list(source.edges), rows)
