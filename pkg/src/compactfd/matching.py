"""Polynomial solvers for the (alpha, beta) = (1, 0) case.

With a radius of zero every bundle has at most one item, so the graph drops
out entirely.  Proportionality and maximin reduce to saturating matchings in
an agents-items bipartite graph; envy-freeness under the exactly-one-item
constraint is solved by iterated Hall-violator removal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .model import Allocation, Instance, total_value


@dataclass(frozen=True)
class AgentItemGraph:
    """Bipartite eligibility graph: adj[i] lists the items agent i accepts."""

    n_agents: int
    n_items: int
    adj: tuple[tuple[int, ...], ...]


def build_agent_item_graph(instance: Instance, eligible: Callable[[int, int], bool]) -> AgentItemGraph:
    adj = tuple(
        tuple(z for z in range(instance.m) if eligible(i, z)) for i in range(instance.n)
    )
    return AgentItemGraph(instance.n, instance.m, adj)


def maximum_matching(graph: AgentItemGraph, agents: Optional[list[int]] = None) -> dict[int, int]:
    """Maximum matching via augmenting paths; returns agent -> item.

    Agents are processed in ascending order, so the result is deterministic.
    `agents` restricts which left vertices participate.
    """
    if agents is None:
        agents = list(range(graph.n_agents))
    item_owner: dict[int, int] = {}
    agent_item: dict[int, int] = {}

    def try_augment(a: int, visited: set[int]) -> bool:
        for z in graph.adj[a]:
            if z in visited:
                continue
            visited.add(z)
            owner = item_owner.get(z)
            if owner is None or try_augment(owner, visited):
                item_owner[z] = a
                agent_item[a] = z
                return True
        return False

    for a in sorted(agents):
        try_augment(a, set())
    return agent_item


def _threshold_matching(instance: Instance, thresholds: list[int]) -> Optional[Allocation]:
    """Match every agent whose threshold is positive to an item worth at
    least that threshold; agents with threshold 0 are content with nothing.

    Returns the single-item allocation or None when no saturating matching
    of the needing agents exists.
    """
    needing = [i for i in range(instance.n) if thresholds[i] > 0]
    graph = build_agent_item_graph(
        instance, lambda i, z: instance.values[i][z] >= thresholds[i]
    )
    matched = maximum_matching(graph, needing)
    if len(matched) < len(needing):
        return None
    bundles = [frozenset() for _ in range(instance.n)]
    for a, z in matched.items():
        bundles[a] = frozenset([z])
    return Allocation(tuple(bundles))


def solve_prop_10(instance: Instance) -> Optional[Allocation]:
    """Proportional (1, 0)-compact allocation or None.

    Agent i accepts item z when n * v_i(z) >= W_i.  A saturating matching of
    the agents with W_i > 0 is necessary and sufficient; agents with W_i = 0
    are proportional with an empty bundle, so they never block a yes answer.
    """
    n = instance.n
    totals = [total_value(instance, i) for i in range(n)]
    needing = [i for i in range(n) if totals[i] > 0]
    graph = build_agent_item_graph(
        instance, lambda i, z: n * instance.values[i][z] >= totals[i]
    )
    matched = maximum_matching(graph, needing)
    if len(matched) < len(needing):
        return None
    bundles = [frozenset() for _ in range(n)]
    for a, z in matched.items():
        bundles[a] = frozenset([z])
    return Allocation(tuple(bundles))


def mms_10(instance: Instance, agent: int) -> int:
    """Maximin share for the one-item bundle class: 0 when m < n, otherwise
    the agent's n-th largest item value."""
    if not (0 <= agent < instance.n):
        raise ValueError(f"agent {agent} out of range")
    if instance.m < instance.n:
        return 0
    ordered = sorted(instance.values[agent], reverse=True)
    return ordered[instance.n - 1]


def solve_mms_10(instance: Instance) -> Optional[Allocation]:
    """Maximin-fair (1, 0)-compact allocation.

    Eligibility is v_i(z) >= mms_10(i).  When m < n every threshold is 0 and
    the empty bundles already satisfy everyone, so the partial matching
    outcome is returned.  A qualifying matching always exists: each agent has
    at least n items at or above her own n-th largest value.
    """
    thresholds = [mms_10(instance, i) for i in range(instance.n)]
    return _threshold_matching(instance, thresholds)


def solve_ef_one_item(instance: Instance) -> Optional[Allocation]:
    """Envy-free assignment of exactly one item per agent, or None.

    Loop: join each agent to her maximum-value items among the remaining
    ones (ties included) and look for a matching saturating all agents.  On
    failure, take the first unmatched agent, collect the agents reachable by
    alternating paths (a Hall violator S with |N(S)| < |S|), delete the items
    N(S), and repeat.  Fewer remaining items than agents means no.
    """
    n = instance.n
    remaining = set(range(instance.m))
    while True:
        if len(remaining) < n:
            return None
        adj = []
        for i in range(n):
            best = max(instance.values[i][z] for z in remaining)
            adj.append(tuple(z for z in sorted(remaining) if instance.values[i][z] == best))
        graph = AgentItemGraph(n, instance.m, tuple(adj))
        matched = maximum_matching(graph)
        if len(matched) == n:
            bundles = [frozenset([matched[i]]) for i in range(n)]
            return Allocation(tuple(bundles))
        unmatched = min(i for i in range(n) if i not in matched)
        item_owner = {z: a for a, z in matched.items()}
        reach_agents = {unmatched}
        reach_items: set[int] = set()
        frontier = [unmatched]
        while frontier:
            nxt = []
            for a in frontier:
                for z in graph.adj[a]:
                    if z in reach_items:
                        continue
                    reach_items.add(z)
                    owner = item_owner.get(z)
                    if owner is not None and owner not in reach_agents:
                        reach_agents.add(owner)
                        nxt.append(owner)
            frontier = nxt
        # neighbourhood of the violator; nonempty because favourites exist
        remaining -= reach_items
