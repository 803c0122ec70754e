"""Shared corpus builders. Everything is seeded, so runs are reproducible."""
import itertools
import random

from compactfd import Graph, Instance
from compactfd.compactness import induced_subgraph, is_annotated


def random_edges(rng: random.Random, m: int, p: float) -> list[tuple[int, int]]:
    return [(u, v) for u in range(m) for v in range(u + 1, m) if rng.random() < p]


def shaped_edges(rng: random.Random, m: int, shape: str) -> list[tuple[int, int]]:
    if shape == "path":
        return [(i, i + 1) for i in range(m - 1)]
    if shape == "cycle":
        return [(i, (i + 1) % m) for i in range(m)] if m >= 3 else [(i, i + 1) for i in range(m - 1)]
    if shape == "star":
        return [(0, i) for i in range(1, m)]
    if shape == "clique":
        return [(u, v) for u in range(m) for v in range(u + 1, m)]
    if shape == "edgeless":
        return []
    return random_edges(rng, m, rng.choice([0.2, 0.35, 0.6]))


def random_instance(
    rng: random.Random,
    m: int,
    n: int,
    vmax: int = 12,
    shape: str = "random",
) -> Instance:
    edges = shaped_edges(rng, m, shape)
    values = [[rng.randint(0, vmax) for _ in range(m)] for _ in range(n)]
    return Instance(m, edges, values)


def random_graph(rng: random.Random, m: int, p: float) -> Graph:
    return Graph(range(m), random_edges(rng, m, p))


def direct_annotated_weights(ann):
    """Independent ground truth for a tiny annotated instance: enumerate every
    assignment of the surviving base vertices and keep the value matrices of
    the hub-centred allocations."""
    inst = ann.instance
    n = inst.n
    graph = inst.graph()
    out = set()
    for digits in itertools.product(range(n + 1), repeat=len(ann.kept)):
        bundles = [{ann.hubs[i]} for i in range(n)]
        for z, a in enumerate(digits):
            if a < n:
                bundles[a].add(z)
        if all(
            is_annotated(induced_subgraph(graph, bundles[i]), ann.hubs[i], ann.beta)
            for i in range(n)
        ):
            out.add(
                tuple(
                    sum(inst.values[i][z] for z in bundles[j])
                    for i in range(n)
                    for j in range(n)
                )
            )
    return out
