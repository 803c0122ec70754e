import itertools
import random

import pytest

from compactfd import (
    CompactnessSpec,
    Instance,
    is_compact_allocation,
    solve_oracle,
    solve_prop_10,
    solve_prop_path_agents,
    solve_prop_path_types,
)
from compactfd.model import FairnessGoal, is_proportional
from compactfd.path_dp import AgentTypeProfile, PathInstance, derive_type_profile, path_order

from conftest import random_instance


def path_instance(values, bundle_value=None):
    m = len(values[0]) if values[0] else 0
    inst = Instance(m, [(i, i + 1) for i in range(m - 1)], values)
    return inst, PathInstance(inst, bundle_value)


def test_path_order():
    inst = Instance(4, [(2, 3), (0, 1), (1, 2)], [[1, 1, 1, 1]])
    assert path_order(inst.graph()) == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        path_order(Instance(3, [(0, 1), (1, 2), (0, 2)], [[1, 1, 1]]).graph())
    with pytest.raises(ValueError):
        path_order(Instance(4, [(0, 1), (2, 3)], [[1] * 4]).graph())
    assert path_order(Instance(1, [], [[1]]).graph()) == [0]


def test_four_vertex_example():
    inst, pi = path_instance([[1, 1, 1, 1], [1, 1, 1, 1]])
    alloc = solve_prop_path_agents(pi, 1)
    assert alloc is not None
    assert is_proportional(inst, alloc)
    assert is_compact_allocation(inst, alloc, CompactnessSpec(1, 1))
    # oracle agrees on this instance
    assert solve_oracle(inst, CompactnessSpec(1, 1), FairnessGoal.PROPORTIONAL) is not None


def test_beta_zero_matches_matching_solver():
    rng = random.Random(3)
    for _ in range(30):
        m = rng.randint(0, 6)
        inst = random_instance(rng, m, rng.randint(1, 3), vmax=5, shape="path")
        pi = PathInstance(inst)
        a = solve_prop_path_agents(pi, 0)
        b = solve_prop_10(inst)
        assert (a is None) == (b is None)


def test_single_agent_whole_path():
    inst, pi = path_instance([[1, 1, 1, 1, 1]])
    # the whole path fits one ball iff m <= 2*beta + 1
    assert solve_prop_path_agents(pi, 2) is not None
    assert solve_prop_path_agents(pi, 1) is None
    # strong variant needs diameter <= beta
    assert solve_prop_path_agents(pi, 4, strong=True) is not None
    assert solve_prop_path_agents(pi, 3, strong=True) is None


def test_types_dp_base_cases():
    inst, pi = path_instance([[1, 1, 1, 1], [1, 1, 1, 1]])
    prof = derive_type_profile(inst)
    assert prof.p == 1 and prof.counts == (2,)
    a = solve_prop_path_types(pi, 1)
    assert a is not None and is_proportional(inst, a)


def test_types_vs_agents_on_corpus():
    rng = random.Random(8)
    for _ in range(40):
        m = rng.randint(0, 7)
        n = rng.randint(1, 3)
        if rng.random() < 0.5 and n > 1:
            base = [rng.randint(0, 5) for _ in range(m)]
            values = [list(base) for _ in range(n)]
        else:
            values = [[rng.randint(0, 5) for _ in range(m)] for _ in range(n)]
        inst, pi = path_instance(values)
        for beta in (0, 1, 2):
            for strong in (False, True):
                a = solve_prop_path_agents(pi, beta, strong)
                t = solve_prop_path_types(pi, beta, strong)
                assert (a is None) == (t is None)
                spec = CompactnessSpec(1, beta, strong)
                for w in (a, t):
                    if w is not None:
                        assert is_proportional(inst, w)
                        assert is_compact_allocation(inst, w, spec)


def brute_force_blocks(pi, beta, strong, n):
    """Independent check: try all assignments of disjoint contiguous blocks."""
    cap = beta + 1 if strong else 2 * beta + 1
    m = pi.m
    blocks = [(lo, hi) for lo in range(m) for hi in range(lo, min(m, lo + cap) + 1)]
    tot = [pi.total(a) for a in range(n)]

    def ok(assign):
        for a, (lo, hi) in enumerate(assign):
            if n * pi.block_value(a, lo, hi) < tot[a]:
                return False
        spans = sorted((lo, hi) for lo, hi in assign if lo < hi)
        for (l1, h1), (l2, h2) in zip(spans, spans[1:]):
            if l2 < h1:
                return False
        return True

    return any(ok(assign) for assign in itertools.product(blocks, repeat=n))


def test_non_additive_threshold_valuation():
    # worth 1 once the block sum reaches the threshold, else 0; not additive
    values = [[1, 2, 1, 1, 2], [2, 1, 1, 2, 1]]
    thresholds = [3, 4]
    inst = Instance(5, [(i, i + 1) for i in range(4)], values)

    def bv(agent, verts):
        return 1 if sum(values[agent][z] for z in verts) >= thresholds[agent] else 0

    pi = PathInstance(inst, bundle_value=bv)
    for beta in (0, 1, 2):
        for strong in (False, True):
            a = solve_prop_path_agents(pi, beta, strong)
            t = solve_prop_path_types(pi, beta, strong)
            want = brute_force_blocks(pi, beta, strong, 2)
            assert (a is not None) == want
            assert (t is not None) == want


def test_table_shape_limits():
    # the asserts inside the solvers enforce the table ceilings; this runs a
    # few sizes to exercise them
    rng = random.Random(12)
    for m in (0, 3, 6):
        inst = random_instance(rng, m, 3, vmax=3, shape="path")
        solve_prop_path_agents(PathInstance(inst), 1)
        solve_prop_path_types(PathInstance(inst), 1)


def test_explicit_profile_validation():
    inst, pi = path_instance([[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        AgentTypeProfile((0, 0), (1, 1))
    prof = AgentTypeProfile((0, 1), (1, 1))
    assert solve_prop_path_types(pi, 1, profile=prof) is not None
