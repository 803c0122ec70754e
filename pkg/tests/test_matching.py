import itertools
import random

from compactfd import (
    Allocation,
    CompactnessSpec,
    Instance,
    mms_10,
    mms_oracle,
    solve_ef_one_item,
    solve_mms_10,
    solve_prop_10,
    solve_oracle,
)
from compactfd.model import FairnessGoal, bundle_value, is_envy_free, is_proportional

from conftest import random_instance

SPEC10 = CompactnessSpec(1, 0)


def test_prop_10_examples():
    halves = Instance(2, [], [[1, 1], [1, 1]])
    alloc = solve_prop_10(halves)
    assert alloc is not None and sorted(len(b) for b in alloc.bundles) == [1, 1]
    assert is_proportional(halves, alloc)

    skew = Instance(2, [], [[3, 1], [3, 1]])
    # brute force over all (1,0)-compact allocations confirms the no
    found = False
    for b0, b1 in itertools.product([None, 0, 1], repeat=2):
        if b0 is not None and b0 == b1:
            continue
        alloc = Allocation.of([{b0} if b0 is not None else set(), {b1} if b1 is not None else set()])
        if is_proportional(skew, alloc):
            found = True
    assert not found
    assert solve_prop_10(skew) is None


def test_prop_10_single_agent():
    # one agent is proportional with a single item iff the rest is worthless
    assert solve_prop_10(Instance(3, [], [[5, 0, 0]])) is not None
    assert solve_prop_10(Instance(3, [], [[5, 1, 0]])) is None
    # all-zero values: the empty bundle is already proportional
    assert solve_prop_10(Instance(1, [], [[0], [0]])) is not None


def test_mms_10_examples():
    small = Instance(1, [], [[5], [5]])
    assert mms_10(small, 0) == 0
    inst = Instance(3, [], [[5, 3, 2], [5, 3, 2]])
    assert mms_10(inst, 0) == 3
    flat = Instance(4, [], [[7, 7, 7, 7], [7, 7, 7, 7]])
    assert mms_10(flat, 0) == 7


def test_mms_10_matches_oracle():
    rng = random.Random(2024)
    for _ in range(40):
        inst = random_instance(rng, rng.randint(0, 6), rng.randint(1, 3), vmax=6)
        for i in range(inst.n):
            assert mms_10(inst, i) == mms_oracle(inst, SPEC10, i)


def test_solve_mms_10():
    inst = Instance(3, [], [[5, 3, 2], [5, 3, 2]])
    alloc = solve_mms_10(inst)
    assert alloc is not None
    for i in range(2):
        assert bundle_value(inst, i, alloc.bundles[i]) >= 3
    # fewer items than agents: empty bundles suffice
    small = Instance(1, [], [[5], [5]])
    alloc = solve_mms_10(small)
    assert alloc is not None
    # single agent gets her single most valued item
    solo = Instance(3, [], [[2, 9, 4]])
    alloc = solve_mms_10(solo)
    assert alloc.bundles[0] == frozenset([1])


def test_ef_one_item_examples():
    disjoint = Instance(2, [], [[5, 0], [0, 5]])
    alloc = solve_ef_one_item(disjoint)
    assert alloc.bundles == (frozenset([0]), frozenset([1]))

    tied = Instance(2, [], [[5, 5], [5, 5]])
    alloc = solve_ef_one_item(tied)
    assert alloc is not None and is_envy_free(tied, alloc)

    clash = Instance(2, [], [[5, 3], [5, 3]])
    assert solve_ef_one_item(clash) is None


def test_ef_one_item_leftovers_stay_unallocated():
    inst = Instance(4, [], [[9, 1, 1, 1], [1, 9, 1, 1]])
    alloc = solve_ef_one_item(inst)
    assert alloc is not None
    assert sum(len(b) for b in alloc.bundles) == 2
    assert is_envy_free(inst, alloc)


def test_ef_one_item_matches_brute_force():
    rng = random.Random(77)
    for _ in range(60):
        m = rng.randint(1, 6)
        n = rng.randint(1, 3)
        inst = random_instance(rng, m, n, vmax=4)
        want = False
        if m >= n:
            for combo in itertools.permutations(range(m), n):
                alloc = Allocation.of([{z} for z in combo])
                if is_envy_free(inst, alloc):
                    want = True
                    break
        got = solve_ef_one_item(inst)
        assert (got is not None) == want
        if got is not None:
            assert is_envy_free(inst, got)
            assert all(len(b) == 1 for b in got.bundles)


def test_prop_10_agrees_with_oracle():
    rng = random.Random(99)
    for _ in range(50):
        inst = random_instance(rng, rng.randint(0, 6), rng.randint(1, 3), vmax=5)
        want = solve_oracle(inst, SPEC10, FairnessGoal.PROPORTIONAL) is not None
        got = solve_prop_10(inst)
        assert (got is not None) == want
        if got is not None:
            assert is_proportional(inst, got)
            assert all(len(b) <= 1 for b in got.bundles)
