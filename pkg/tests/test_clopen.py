import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bratteli import ClopenSet, boolean, builtin_measure, can_halve
from bratteli.errors import DepthExceeded, IndexOutOfRange

from .conftest import random_clopen
from .oracles import clopen_bitmask, enum_paths


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------


def test_refine_cylinder_oracle(od2):
    a = ClopenSet.cylinder(od2, 1, 0, 0)
    b = a.refine(2)
    # oracle: level-2 paths extending the level-1 path of index 0
    prefix = enum_paths(od2, 1, 0)[0]
    expected = {
        i for i, p in enumerate(enum_paths(od2, 2, 0)) if p[:1] == prefix
    }
    assert set(b.parts[0]) == expected == {0, 1}


def test_refine_identity(br):
    a = ClopenSet.cylinder(br, 2, 1, 0)
    assert a.refine(2) == a


def test_refine_full(br):
    x = ClopenSet.full(br, 1)
    assert x.refine(3).is_full()


def test_refine_downward_rejected(od2):
    a = ClopenSet.full(od2, 2)
    with pytest.raises(DepthExceeded):
        a.refine(1)


def test_measure_refine_invariant(od2, br, st_ones):
    for d in (od2, br, st_ones):
        mu = builtin_measure(d)
        a = ClopenSet.cylinder(d, 1, 0, 0)
        for m in range(1, 5):
            assert mu.measure(a.refine(m)) == mu.measure(a)


# ---------------------------------------------------------------------------
# Boolean algebra
# ---------------------------------------------------------------------------


def test_union_with_complement_is_full(od2):
    a = ClopenSet.from_indices(od2, 2, {0: [0, 3]})
    assert (a | ~a).is_full()
    assert (a & ~a).is_empty()


def test_intersect_example(od2):
    a = ClopenSet.from_indices(od2, 2, {0: [0, 1]})
    b = ClopenSet.from_indices(od2, 2, {0: [1, 2]})
    assert set((a & b).parts[0]) == {1}
    assert set((a - b).parts[0]) == {0}


def test_boolean_dispatch(od2):
    a = ClopenSet.from_indices(od2, 2, {0: [0, 1]})
    b = ClopenSet.from_indices(od2, 2, {0: [1, 2]})
    assert boolean("union", a, b) == (a | b)
    assert boolean("complement", a) == ~a
    with pytest.raises(IndexOutOfRange):
        boolean("xor", a, b)


def test_boolean_mixed_levels(od2):
    a = ClopenSet.cylinder(od2, 1, 0, 0)
    b = ClopenSet.from_indices(od2, 2, {0: [1, 2]})
    assert set((a & b).parts[0]) == {1}
    assert set((a | b).parts[0]) == {0, 1, 2}


def test_boolean_bitset_oracle(rng, od2, br):
    for d in (od2, br):
        for _ in range(100):
            level = rng.randint(1, 3)
            a = random_clopen(rng, d, level)
            b = random_clopen(rng, d, level)
            ma, width = clopen_bitmask(a)
            mb, _ = clopen_bitmask(b)
            full = (1 << width) - 1
            assert clopen_bitmask(a | b)[0] == ma | mb
            assert clopen_bitmask(a & b)[0] == ma & mb
            assert clopen_bitmask(a - b)[0] == ma & ~mb
            assert clopen_bitmask(~a)[0] == full & ~ma
            # absorption and De Morgan, through the oracle
            assert (a | (a & b)) == a
            assert ~(a | b) == (~a & ~b)


# ---------------------------------------------------------------------------
# invariance under prefix permutations
# ---------------------------------------------------------------------------


def test_suffix_set_is_invariant(od2):
    for n in (1, 2, 3):
        # the set fixing the (n+1)-st edge to 0: indices with last digit 0
        parts = {0: [i for i in range(2 ** (n + 1)) if i % 2 == 0]}
        a = ClopenSet.from_indices(od2, n + 1, parts)
        assert a.is_gn_invariant(n)


def test_single_cylinder_not_invariant(od2):
    a = ClopenSet.cylinder(od2, 2, 0, 0)
    assert not a.is_gn_invariant(1)
    assert not a.is_gn_invariant(2)
    assert a.is_gn_invariant(0)  # the level-0 subgroup is trivial


def test_full_set_invariant(br):
    x = ClopenSet.full(br, 3)
    for n in range(4):
        assert x.is_gn_invariant(n)


def test_invariance_level_check(od2):
    a = ClopenSet.full(od2, 1)
    with pytest.raises(DepthExceeded):
        a.is_gn_invariant(2)


# ---------------------------------------------------------------------------
# halving
# ---------------------------------------------------------------------------


def test_can_halve_odometer_cylinder(od2):
    a = ClopenSet.cylinder(od2, 1, 0, 0)
    w = can_halve(a, 4)
    assert w is not None and w.level == 2
    assert w.first.size() == w.second.size() == 1


def test_can_halve_br_cylinder(br):
    for n, expected_level in ((1, 4), (2, 4)):
        a = ClopenSet.cylinder(br, n, 0, 0)
        w = can_halve(a, 8)
        assert w is not None and w.level == expected_level


def test_can_halve_witness_properties(rng, od2, br):
    for d in (od2, br):
        for _ in range(25):
            level = rng.randint(1, 2)
            a = random_clopen(rng, d, level)
            if a.is_empty():
                continue
            w = can_halve(a, 6)
            assert w is not None
            refined = a.refine(w.level)
            assert (w.first | w.second) == refined
            assert (w.first & w.second).is_empty()
            g = w.involution
            assert (g * g).is_identity()
            assert g.support() <= refined
            assert g.act_on(w.first) == w.second


def test_cannot_halve_degenerate(degenerate):
    a = ClopenSet.full(degenerate, 1)
    assert can_halve(a, 8) is None


def test_can_halve_rejects_empty(od2):
    with pytest.raises(IndexOutOfRange):
        can_halve(ClopenSet.empty(od2, 1), 3)
