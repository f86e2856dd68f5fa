import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bratteli import (
    BratteliDiagram,
    ExplicitTail,
    StationaryTail,
    br_diagram,
    find_even_telescoping,
    is_simple,
    odometer,
    product_matrix,
    stationary,
    telescope,
)
from bratteli.errors import (
    DepthExceeded,
    EmptyRootLevel,
    IndexOutOfRange,
    InvalidCuts,
    ShapeMismatch,
    ZeroRowOrColumn,
)

from .oracles import brute_path_counts, count_paths_between, enum_paths


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def test_odometer_levels(od2):
    for n in range(6):
        assert od2.vertex_count(n) == 1
        assert od2.incidence_matrix(n) == ((2,),)


def test_br_levels(br):
    for n in range(5):
        assert br.vertex_count(n) == n + 1
        mat = br.incidence_matrix(n)
        assert len(mat) == n + 2 and len(mat[0]) == n + 1
        assert all(x == 1 for row in mat for x in row)


def test_zero_column_rejected():
    with pytest.raises(ZeroRowOrColumn):
        BratteliDiagram([1, 2, 2], [[[1], [1]], [[1, 0], [2, 0]]])


def test_zero_row_rejected():
    with pytest.raises(ZeroRowOrColumn):
        BratteliDiagram([1, 2, 2], [[[1], [1]], [[1, 1], [0, 0]]])


def test_root_level_must_be_single():
    with pytest.raises(EmptyRootLevel):
        BratteliDiagram([2, 2], [[[1, 1], [1, 1]]])


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        BratteliDiagram([1, 2], [[[1, 1], [1, 1]]])
    with pytest.raises(ShapeMismatch):
        BratteliDiagram([1, 2], [])
    with pytest.raises(ShapeMismatch):
        stationary([[1, 1]])  # not square


def test_odometer_base_one_rejected():
    with pytest.raises(ShapeMismatch):
        odometer(1)


# ---------------------------------------------------------------------------
# path counts
# ---------------------------------------------------------------------------


def test_path_counts_odometer(od2):
    assert od2.path_counts(3) == (8,)


def test_path_counts_br_brute(br):
    # oracle: explicit edge-by-edge accumulation
    assert brute_path_counts(br, 3) == (6, 6, 6, 6)
    assert br.path_counts(3) == (6, 6, 6, 6)
    for n in range(6):
        assert br.path_counts(n) == brute_path_counts(br, n)


def test_path_counts_stationary_matrix_oracle(st_ones):
    # oracle: hand matrix product F^T chain on the root vector
    # h^(1) = (1,1); h^(2) = F h^(1) with F all ones
    assert st_ones.path_counts(2) == (2, 2)
    assert st_ones.path_counts(2) == brute_path_counts(st_ones, 2)


def test_depth_exceeded_explicit():
    d = BratteliDiagram([1, 2], [[[1], [2]]])
    assert d.path_counts(1) == (1, 2)
    with pytest.raises(DepthExceeded):
        d.path_counts(2)


# ---------------------------------------------------------------------------
# telescoping
# ---------------------------------------------------------------------------


def test_telescope_odometer(od2):
    t = telescope(od2, (0, 2, 4))
    for k in range(4):
        assert t.incidence_matrix(k) == ((4,),)
    assert t.path_counts(2) == od2.path_counts(4)


def test_telescope_br_entries(br):
    t = telescope(br, (0, 2, 4, 6))
    for k in range(4):
        mat = t.incidence_matrix(k)
        expected = count_paths_between(br, 2 * k, 0, 2 * k + 2, 0)
        assert expected == 2 * k + 2
        assert all(x == expected for row in mat for x in row)


def test_telescope_bad_cuts(od2):
    with pytest.raises(InvalidCuts):
        telescope(od2, (0, 3, 1))
    with pytest.raises(InvalidCuts):
        telescope(od2, (1, 2))
    with pytest.raises(InvalidCuts):
        telescope(od2, (0,))


def test_telescope_explicit_depth_check():
    d = BratteliDiagram([1, 2, 2], [[[1], [1]], [[1, 1], [1, 1]]])
    t = telescope(d, (0, 2))
    assert t.path_counts(1) == d.path_counts(2)
    with pytest.raises(InvalidCuts):
        telescope(d, (0, 3))


def test_telescope_preserves_path_counts(br, od2, st_ones):
    for d, cuts in ((br, (0, 1, 3)), (od2, (0, 2, 3)), (st_ones, (0, 2, 4))):
        t = telescope(d, cuts)
        for k, m in enumerate(cuts):
            assert t.path_counts(k) == d.path_counts(m)


# ---------------------------------------------------------------------------
# simplicity and even telescoping
# ---------------------------------------------------------------------------


def test_simple_br(br):
    res = is_simple(br, 5)
    assert res.kind == "simple"
    assert all(m == n + 1 for n, m in res.witnesses)


def test_not_simple_identity_tail():
    d = stationary([[1, 0], [0, 1]])
    assert is_simple(d, 6).kind == "not-simple"


def test_simple_positive_stationary():
    d = stationary([[2, 1], [1, 2]])
    # oracle: the matrix itself is strictly positive, so m = n + 1 witnesses
    assert all(x > 0 for row in d.incidence_matrix(1) for x in row)
    res = is_simple(d, 5)
    assert res.kind == "simple"


def test_unknown_when_bound_too_small(od2):
    assert is_simple(od2, 0).kind == "unknown"


def test_even_telescope_odometer(od2):
    cuts = find_even_telescoping(od2, 5)
    assert cuts == (0, 1, 2, 3, 4, 5)


def test_even_telescope_br(br):
    cuts = find_even_telescoping(br, 8)
    assert cuts == (0, 2, 4, 6, 8)
    t = telescope(br, cuts)
    for k in range(6):  # includes levels past the explicit cut list
        assert all(x >= 2 and x % 2 == 0 for row in t.incidence_matrix(k) for x in row)


def test_even_telescope_degenerate(degenerate):
    assert find_even_telescoping(degenerate, 8) is None


# ---------------------------------------------------------------------------
# canonical indexing
# ---------------------------------------------------------------------------


def test_odometer_index_2(od2):
    # canonical order puts index 2 at edge digits (1, 0), root first
    assert od2.path_of_index(2, 0, 2) == ((0, 1), (0, 0))
    assert enum_paths(od2, 2, 0)[2] == ((0, 1), (0, 0))


def test_level_zero_single_empty_path(br):
    assert br.path_of_index(0, 0, 0) == ()
    assert br.index_of_path(()) == (0, 0)


def test_index_out_of_range(od2):
    with pytest.raises(IndexOutOfRange):
        od2.path_of_index(2, 0, 4)
    with pytest.raises(IndexOutOfRange):
        od2.path_of_index(1, 1, 0)


def test_canonical_order_matches_oracle(br, od2, st_ones):
    for d, n in ((br, 3), (od2, 3), (st_ones, 3)):
        for v in d.vertices(n):
            paths = enum_paths(d, n, v)
            assert len(paths) == d.path_count(n, v)
            for i, path in enumerate(paths):
                assert d.path_of_index(n, v, i) == path
                assert d.index_of_path(path) == (v, i)


def test_path_table(br):
    table = br.path_table(2)
    assert table.counts == (2, 2, 2)
    assert table.index_of(table.path_at(1, 1)) == (1, 1)
    with pytest.raises(IndexOutOfRange):
        table.index_of(((1, 0),))


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------


@st.composite
def explicit_diagrams(draw):
    depth = draw(st.integers(1, 3))
    counts = [1] + [draw(st.integers(1, 3)) for _ in range(depth)]
    mats = []
    for n in range(depth):
        rows, cols = counts[n + 1], counts[n]
        mat = [[draw(st.integers(0, 2)) for _ in range(cols)] for _ in range(rows)]
        for v in range(cols):
            if all(mat[w][v] == 0 for w in range(rows)):
                mat[draw(st.integers(0, rows - 1))][v] = 1
        for w in range(rows):
            if all(x == 0 for x in mat[w]):
                mat[w][draw(st.integers(0, cols - 1))] = 1
        mats.append(mat)
    return BratteliDiagram(counts, mats)


@settings(max_examples=60, deadline=None)
@given(explicit_diagrams())
def test_index_roundtrip_property(d):
    n = d.depth
    for v in d.vertices(n):
        for i in range(d.path_count(n, v)):
            path = d.path_of_index(n, v, i)
            assert d.index_of_path(path) == (v, i)


@settings(max_examples=60, deadline=None)
@given(explicit_diagrams())
def test_path_count_recursion_property(d):
    # h^(n+1) recomputed against the incidence sums and the brute oracle
    for n in range(d.depth):
        mat = d.incidence_matrix(n)
        h, hn = d.path_counts(n), d.path_counts(n + 1)
        for w in d.vertices(n + 1):
            assert hn[w] == sum(mat[w][v] * h[v] for v in d.vertices(n))
    assert d.path_counts(d.depth) == brute_path_counts(d, d.depth)


@settings(max_examples=40, deadline=None)
@given(explicit_diagrams(), st.data())
def test_telescope_path_counts_property(d, data):
    if d.depth < 2:
        mid = 1
    else:
        mid = data.draw(st.integers(1, d.depth - 1))
    cuts = (0, mid, d.depth) if mid < d.depth else (0, d.depth)
    t = telescope(d, cuts)
    for k, m in enumerate(cuts):
        assert t.path_counts(k) == d.path_counts(m)


def test_product_matrix_identity(od2):
    assert product_matrix(od2, 2, 2) == ((1,),)
    assert product_matrix(od2, 0, 3) == ((8,),)
