import pytest
from hypothesis import given, strategies as st

from dyncom import StreamError, TimeSet

segments = st.lists(
    st.tuples(st.integers(0, 20), st.integers(0, 6)).map(lambda p: (p[0], p[0] + p[1])),
    max_size=6,
)


def test_canonical_merging():
    ts = TimeSet([(2, 4), (0, 2), (5, 6)])
    assert ts.segments == ((0, 4), (5, 6))
    assert ts.measure == 5


def test_instants_are_points():
    ts = TimeSet([(1, 1), (3, 5), (4, 4)])
    assert ts.segments == ((3, 5),)
    assert ts.points == (1,)
    assert 1 in ts and 4 in ts and 5 not in ts
    assert ts.measure == 2


def test_malformed_segment():
    with pytest.raises(StreamError):
        TimeSet([(3, 1)])


@given(segments, segments)
def test_union_and_intersection_measures(a, b):
    A, B = TimeSet(a), TimeSet(b)
    assert (A | B).measure == pytest.approx(A.measure + B.measure - (A & B).measure)
    for t in range(0, 27):
        assert (t in A | B) == (t in A or t in B)
        assert (t in A & B) == (t in A and t in B)


@given(segments)
def test_measure_invariant_under_resegmentation(a):
    split = [(x, (x + y) // 2) for x, y in a] + [((x + y) // 2, y) for x, y in a]
    assert TimeSet(split).measure == TimeSet(a).measure
    assert TimeSet(split).segments == TimeSet(a).segments
