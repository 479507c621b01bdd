import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURE_OPTIMUM, FIXTURE_Q, single_edge_stream, three_edge_stream
from dyncom import (
    Interaction, LinkStream, NodeTable, OracleSizeError, QualityParams, TimeDomain, enumerate_optimal,
    induced_structure, lmodularity,
)
from dyncom.lago import prepare
from dyncom.oracle import restricted_growth_strings
from strategies import cases

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140]


def test_restricted_growth_strings():
    for n, b in enumerate(BELL):
        rows = restricted_growth_strings(n)
        assert len(rows) == b
        as_tuples = [tuple(r) for r in rows]
        assert as_tuples == sorted(as_tuples)
        assert len(set(as_tuples)) == b
    assert restricted_growth_strings(3).tolist() == [
        [0, 0, 0], [0, 0, 1], [0, 1, 0], [0, 1, 1], [0, 1, 2]]


def test_fixture_optimum():
    struct, q = enumerate_optimal(three_edge_stream())
    assert q == pytest.approx(FIXTURE_OPTIMUM, abs=1e-12)
    assert q > float(FIXTURE_Q)
    # the optimum keeps the element grouping of the stated structure but leaves
    # b unassigned between its element at 1 and its element at 3
    assert struct.membership_time("b", struct.community_at("b", 3)).segments == ((3, 4),)
    assert struct.community_at("b", 2) is None


def test_single_edge_merge_beats_singletons():
    for omega in (0.0, 1.0, 5.0):
        struct, q = enumerate_optimal(single_edge_stream(), QualityParams("MM", 1.0, omega))
        assert len(struct) == 1 and q == pytest.approx(0.5)


def test_two_dyads_far_apart():
    s = LinkStream(TimeDomain("discrete", 0, 20),
                   [Interaction("a", "b", 1, 1, 1, False), Interaction("c", "d", 18, 18, 1, False)])
    struct, _ = enumerate_optimal(s)
    assert len(struct) == 2


def test_size_guard():
    s = LinkStream(TimeDomain("discrete", 0, 10),
                   [Interaction(f"u{k}", f"v{k}", k, k) for k in range(7)])
    with pytest.raises(OracleSizeError) as info:
        enumerate_optimal(s)
    assert info.value.count == 14
    with pytest.raises(OracleSizeError):
        enumerate_optimal(three_edge_stream(), max_elements=5)


def brute_force(stream, params):
    graph = prepare(stream)
    best = -float("inf")
    for labels in itertools.product(range(len(graph)), repeat=len(graph)):
        best = max(best, lmodularity(stream, induced_structure(graph, list(labels)), params))
    return best


@given(cases(max_interactions=3, max_nodes=3), st.sampled_from(["MM", "JM"]))
@settings(max_examples=30)
def test_matches_product_enumeration(case, model):
    if len(prepare(case.stream)) > 5:
        return
    p = QualityParams(model)
    _, q = enumerate_optimal(case.stream, p)
    assert q == pytest.approx(brute_force(case.stream, p), abs=1e-9)


@given(cases(max_interactions=4, max_nodes=4), st.integers(-5, 5))
@settings(max_examples=30)
def test_invariant_under_relabel_and_translation(case, shift):
    s = case.stream
    if len(prepare(s)) > 9:
        return
    rename = {u: f"z{k}" for k, u in enumerate(reversed(case.nodes))}
    moved = LinkStream(
        TimeDomain(s.domain.kind, s.domain.t_min + shift, s.domain.t_max + shift),
        [Interaction(rename[it.src], rename[it.dst], it.t_start + shift, it.t_second + shift,
                     it.weight, it.directed) for it in s.interactions],
        s.modality,
        NodeTable(tuple(rename[u] for u in case.nodes),
                  None if case.types is None else {rename[u]: t for u, t in case.types.items()}),
    )
    for model in ("MM", "JM"):
        p = QualityParams(model)
        assert enumerate_optimal(moved, p)[1] == pytest.approx(enumerate_optimal(s, p)[1], abs=1e-9)
