"""Acceptance criteria 1-11, each at its stated tolerance.

Random instances come from seeded numpy generators so that every criterion
runs exactly its stated number of instances.  The terminal summary prints
one pass/fail line per criterion.
"""

import json
import math
import time

import numpy as np
import pytest

from conftest import FIXTURE_OPTIMUM, FIXTURE_Q, single_edge_stream, three_edge_stream, \
    three_edge_structure
from dyncom import (
    DynamicCommunityStructure, Interaction, LinkStream, MembershipSegment, NodeTable,
    OptimizerConfig, QualityParams, TimeDomain, detect, enumerate_optimal, induced_structure,
    lmodularity, move_gain, segment,
)
from dyncom.cli import main
from dyncom.lago import prepare
from dyncom.quality import IncrementalQuality, lmodularity_terms, static_modularity
from dyncom.synth import PlantedConfig, planted_stream
from dyncom.transforms import delayed_to_continuous
from reference import original_lmodularity, static_modularity as ref_static_modularity

TOL = 1e-9


# ----------------------------------------------------------------------
# random instances
# ----------------------------------------------------------------------


def random_stream(rng, *, modality, discrete, directed=None, typed=False, weighted=True,
                  delayed=True, n_max=5, m_max=6, horizon=None):
    n = int(rng.integers(3 if typed else 2, n_max + 1))
    nodes = [f"v{k}" for k in range(n)]
    types = None
    if typed:
        split = int(rng.integers(1, n))
        types = {u: ("x" if k < split else "y") for k, u in enumerate(nodes)}
    H = int(rng.integers(2, 9)) if horizon is None else horizon
    step = 1 if discrete else 0.25
    grid = [k * step for k in range(int(H / step) + 1)]
    records = []
    for _ in range(int(rng.integers(1, m_max + 1))):
        u = nodes[rng.integers(n)]
        pool = [v for v in nodes if v != u and (types is None or types[v] != types[u])]
        v = pool[rng.integers(len(pool))]
        if modality == "timestamped":
            usable = grid[:-1] if discrete else grid
            ts = usable[rng.integers(len(usable))]
            te = ts
            if delayed and rng.random() < 0.5:
                later = [t for t in usable if t >= ts]
                te = later[rng.integers(len(later))]
        else:
            ts = grid[rng.integers(len(grid) - 1)]
            later = [t for t in grid if t > ts]
            te = later[rng.integers(len(later))]
        w = float(rng.choice([1.0, 2.0, 0.5, 3.0])) if weighted else 1.0
        d = bool(rng.random() < 0.5) if directed is None else directed
        if discrete:
            ts, te = int(ts), int(te)
        records.append(Interaction(u, v, ts, te, w, d))
    kind = "discrete" if discrete else "continuous"
    return LinkStream(TimeDomain(kind, 0, H), records, modality, NodeTable(tuple(nodes), types))


def random_structure(rng, stream, max_communities=3):
    """Memberships cut at interaction times, with random gaps and instants."""
    dom = stream.domain
    pool = {dom.t_min, dom.t_max}
    for it in stream.interactions:
        pool.update((it.t_start, it.t_second))
    pool = sorted(pool)
    segs = []
    for u in stream.nodes.nodes:
        picks = rng.choice(pool, size=int(rng.integers(0, 4)))
        cuts = sorted({dom.t_min, dom.t_max, *(p.item() for p in picks)})
        for a, b in zip(cuts, cuts[1:]):
            c = int(rng.integers(-1, max_communities))
            if c >= 0:
                segs.append(MembershipSegment(u, a, b, c))
        if not dom.discrete and rng.random() < 0.3:
            t = pool[rng.integers(len(pool))]
            if not any(s.node == u and s.start <= t < s.end for s in segs):
                segs.append(MembershipSegment(u, t, t, int(rng.integers(max_communities))))
    return DynamicCommunityStructure(segs, discrete=dom.discrete)


def any_stream(rng, **kw):
    modality = "timestamped" if rng.random() < 0.6 else "interval"
    return random_stream(rng, modality=modality, discrete=bool(rng.random() < 0.5),
                         typed=bool(rng.random() < 0.25), **kw)


# ----------------------------------------------------------------------
# 1. definition fixture
# ----------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_c01_score_fixture(tmp_path, capsys):
    stream, struct = three_edge_stream(), three_edge_structure()
    for model in ("MM", "JM"):
        assert lmodularity(stream, struct, QualityParams(model)) == pytest.approx(
            float(FIXTURE_Q), abs=1e-12)
    stream_path = tmp_path / "fixture.csv"
    stream_path.write_text("a,b,0\na,b,1\nb,c,3\n")
    struct_path = tmp_path / "fixture.jsonl"
    struct_path.write_text("".join(
        json.dumps({"community": s.community, "node": s.node, "t_start": s.start,
                    "t_end": s.end}) + "\n" for s in struct.segments))
    for null in ("mm", "jm"):
        assert main(["score", "--input", str(stream_path), "--structure", str(struct_path),
                     "--null", null, "--gamma", "1", "--omega", "1"]) == 0
        assert capsys.readouterr().out.strip() == "0.263888888889"


@pytest.mark.criterion(1)
def test_c01_oracle_confirms_global_optimum():
    _, q = enumerate_optimal(three_edge_stream(), QualityParams("MM", 1.0, 1.0))
    assert q == pytest.approx(float(FIXTURE_Q), abs=1e-12)


@pytest.mark.criterion(1)
def test_c01_detect_attains_fixture_value(capsys, tmp_path):
    stream_path = tmp_path / "fixture.csv"
    stream_path.write_text("a,b,0\na,b,1\nb,c,3\n")
    assert main(["detect", "--input", str(stream_path), "--null", "mm", "--gamma", "1",
                 "--omega", "1", "--runs", "10", "--seed", "7"]) == 0
    assert capsys.readouterr().out.strip() == "0.263888888889"


@pytest.mark.criterion(1)
def test_c01_runtime():
    start = time.perf_counter()
    stream = three_edge_stream()
    lmodularity(stream, three_edge_structure())
    enumerate_optimal(stream)
    detect(stream, OptimizerConfig(QualityParams(), seed=7, runs=10))
    assert time.perf_counter() - start < 1.0


# ----------------------------------------------------------------------
# 2. static reduction
# ----------------------------------------------------------------------


@pytest.mark.criterion(2)
def test_c02_static_reduction():
    rng = np.random.default_rng(2)
    for _ in range(200):
        s = random_stream(rng, modality="timestamped", discrete=True, delayed=False,
                          typed=bool(rng.random() < 0.3), weighted=bool(rng.random() < 0.5),
                          n_max=8, m_max=10, horizon=1)
        nodes = s.nodes.nodes
        labels = [int(x) for x in rng.integers(0, 3, len(nodes))]
        struct = DynamicCommunityStructure(
            [MembershipSegment(u, 0, 1, c) for u, c in zip(nodes, labels)], discrete=True)
        q_dyn = lmodularity(s, struct, QualityParams("MM", 1.0, 0.0))
        full = [(0, 1)]
        A = np.array([[s.weight_between(u, v, full, full) for v in nodes] for u in nodes])
        types = [s.nodes.type(u) for u in nodes] if s.nodes.multipartite else None
        assert q_dyn == pytest.approx(static_modularity(A, labels, types), abs=TOL)
        assert q_dyn == pytest.approx(
            ref_static_modularity(A.tolist(), labels, types), abs=TOL)
        assert lmodularity(s, struct, QualityParams("JM", 1.0, 0.0)) == pytest.approx(
            q_dyn, abs=TOL)


# ----------------------------------------------------------------------
# 3. simple-case reduction
# ----------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_c03_original_formula():
    rng = np.random.default_rng(3)
    for k in range(200):
        s = random_stream(rng, modality="timestamped", discrete=bool(k % 2), directed=False,
                          weighted=False, delayed=False, n_max=6, m_max=8)
        struct = random_structure(rng, s)
        edges = [(it.src, it.dst, it.t_start) for it in s.interactions]
        recs = [(seg.community, seg.node, seg.start, seg.end) for seg in struct.segments]
        for model in ("MM", "JM"):
            expected = original_lmodularity(
                edges, horizon=(s.domain.t_min, s.domain.t_max), nodes=list(s.nodes.nodes),
                structure=recs, null_model=model)
            assert lmodularity(s, struct, QualityParams(model)) == pytest.approx(
                expected, abs=TOL)


# ----------------------------------------------------------------------
# 4. segmentation conservation
# ----------------------------------------------------------------------


def intra_weights(stream, struct):
    out = {}
    for c in struct.communities():
        times = {u: ts.segments for u, ts in struct.membership_times(c).items()}
        for u in times:
            for v in times:
                out[c, u, v] = stream.weight_between(u, v, times[u], times[v])
    return out


@pytest.mark.criterion(4)
def test_c04_segmentation_conservation():
    rng = np.random.default_rng(4)
    for _ in range(100):
        s = random_stream(rng, modality="interval", discrete=bool(rng.random() < 0.5),
                          typed=bool(rng.random() < 0.25), m_max=7)
        seg = segment(s)
        out = seg.stream
        assert out.totals()[0] == pytest.approx(s.totals()[0], abs=TOL)
        assert out.totals()[1] == s.totals()[1]
        for u in s.nodes.nodes:
            assert out.degree(u) == pytest.approx(s.degree(u), abs=TOL)
        struct = random_structure(rng, s)
        before, after = intra_weights(s, struct), intra_weights(out, struct)
        assert before.keys() == after.keys()
        for key in before:
            assert after[key] == pytest.approx(before[key], abs=TOL)
        again = segment(out)
        assert again.boundaries == seg.boundaries
        assert again.stream.interactions == out.interactions


# ----------------------------------------------------------------------
# 5. incremental gains
# ----------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_c05_incremental_gains():
    rng = np.random.default_rng(5)
    for k in range(1000):
        s = any_stream(rng, m_max=6)
        graph = prepare(s)
        n = len(graph)
        params = QualityParams(("MM", "JM")[k % 2], float(rng.choice([0.5, 1.0, 3.0])),
                               float(rng.choice([0.0, 1.0, 2.0])))
        labels = [int(x) for x in rng.integers(0, 4, n)]
        tracker = IncrementalQuality(graph, params, labels)
        i = int(rng.integers(n))
        target = [None, 0, 1, 2, 3][rng.integers(5)]
        gain = move_gain(tracker, i, target)
        moved = list(labels)
        moved[i] = tracker.fresh_label() if target is None else target
        q0 = lmodularity(s, induced_structure(graph, labels), params)
        q1 = lmodularity(s, induced_structure(graph, moved), params)
        assert gain == pytest.approx(q1 - q0, abs=TOL)


# ----------------------------------------------------------------------
# 6. monotone ascent and oracle bound
# ----------------------------------------------------------------------


@pytest.mark.criterion(6)
def test_c06_ascent_and_oracle_bound():
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    done = 0
    while done < 50:
        s = any_stream(rng, m_max=4)
        if len(prepare(s)) > 10:
            continue
        params = QualityParams(("MM", "JM")[done % 2])
        _, best = enumerate_optimal(s, params)
        for seed in range(3):
            config = OptimizerConfig(params, seed=seed, fast=bool(seed == 2))
            _, q, diag = detect(s, config)
            trace = diag.q_trace
            assert all(b >= a - 1e-12 for a, b in zip(trace, trace[1:]))
            assert q <= best + TOL
        done += 1
    for stream in (three_edge_stream(), single_edge_stream()):
        _, best = enumerate_optimal(stream)
        _, q, _ = detect(stream, OptimizerConfig(QualityParams(), seed=7, runs=10))
        assert q == pytest.approx(best, abs=TOL)
    assert best == pytest.approx(0.5) and FIXTURE_OPTIMUM > float(FIXTURE_Q)
    assert time.perf_counter() - start < 30.0


# ----------------------------------------------------------------------
# 7. trimmed communities
# ----------------------------------------------------------------------


def activity(stream, u):
    """Closed activity pieces of ``u``: instants or interaction intervals."""
    out = []
    for it in stream.interactions:
        if stream.timestamped:
            if it.src == u:
                out.append((it.t_start, it.t_start))
            if it.dst == u:
                out.append((it.t_second, it.t_second))
        elif u in (it.src, it.dst):
            out.append((it.t_start, it.t_second))
    return out


def free_gaps(stream, struct, u):
    """Positive-measure open intervals where ``u`` is neither active nor assigned."""
    dom = stream.domain
    blocked = activity(stream, u) + [(s.start, s.end) for s in struct.node_segments(u)]
    if dom.discrete:
        # units of time as [t, t+1) with no activity at t and no membership
        taken = set()
        for a, b in blocked:
            taken.update(range(a, max(b, a + 1)))
        return [(t, t + 1) for t in range(dom.t_min, dom.t_max) if t not in taken]
    points = sorted({dom.t_min, dom.t_max, *(p for piece in blocked for p in piece)})
    gaps = []
    for a, b in zip(points, points[1:]):
        mid = (a + b) / 2
        if not any(x <= mid < y or x == y == mid for x, y in blocked):
            gaps.append((a, b))
    return gaps


@pytest.mark.criterion(7)
def test_c07_trimmed_property():
    rng = np.random.default_rng(7)
    params = QualityParams("MM")
    done = 0
    while done < 50:
        s = random_stream(rng, modality=("timestamped", "interval")[done % 2],
                          discrete=bool(rng.random() < 0.5), m_max=5, horizon=10)
        struct, q, _ = detect(s, OptimizerConfig(params, seed=done))
        options = [(u, gap) for u in struct.nodes() for gap in free_gaps(s, struct, u)]
        if not options:
            continue
        u, (a, b) = options[rng.integers(len(options))]
        if not s.domain.discrete:
            # stay strictly inside the open gap
            a, b = a + (b - a) / 4, b - (b - a) / 4
        mine = sorted({seg.community for seg in struct.node_segments(u)})
        c = mine[rng.integers(len(mine))]
        extended = DynamicCommunityStructure(
            list(struct.segments) + [MembershipSegment(u, a, b, c)], discrete=s.domain.discrete)
        assert lmodularity(s, extended, params) < q
        done += 1


# ----------------------------------------------------------------------
# 8. delayed versus inverse-duration intervals
# ----------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_c08_degree_and_expectation_preserved():
    rng = np.random.default_rng(8)
    done = 0
    while done < 100:
        s = random_stream(rng, modality="timestamped", discrete=bool(rng.random() < 0.5),
                          directed=True, m_max=6)
        trips = [it for it in s.interactions if it.t_second > it.t_start]
        if not trips:
            continue
        s = s.replace(trips, base_m=None)
        c = delayed_to_continuous(s, True)
        for u in s.nodes.nodes:
            assert c.degree(u) == pytest.approx(s.degree(u), abs=TOL)
        struct = random_structure(rng, s)
        for model in ("MM", "JM"):
            a, b = lmodularity_terms(s, struct, model), lmodularity_terms(c, struct, model)
            assert b.expected == pytest.approx(a.expected, abs=TOL)
            assert b.w == pytest.approx(a.w, abs=TOL) and b.m == a.m
        done += 1


def commuter_stream():
    trips = [("a", "c", 8, 10), ("d", "c", 5, 8), ("c", "f", 8, 11), ("a", "e", 1, 3)]
    return LinkStream(TimeDomain("discrete", 0, 12),
                      [Interaction(u, v, ts, te, 1.0, True) for u, v, ts, te in trips])


@pytest.mark.criterion(8)
def test_c08_representations_detect_differently():
    delayed = commuter_stream()
    intervals = delayed_to_continuous(delayed, True)
    config = OptimizerConfig(QualityParams("MM"), seed=0, runs=5)
    s_delayed, _, _ = detect(delayed, config)
    s_intervals, _, _ = detect(intervals, config)
    assert s_delayed.canonical() != s_intervals.canonical()
    assert len(s_delayed) != len(s_intervals)


# ----------------------------------------------------------------------
# 9. JM and MM rank structures differently
# ----------------------------------------------------------------------


@pytest.mark.criterion(9)
def test_c09_null_models_disagree(tmp_path, capsys):
    stream_path = tmp_path / "trips.csv"
    stream_path.write_text("# directed=true\n# horizon=0,6\nc,a,1,4\nc,b,3,5\n")
    candidates = {
        "churn": [(0, "c", 1, 4), (0, "a", 4, 5), (0, "b", 5, 6)],
        "split": [(0, "c", 1, 2), (0, "a", 4, 5), (1, "c", 3, 4), (1, "b", 5, 6)],
    }
    scores = {}
    for name, recs in candidates.items():
        path = tmp_path / f"{name}.jsonl"
        path.write_text("".join(
            json.dumps({"community": c, "node": u, "t_start": a, "t_end": b}) + "\n"
            for c, u, a, b in recs))
        for null in ("mm", "jm"):
            assert main(["score", "--input", str(stream_path), "--structure", str(path),
                         "--null", null]) == 0
            scores[name, null] = float(capsys.readouterr().out)
    best_mm = max(candidates, key=lambda n: scores[n, "mm"])
    best_jm = max(candidates, key=lambda n: scores[n, "jm"])
    assert best_mm == "churn" and best_jm == "split"
    assert scores["split", "jm"] == pytest.approx(5 / 12, abs=1e-12)


# ----------------------------------------------------------------------
# 10. determinism
# ----------------------------------------------------------------------


@pytest.mark.criterion(10)
def test_c10_byte_identical_outputs(tmp_path, capsys):
    stream = tmp_path / "planted.csv"
    assert main(["synth", "--seed", "11", "--churn", "0.2", "--out", str(stream)]) == 0
    for flags in (["--runs", "3"], ["--fast", "--refine", "none"], ["--null", "jm", "--seed", "5"]):
        outputs = []
        for k in range(2):
            out = tmp_path / f"run{k}.jsonl"
            assert main(["detect", "--input", str(stream), "--out", str(out)] + flags) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] and outputs[0]
    capsys.readouterr()


# ----------------------------------------------------------------------
# 11. parameter semantics
# ----------------------------------------------------------------------


@pytest.mark.criterion(11)
def test_c11_gamma_and_omega():
    planted = planted_stream(PlantedConfig(seed=3, blocks=3, churn=0.3))
    s = planted.stream
    found, _, _ = detect(s, OptimizerConfig(QualityParams(), seed=0))
    structures = [planted.fine, planted.coarse, found]
    assert any(st.total_switches() > 0 for st in structures)
    _, m = s.totals()
    for struct in structures:
        for model in ("MM", "JM"):
            qs = [lmodularity(s, struct, QualityParams(model, g, 1.0))
                  for g in (0.25, 0.5, 1.0, 2.0, 4.0)]
            assert all(b < a for a, b in zip(qs, qs[1:]))
            eta = struct.total_switches()
            for w1, w2 in ((0.0, 1.0), (1.0, 4.0), (0.5, 3.25)):
                q1 = lmodularity(s, struct, QualityParams(model, 1.0, w1))
                q2 = lmodularity(s, struct, QualityParams(model, 1.0, w2))
                assert q2 - q1 == pytest.approx(-(w2 - w1) * eta / (2 * m), abs=1e-12)
