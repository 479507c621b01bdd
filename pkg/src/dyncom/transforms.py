"""Stream-to-stream preprocessing and modality conversions."""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Optional

from .errors import StreamError
from .stream import Interaction, LinkStream, Modality, NodeTable, TimeDomain, TimeKind


def expand_undirected(stream: LinkStream) -> LinkStream:
    """Store every undirected record as two reciprocal directed records.

    The reported ``m`` stays the original record count.
    """
    out = []
    for it in stream.interactions:
        if it.directed:
            out.append(it)
            continue
        if stream.timestamped and it.t_start != it.t_second:
            # the reverse reading would arrive before it departs
            raise StreamError(
                f"cannot store the reverse of delayed undirected interaction {it} as a record"
            )
        out.append(Interaction(it.src, it.dst, it.t_start, it.t_second, it.weight, True))
        out.append(Interaction(it.dst, it.src, it.t_start, it.t_second, it.weight, True))
    if len(out) == len(stream.interactions):
        return stream
    return stream.replace(out, base_m=stream.totals()[1])


def delayed_to_continuous(stream: LinkStream, inverse_duration_weights: bool = True) -> LinkStream:
    """Turn each trip ``(u, v, t_s, t_d, w)`` into an interval interaction
    over ``[t_s, t_d)``.

    With inverse-duration weights the interval intensity is ``w / (t_d - t_s)``
    so every node keeps its degree.
    """
    if not stream.timestamped:
        raise StreamError("delayed_to_continuous expects a timestamped stream")
    if inverse_duration_weights:
        bad = [it for it in stream.interactions if it.t_second == it.t_start]
        if bad:
            listed = "; ".join(f"{it.src}->{it.dst}@{it.t_start}" for it in bad[:10])
            more = f" (+{len(bad) - 10} more)" if len(bad) > 10 else ""
            raise StreamError(
                f"{len(bad)} zero-duration trips cannot be weighted by inverse duration: "
                f"{listed}{more}"
            )
    out = []
    for it in stream.interactions:
        w = it.weight / (it.t_second - it.t_start) if inverse_duration_weights else it.weight
        out.append(Interaction(it.src, it.dst, it.t_start, it.t_second, w, it.directed))
    return LinkStream(stream.domain, out, Modality.INTERVAL, stream.nodes, stream.base_m)


def delayed_to_instantaneous(stream: LinkStream, anchor: str = "start") -> LinkStream:
    """Collapse each delayed interaction onto its departure or arrival time."""
    if anchor not in ("start", "end"):
        raise ValueError(f"anchor must be 'start' or 'end', got {anchor!r}")
    if not stream.timestamped:
        raise StreamError("delayed_to_instantaneous expects a timestamped stream")
    out = []
    for it in stream.interactions:
        t = it.t_start if anchor == "start" else it.t_second
        out.append(Interaction(it.src, it.dst, t, t, it.weight, it.directed))
    return stream.replace(out)


def filter_duration(stream: LinkStream, min_duration: float = 0.0,
                    max_duration: Optional[float] = None) -> LinkStream:
    """Keep interactions whose duration lies in ``[min_duration, max_duration]``."""
    keep = [
        it for it in stream.interactions
        if it.duration >= min_duration and (max_duration is None or it.duration <= max_duration)
    ]
    return stream.replace(keep, base_m=None)


def preference_normalize(stream: LinkStream) -> LinkStream:
    """Mean-center received weights per instant and keep positive residues.

    At each instant ``t`` the mean weight received by ``b`` is taken over all
    voters active at ``t`` (a voter who gave ``b`` nothing counts as 0).
    """
    if not stream.timestamped:
        raise StreamError("preference_normalize expects a timestamped stream")
    by_time: dict = defaultdict(lambda: defaultdict(float))
    for it in stream.interactions:
        if it.t_start != it.t_second:
            raise StreamError(f"preference_normalize expects instantaneous votes, got {it}")
        by_time[it.t_start][(it.src, it.dst)] += it.weight
    out = []
    for t in sorted(by_time):
        votes = by_time[t]
        voters = {a for a, _ in votes}
        received: dict = defaultdict(float)
        for (_, b), w in votes.items():
            received[b] += w
        for (a, b), w in sorted(votes.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
            residue = w - received[b] / len(voters)
            if residue > 0:
                out.append(Interaction(a, b, t, t, residue, True))
    return stream.replace(out, base_m=None)


def low_degree_filter(stream: LinkStream, max_nodes: int) -> LinkStream:
    """Drop minimum-degree nodes one at a time until fewer than ``max_nodes``
    remain; ties go to the lowest node id."""
    if max_nodes < 1:
        raise ValueError("max_nodes must be >= 1")
    alive = set(stream.nodes.nodes)
    if len(alive) < max_nodes:
        return stream
    deg = {u: kin + kout for u, (kin, kout) in stream.degrees().items()}
    touching = defaultdict(list)
    for it in stream.interactions:
        touching[it.src].append(it)
        if it.dst != it.src:
            touching[it.dst].append(it)
    dropped_records: set[int] = set()
    while len(alive) >= max_nodes:
        u = min(alive, key=lambda x: (deg[x], str(x)))
        alive.remove(u)
        for it in touching[u]:
            if id(it) in dropped_records:
                continue
            dropped_records.add(id(it))
            w = it.weight if stream.timestamped else it.weight * it.duration
            for x in (it.src, it.dst):
                if x != u and x in alive:
                    # both readings of an undirected record touch both ends
                    deg[x] -= w * it.factor
    keep = [it for it in stream.interactions if it.src in alive and it.dst in alive]
    nodes = tuple(u for u in stream.nodes.nodes if u in alive)
    type_of = None
    if stream.nodes.multipartite:
        type_of = {u: stream.nodes.type_of[u] for u in nodes}
        # a single surviving type admits no cross-type interaction at all
        if len(set(type_of.values())) < 2:
            type_of = None
    return stream.replace(keep, nodes=NodeTable(nodes, type_of), base_m=None)


def bipartite_from_events(records: Iterable[tuple], max_tags_per_post: int = 10,
                          kind: TimeKind | str = TimeKind.CONTINUOUS,
                          domain: Optional[TimeDomain] = None) -> LinkStream:
    """User-hashtag stream from posts ``(user, tags, t)``.

    Posts with more than ``max_tags_per_post`` tags are dropped; every other
    post links its author to each of its tags at the post time.
    """
    if max_tags_per_post < 1:
        raise ValueError("max_tags_per_post must be >= 1")
    users: dict = {}
    tags: dict = {}
    out = []
    times = []
    for user, post_tags, t in records:
        post_tags = list(dict.fromkeys(post_tags))
        if len(post_tags) > max_tags_per_post or not post_tags:
            continue
        users.setdefault(user)
        times.append(t)
        for h in post_tags:
            tags.setdefault(h)
            out.append(Interaction(user, h, t, t, 1.0, False))
    clash = sorted(set(users) & set(tags), key=str)
    if clash:
        raise StreamError(f"ids used both as user and hashtag: {clash[:5]}")
    if domain is None:
        domain = TimeDomain.spanning(times, kind)
    type_of = {u: "user" for u in users}
    type_of.update({h: "hashtag" for h in tags})
    nodes = NodeTable(tuple(users) + tuple(tags), type_of)
    return LinkStream(domain, out, Modality.TIMESTAMPED, nodes)
