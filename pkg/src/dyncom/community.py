"""Dynamic community structures: per-node, non-overlapping memberships of
nodes to communities over time segments."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable, Iterable

from .errors import StructureError
from .timeset import TimeSet


@dataclass(frozen=True, order=True)
class MembershipSegment:
    node: str
    start: float
    end: float
    community: int

    def __post_init__(self):
        if self.end < self.start:
            raise StructureError(
                f"segment [{self.start}, {self.end}) of node {self.node!r} ends before it starts"
            )

    @property
    def instant(self) -> bool:
        return self.start == self.end


class DynamicCommunityStructure:
    """Immutable collection of membership segments.

    Community ids given at construction are opaque; they are renumbered to
    dense integers ``0..k-1`` in order of first appearance.  Segments of one
    node must be pairwise disjoint, a degenerate ``[t, t)`` segment counting
    as the instant ``t``.
    """

    def __init__(self, segments: Iterable[MembershipSegment] = (), *, discrete: bool = False):
        remap: dict[Hashable, int] = {}
        segs = []
        for s in segments:
            if s.community not in remap:
                remap[s.community] = len(remap)
            if discrete and s.instant:
                raise StructureError(
                    f"zero-length segment for {s.node!r} at {s.start} in discrete time"
                )
            segs.append(MembershipSegment(s.node, s.start, s.end, remap[s.community]))
        self.segments: tuple[MembershipSegment, ...] = tuple(segs)
        self.discrete = discrete

        by_node: dict[str, list[MembershipSegment]] = defaultdict(list)
        for s in segs:
            by_node[s.node].append(s)
        for node, lst in by_node.items():
            lst.sort(key=lambda s: (s.start, s.end))
            _check_disjoint(node, lst)
        self._by_node = dict(by_node)

        members: dict[int, dict[str, list]] = defaultdict(lambda: defaultdict(list))
        for s in segs:
            members[s.community][s.node].append((s.start, s.end))
        self._times = {
            c: {u: TimeSet(v) for u, v in per_node.items()} for c, per_node in members.items()
        }

    @classmethod
    def from_records(cls, records: Iterable[tuple], *, discrete: bool = False):
        """Build from ``(community, node, start, end)`` tuples."""
        return cls(
            (MembershipSegment(node, a, b, c) for c, node, a, b in records), discrete=discrete
        )

    # ------------------------------------------------------------------

    def communities(self) -> list[int]:
        return sorted(self._times)

    def nodes(self) -> list[str]:
        return sorted(self._by_node, key=str)

    def members(self, community: int) -> list[str]:
        return sorted(self._community(community), key=str)

    def node_segments(self, node) -> list[MembershipSegment]:
        return list(self._by_node.get(node, ()))

    def _community(self, community: int) -> dict[str, TimeSet]:
        try:
            return self._times[community]
        except KeyError:
            raise StructureError(f"no community with id {community!r}") from None

    def membership_time(self, node, community: int) -> TimeSet:
        """``T_{u∈C}``; empty when the node never belongs to the community."""
        return self._times.get(community, {}).get(node, TimeSet())

    def membership_times(self, community: int) -> dict[str, TimeSet]:
        return dict(self._community(community))

    def community_lifetime(self, community: int) -> TimeSet:
        """``T_C``, the union of all member times."""
        per_node = self._community(community)
        out = TimeSet()
        for ts in per_node.values():
            out = out | ts
        return out

    def community_at(self, node, t) -> int | None:
        for s in self._by_node.get(node, ()):
            if s.start <= t < s.end or (s.instant and s.start == t):
                return s.community
        return None

    def switch_count(self, node) -> int:
        """Community switch count ``η_u``.

        Segments are read chronologically and consecutive segments in the same
        community form one run; time spent outside any community does not
        break a run.
        """
        runs = 0
        last = None
        for s in self._by_node.get(node, ()):
            if s.community != last:
                runs += 1
                last = s.community
        return max(0, runs - 1)

    def total_switches(self) -> int:
        return sum(self.switch_count(u) for u in self._by_node)

    def __len__(self) -> int:
        return len(self._times)

    # ------------------------------------------------------------------

    def canonical(self) -> frozenset:
        """Id-free normal form: equal for structures that differ only by
        community renaming or by how member times are cut into segments."""
        return frozenset(
            frozenset((u, ts) for u, ts in per_node.items() if not ts.is_empty())
            for per_node in self._times.values()
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DynamicCommunityStructure):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __repr__(self) -> str:
        return (
            f"DynamicCommunityStructure({len(self._times)} communities, "
            f"{len(self.segments)} segments)"
        )


def _check_disjoint(node, segs: list[MembershipSegment]) -> None:
    for prev, cur in zip(segs, segs[1:]):
        overlap = cur.start < prev.end or (prev.start == cur.start)
        if prev.instant and not cur.instant:
            overlap = cur.start <= prev.start < cur.end
        if overlap:
            raise StructureError(
                f"overlapping memberships for node {node!r}: "
                f"[{prev.start}, {prev.end}) and [{cur.start}, {cur.end})"
            )


def membership_time(struct: DynamicCommunityStructure, u, C: int) -> TimeSet:
    return struct.membership_time(u, C)


def community_lifetime(struct: DynamicCommunityStructure, C: int) -> TimeSet:
    return struct.community_lifetime(C)


def switch_count(struct: DynamicCommunityStructure, u) -> int:
    return struct.switch_count(u)


def total_switches(struct: DynamicCommunityStructure) -> int:
    return struct.total_switches()
