"""Finite unions of half-open time segments.

A :class:`TimeSet` is kept in canonical form: sorted, pairwise disjoint
segments ``[a, b)`` with ``a < b`` (touching segments are merged) plus a
sorted tuple of isolated instants.  Instants only matter in continuous time,
where an active node at ``t`` occupies the degenerate segment ``[t, t)``:
they have zero measure but ``t in timeset`` is true.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from typing import Iterable, Tuple

from .errors import StreamError

Segment = Tuple[float, float]


class TimeSet:
    __slots__ = ("segments", "points")

    def __init__(self, segments: Iterable[Segment] = (), points: Iterable[float] = ()):
        segs = []
        pts = set(points)
        for a, b in segments:
            if b < a:
                raise StreamError(f"malformed segment [{a}, {b}): end before start")
            if a == b:
                pts.add(a)
            else:
                segs.append((a, b))
        segs.sort()
        merged: list[Segment] = []
        for a, b in segs:
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        self.segments: tuple[Segment, ...] = tuple(merged)
        starts = [s[0] for s in merged]
        self.points: tuple[float, ...] = tuple(
            sorted(p for p in pts if not _covered(merged, starts, p))
        )

    @classmethod
    def coerce(cls, value: "TimeSet | Iterable[Segment]") -> "TimeSet":
        if isinstance(value, TimeSet):
            return value
        return cls(value)

    @property
    def measure(self) -> float:
        return math.fsum(b - a for a, b in self.segments)

    def is_empty(self) -> bool:
        return not self.segments and not self.points

    def __bool__(self) -> bool:
        return not self.is_empty()

    def __contains__(self, t: float) -> bool:
        i = bisect_right(self.segments, (t, math.inf)) - 1
        if i >= 0 and self.segments[i][0] <= t < self.segments[i][1]:
            return True
        j = bisect_right(self.points, t) - 1
        return j >= 0 and self.points[j] == t

    def union(self, other: "TimeSet") -> "TimeSet":
        return TimeSet(self.segments + other.segments, self.points + other.points)

    __or__ = union

    def intersection(self, other: "TimeSet") -> "TimeSet":
        out: list[Segment] = []
        i = j = 0
        a_segs, b_segs = self.segments, other.segments
        while i < len(a_segs) and j < len(b_segs):
            lo = max(a_segs[i][0], b_segs[j][0])
            hi = min(a_segs[i][1], b_segs[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a_segs[i][1] < b_segs[j][1]:
                i += 1
            else:
                j += 1
        pts = [p for p in self.points if p in other]
        pts += [p for p in other.points if p in self]
        return TimeSet(out, pts)

    __and__ = intersection

    def clip(self, a: float, b: float) -> "TimeSet":
        return self.intersection(TimeSet([(a, b)]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSet):
            return NotImplemented
        return self.segments == other.segments and self.points == other.points

    def __hash__(self) -> int:
        return hash((self.segments, self.points))

    def __repr__(self) -> str:
        parts = [f"[{a}, {b})" for a, b in self.segments]
        parts += [f"{{{p}}}" for p in self.points]
        return "TimeSet(" + " ∪ ".join(parts) + ")" if parts else "TimeSet(∅)"


def _covered(segs: list[Segment], starts: list[float], t: float) -> bool:
    i = bisect_right(starts, t) - 1
    return i >= 0 and segs[i][0] <= t < segs[i][1]
