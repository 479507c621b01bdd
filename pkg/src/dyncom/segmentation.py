"""Segmentation of interval-based streams.

Every interaction interval is cut at all global start/end times so that no
interaction starts or ends strictly inside a piece.  Weights, degrees and all
``W_{uv,T'}`` are unchanged; only the stored interaction count changes, and
the original count is carried along as ``base_m``.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .errors import StreamError
from .stream import Interaction, LinkStream, Modality


@dataclass(frozen=True)
class SegmentedStream:
    base: LinkStream
    boundaries: tuple
    segmented_interactions: tuple

    @property
    def stream(self) -> LinkStream:
        """The segmented pieces as an interval stream reporting the base ``m``."""
        return self.base.replace(self.segmented_interactions, base_m=self.base.totals()[1])


def boundaries_of(stream: LinkStream) -> list:
    # zero-length intervals carry no weight and are left out
    pts = set()
    for it in stream.interactions:
        if it.t_start < it.t_second:
            pts.add(it.t_start)
            pts.add(it.t_second)
    return sorted(pts)


def segment(stream: LinkStream) -> SegmentedStream:
    if stream.modality is not Modality.INTERVAL:
        raise StreamError("only interval-based streams can be segmented")
    bounds = boundaries_of(stream)
    pieces = []
    for it in stream.interactions:
        if it.t_start == it.t_second:
            continue
        lo = bisect_right(bounds, it.t_start)
        cuts = [it.t_start]
        for t in bounds[lo:]:
            if t >= it.t_second:
                break
            cuts.append(t)
        cuts.append(it.t_second)
        for a, b in zip(cuts, cuts[1:]):
            pieces.append(Interaction(it.src, it.dst, a, b, it.weight, it.directed))
    return SegmentedStream(stream, tuple(bounds), tuple(pieces))


def is_segmented(stream: LinkStream) -> bool:
    if stream.modality is not Modality.INTERVAL:
        return False
    bounds = boundaries_of(stream)
    for it in stream.interactions:
        i = bisect_right(bounds, it.t_start)
        if i < len(bounds) and bounds[i] < it.t_second:
            return False
    return True


def active_segment_nodes(seg: SegmentedStream | LinkStream) -> set[tuple]:
    """All ``(node, (a, b))`` pairs touched by a segmented interaction."""
    pieces = seg.segmented_interactions if isinstance(seg, SegmentedStream) else seg.interactions
    out = set()
    for it in pieces:
        if it.t_start < it.t_second:
            out.add((it.src, (it.t_start, it.t_second)))
            out.add((it.dst, (it.t_start, it.t_second)))
    return out
