"""Active elements and their neighborhoods.

An active element is the atomic unit the optimizer assigns to communities:
a node at an interaction instant (timestamped streams) or a node over a
segmented interaction piece (interval streams).  Each element occupies a
*span*: ``[t, t+1)`` for a discrete instant, ``[t, t)`` for a continuous
instant, the piece itself for interval streams.  Between two successive
elements of the same node lies a *gap*, which belongs to a community only
when both elements do.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property

from .community import DynamicCommunityStructure, MembershipSegment
from .errors import StreamError
from .segmentation import is_segmented
from .stream import LinkStream


@dataclass(frozen=True)
class ActiveElement:
    node: str
    when: object  # instant t, or (a, b) for a time segment
    index: int
    start: float
    end: float

    @property
    def span_measure(self) -> float:
        return self.end - self.start


class ElementGraph:
    """Active elements of a stream with their topological and temporal links.

    ``adj[i]`` maps every other element sharing an interaction with ``i`` to
    the observed weight that interaction contributes when both ends share a
    community (undirected records count twice).  Interactions joining an
    element to itself go to ``self_weight``.
    """

    def __init__(self, stream: LinkStream):
        if not stream.timestamped and stream.interactions and not is_segmented(stream):
            raise StreamError("interval streams must be segmented before building elements")
        self.stream = stream
        dom = stream.domain
        w, m = stream.totals()
        self.w = w
        self.m = m
        self.horizon = dom.measure

        keys: dict[tuple, None] = {}
        pairs = []
        for it in stream.interactions:
            if stream.timestamped:
                a, b = (it.src, it.t_start), (it.dst, it.t_second)
                contrib = it.weight * it.factor
            else:
                if it.t_start == it.t_second:
                    continue
                when = (it.t_start, it.t_second)
                a, b = (it.src, when), (it.dst, when)
                contrib = it.weight * it.duration * it.factor
            keys.setdefault(a)
            keys.setdefault(b)
            pairs.append((a, b, contrib))

        order = {u: i for i, u in enumerate(stream.nodes.nodes)}

        def sort_key(k):
            when = k[1]
            return (order[k[0]], when if isinstance(when, tuple) else (when,))

        elements = []
        index = {}
        for i, key in enumerate(sorted(keys, key=sort_key)):
            node, when = key
            if isinstance(when, tuple):
                start, end = when
            else:
                start, end = dom.instant(when)
            elements.append(ActiveElement(node, when, i, start, end))
            index[key] = i
        self.elements: list[ActiveElement] = elements
        self.index: dict[tuple, int] = index

        n = len(elements)
        self.adj: list[dict[int, float]] = [defaultdict(float) for _ in range(n)]
        self.self_weight = [0.0] * n
        for a, b, contrib in pairs:
            i, j = index[a], index[b]
            if i == j:
                self.self_weight[i] += contrib
            else:
                self.adj[i][j] += contrib
                self.adj[j][i] += contrib
        self.adj = [dict(d) for d in self.adj]

        self.node_elements: dict[str, list[int]] = defaultdict(list)
        for e in elements:
            self.node_elements[e.node].append(e.index)
        self.node_elements = dict(self.node_elements)
        self.prev = [-1] * n
        self.next = [-1] * n
        for seq in self.node_elements.values():
            for x, y in zip(seq, seq[1:]):
                self.next[x] = y
                self.prev[y] = x

        deg = stream.degrees()
        self.k_in = {u: deg[u][0] for u in deg}
        self.k_out = {u: deg[u][1] for u in deg}
        self.type_of = stream.nodes.type_of
        self.multipartite = stream.nodes.multipartite

    def __len__(self) -> int:
        return len(self.elements)

    def gap(self, i: int) -> tuple[float, float] | None:
        """Gap between element ``i`` and the next element of the same node."""
        j = self.next[i]
        if j < 0:
            return None
        return (self.elements[i].end, self.elements[j].start)

    def node_type(self, u):
        return None if self.type_of is None else self.type_of[u]

    def topological_neighbors(self, i: int) -> list[int]:
        return sorted(self.adj[i])

    def temporal_neighbors(self, i: int) -> tuple[int | None, int | None]:
        p, n = self.prev[i], self.next[i]
        return (p if p >= 0 else None, n if n >= 0 else None)

    @cached_property
    def links(self) -> list[tuple[int, int, float]]:
        """Undirected link list ``(i, j, weight)`` with ``i < j``."""
        return [(i, j, wt) for i in range(len(self)) for j, wt in self.adj[i].items() if i < j]


def build_elements(stream: LinkStream) -> list[ActiveElement]:
    return ElementGraph(stream).elements


def induced_structure(graph: ElementGraph, labels) -> DynamicCommunityStructure:
    """Memberships induced by an element labelling.

    A node's run of consecutive same-label elements becomes one membership
    covering the elements' spans and the gaps between them; gaps between
    differently labelled elements stay unassigned.  In continuous
    timestamped streams the run ends with the instant of its last element.
    """
    segs = []
    for node, seq in graph.node_elements.items():
        k = 0
        while k < len(seq):
            j = k
            while j + 1 < len(seq) and labels[seq[j + 1]] == labels[seq[k]]:
                j += 1
            first, last = graph.elements[seq[k]], graph.elements[seq[j]]
            lab = labels[seq[k]]
            segs.append(MembershipSegment(node, first.start, last.end, lab))
            if last.span_measure == 0 and first.start < last.end:
                segs.append(MembershipSegment(node, last.end, last.end, lab))
            k = j + 1
    return DynamicCommunityStructure(segs, discrete=graph.stream.domain.discrete)
