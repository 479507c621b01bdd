"""Generalized Longitudinal Modularity.

Two evaluation paths live here:

* :func:`lmodularity` scores any :class:`DynamicCommunityStructure` against a
  stream, straight from membership time-sets.
* :class:`IncrementalQuality` keeps per-community aggregates for a labelling
  of active elements (memberships induced as in :func:`induced_structure`)
  and returns exact quality changes for relabelling a set of elements.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional

import numpy as np

from .community import DynamicCommunityStructure, MembershipSegment
from .elements import ElementGraph
from .errors import StreamError, StructureError
from .stream import LinkStream


class NullModel(str, Enum):
    JM = "JM"
    MM = "MM"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str) and value.upper() in cls.__members__:
            return cls[value.upper()]
        return None


@dataclass(frozen=True)
class QualityParams:
    null_model: NullModel = NullModel.MM
    gamma: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "null_model", NullModel(self.null_model))
        if not self.gamma > 0:
            raise ValueError(f"resolution gamma must be > 0, got {self.gamma}")
        if not self.omega >= 0:
            raise ValueError(f"smoothness omega must be >= 0, got {self.omega}")


@dataclass(frozen=True)
class QualityTerms:
    """The three ingredients of the quality value.

    ``observed`` is ``Σ_C Σ_uv W_{uv∈C}``, ``expected`` is
    ``Σ_C Σ_uv b_uv k_u^out k_v^in 𝕋_{uv,C} / w`` (resolution not applied) and
    ``switches`` is the total community switch count.
    """

    observed: float
    expected: float
    switches: int
    w: float
    m: int

    def value(self, gamma: float, omega: float) -> float:
        return (self.observed - gamma * self.expected) / self.w - omega * self.switches / (
            2 * self.m
        )


def temporal_factor(struct: DynamicCommunityStructure, stream: LinkStream, u, v,
                    community: int, null_model) -> float:
    model = NullModel(null_model)
    horizon = stream.domain.measure
    tu = struct.membership_time(u, community).measure
    tv = struct.membership_time(v, community).measure
    if model is NullModel.JM:
        if tu * tv > 0:
            return struct.community_lifetime(community).measure / horizon
        return 0.0
    return math.sqrt(tu * tv) / horizon


def _check_structure(stream: LinkStream, struct: DynamicCommunityStructure) -> None:
    dom = stream.domain
    known = set(stream.nodes.nodes)
    for s in struct.segments:
        if s.node not in known:
            raise StructureError(f"structure references unknown node {s.node!r}")
        if s.start < dom.t_min or s.end > dom.t_max:
            raise StructureError(
                f"membership [{s.start}, {s.end}) of {s.node!r} lies outside the horizon"
            )


def _pair_sum(a: Mapping, b: Mapping, multipartite: bool) -> float:
    """``Σ_{u,v} b_uv a_u b_v`` from per-type totals of ``a`` and ``b``."""
    if not multipartite:
        return a.get(None, 0.0) * b.get(None, 0.0)
    types = sorted(set(a) | set(b), key=str)
    return math.fsum(
        a.get(t, 0.0) * math.fsum(b.get(s, 0.0) for s in types if s != t) for t in types
    )


def lmodularity_terms(stream: LinkStream, struct: DynamicCommunityStructure,
                      null_model=NullModel.MM) -> QualityTerms:
    model = NullModel(null_model)
    w, m = stream.totals()
    if w <= 0:
        raise StreamError("L-Modularity is undefined on a stream with zero total weight")
    _check_structure(stream, struct)
    horizon = stream.domain.measure
    multipartite = stream.nodes.multipartite
    deg = stream.degrees()

    observed = []
    expected = []
    for c in struct.communities():
        times = struct.membership_times(c)
        for u in sorted(times, key=str):
            for v in stream.out_neighbors.get(u, ()):
                if v in times:
                    observed.append(stream.weight_between(u, v, times[u], times[v]))

        a: dict = defaultdict(list)
        b: dict = defaultdict(list)
        for u, ts in times.items():
            mu = ts.measure
            k_in, k_out = deg[u]
            scale = math.sqrt(mu) if model is NullModel.MM else float(mu > 0)
            t = stream.nodes.type(u)
            a[t].append(k_out * scale)
            b[t].append(k_in * scale)
        a = {t: math.fsum(v) for t, v in a.items()}
        b = {t: math.fsum(v) for t, v in b.items()}
        factor = 1.0
        if model is NullModel.JM:
            factor = struct.community_lifetime(c).measure
        expected.append(_pair_sum(a, b, multipartite) * factor / (horizon * w))

    return QualityTerms(math.fsum(observed), math.fsum(expected), struct.total_switches(), w, m)


def lmodularity(stream: LinkStream, struct: DynamicCommunityStructure,
                params: QualityParams = QualityParams()) -> float:
    """Generalized Longitudinal Modularity of ``struct`` on ``stream``."""
    terms = lmodularity_terms(stream, struct, params.null_model)
    return terms.value(params.gamma, params.omega)


def static_modularity(adjacency, partition, types=None, gamma: float = 1.0) -> float:
    """Unified weighted/directed/multipartite static modularity.

    ``adjacency[u, v]`` is the weight from ``u`` to ``v``; undirected graphs
    pass a symmetric matrix.
    """
    A = np.asarray(adjacency, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    if (A < 0).any():
        raise ValueError("adjacency weights must be non-negative")
    labels = np.asarray(partition)
    if labels.shape != (A.shape[0],):
        raise ValueError("partition must assign every node")
    w = A.sum()
    if w <= 0:
        raise ValueError("static modularity is undefined for a graph with zero weight")
    k_out = A.sum(axis=1)
    k_in = A.sum(axis=0)
    same = labels[:, None] == labels[None, :]
    allowed = np.ones_like(A)
    if types is not None:
        t = np.asarray(types)
        allowed = (t[:, None] != t[None, :]).astype(float)
    B = A - gamma * allowed * np.outer(k_out, k_in) / w
    return float(B[same].sum() / w)


def reduction_check(stream: LinkStream, partition: Mapping, gamma: float = 1.0,
                    null_model=NullModel.MM) -> tuple[float, float]:
    """Score a static partition of a single-instant discrete stream both as a
    dynamic structure and with static modularity."""
    dom = stream.domain
    if not dom.discrete or dom.measure != 1:
        raise StreamError("reduction check needs a discrete stream with a single instant")
    nodes = stream.nodes.nodes
    missing = [u for u in nodes if u not in partition]
    if missing:
        raise ValueError(f"partition does not cover nodes {missing[:5]}")
    t = dom.t_min
    struct = DynamicCommunityStructure(
        [MembershipSegment(u, t, t + 1, partition[u]) for u in nodes], discrete=True
    )
    q_dyn = lmodularity(stream, struct, QualityParams(null_model, gamma, 0.0))
    horizon = [(dom.t_min, dom.t_max)]
    A = np.array([[stream.weight_between(u, v, horizon, horizon) for v in nodes] for u in nodes])
    types = None
    if stream.nodes.multipartite:
        types = [stream.nodes.type(u) for u in nodes]
    q_static = static_modularity(A, [partition[u] for u in nodes], types, gamma)
    return q_dyn, q_static


# ----------------------------------------------------------------------
# incremental bookkeeping
# ----------------------------------------------------------------------


class Coverage:
    """Step function counting how many member pieces cover each time.

    ``add`` returns the change of the measure where the count is positive,
    which is how community lifetimes ``|T_C|`` are maintained.
    """

    __slots__ = ("keys", "vals")

    def __init__(self):
        self.keys: list[float] = []
        self.vals: list[int] = []

    def _split(self, t) -> int:
        i = bisect_left(self.keys, t)
        if i < len(self.keys) and self.keys[i] == t:
            return i
        self.keys.insert(i, t)
        self.vals.insert(i, self.vals[i - 1] if i > 0 else 0)
        return i

    def _merge(self, i: int) -> None:
        if i < len(self.keys) and self.vals[i] == (self.vals[i - 1] if i > 0 else 0):
            del self.keys[i]
            del self.vals[i]

    def add(self, a, b, delta: int) -> float:
        if not a < b:
            return 0.0
        i = self._split(a)
        j = self._split(b)
        change = 0.0
        for k in range(i, j):
            old = self.vals[k]
            new = old + delta
            if (old > 0) != (new > 0):
                length = self.keys[k + 1] - self.keys[k]
                change += length if new > 0 else -length
            self.vals[k] = new
        self._merge(j)
        self._merge(i)
        return change

    def add_all(self, intervals: Iterable, delta: int) -> float:
        return math.fsum(self.add(a, b, delta) for a, b in intervals)

    def probe(self, intervals: list, delta: int) -> float:
        """Measure change ``add_all`` would cause, leaving the map untouched."""
        change = self.add_all(intervals, delta)
        self.add_all(reversed(intervals), -delta)
        return change


@dataclass
class _Community:
    size: int = 0
    meas: dict = field(default_factory=dict)  # node -> |T_{u∈C}| (positive only)
    npos: dict = field(default_factory=dict)  # node -> positive-length pieces
    a: dict = field(default_factory=dict)  # type -> Σ k_out * weight
    b: dict = field(default_factory=dict)  # type -> Σ k_in * weight
    cov: Coverage = field(default_factory=Coverage)
    lifetime: float = 0.0
    term: float = 0.0


class Block:
    """Move data for a fixed set of elements relabelled together.

    ``inner`` holds, per node, the pieces that follow the block wherever it
    goes (element spans and gaps between two block elements); ``boundary``
    lists gaps shared with an element outside the block, whose assignment
    depends on that element's label; ``ext`` aggregates link weight to
    outside elements.
    """

    __slots__ = ("elements", "inner", "boundary", "ext")

    def __init__(self, graph: ElementGraph, elements: Iterable[int]):
        self.elements = sorted(elements)
        S = set(self.elements)
        inner: dict[str, list] = {}
        boundary = []
        ext: dict[int, float] = defaultdict(float)
        els = graph.elements
        for i in self.elements:
            e = els[i]
            pieces = inner.setdefault(e.node, [])
            if e.end > e.start:
                pieces.append((e.start, e.end))
            p = graph.prev[i]
            if p >= 0:
                gap = (els[p].end, e.start)
                if p in S:
                    if gap[1] > gap[0]:
                        pieces.append(gap)
                else:
                    boundary.append((e.node, gap, p))
            n = graph.next[i]
            if n >= 0 and n not in S:
                boundary.append((e.node, (e.end, els[n].start), n))
            for j, wt in graph.adj[i].items():
                if j not in S:
                    ext[j] += wt
        self.inner = {u: sorted(p) for u, p in inner.items()}
        self.boundary = boundary
        self.ext = dict(ext)

    def __len__(self) -> int:
        return len(self.elements)


@dataclass
class _View:
    """A block read against the current labels."""

    label: int
    link: dict  # label -> link weight from the block
    switches: Counter  # label -> boundary neighbours with that label
    gaps: dict  # label -> node -> boundary gap intervals


@dataclass
class _Side:
    """Aggregates of one community after a tentative move."""

    label: int
    meas: dict
    npos: dict
    a: dict
    b: dict
    pieces: list
    lifetime: float
    term: float


class IncrementalQuality:
    """Quality bookkeeping for a labelling of active elements."""

    def __init__(self, graph: ElementGraph, params: QualityParams,
                 labels: Optional[Iterable[int]] = None):
        self.graph = graph
        self.params = params
        if graph.w <= 0:
            raise StreamError("L-Modularity is undefined on a stream with zero total weight")
        n = len(graph)
        self.labels = list(range(n)) if labels is None else list(labels)
        if len(self.labels) != n:
            raise ValueError("one label per active element is required")
        self._jm = params.null_model is NullModel.JM
        self._scale = params.gamma / (graph.w * graph.w * graph.horizon)
        self._rebuild()

    # -- construction ---------------------------------------------------

    def _rebuild(self) -> None:
        g = self.graph
        lab = self.labels
        comms: dict[int, _Community] = defaultdict(_Community)
        self.obs = math.fsum(g.self_weight) + math.fsum(
            wt for i, j, wt in g.links if lab[i] == lab[j]
        )
        eta = 0
        for i in range(len(g)):
            comms[lab[i]].size += 1
        for node, seq in g.node_elements.items():
            pieces: dict[int, list] = defaultdict(list)
            for x in seq:
                e = g.elements[x]
                if e.end > e.start:
                    pieces[lab[x]].append((e.start, e.end))
                y = g.next[x]
                if y >= 0:
                    if lab[x] == lab[y]:
                        gap = g.gap(x)
                        if gap[1] > gap[0]:
                            pieces[lab[x]].append(gap)
                    else:
                        eta += 1
            for c, ps in pieces.items():
                com = comms[c]
                com.meas[node] = math.fsum(b - a for a, b in ps)
                com.npos[node] = len(ps)
                if self._jm:
                    com.lifetime += com.cov.add_all(ps, +1)
        self.eta = eta
        for com in comms.values():
            com.a, com.b = self._weights(com.meas)
            com.term = self._term(com.a, com.b, com.lifetime)
        self.comms = dict(comms)
        self._next_label = max(self.labels, default=-1) + 1

    def _node_weight(self, measure: float) -> float:
        if self._jm:
            return 1.0 if measure > 0 else 0.0
        return math.sqrt(measure)

    def _weights(self, meas: Mapping) -> tuple[dict, dict]:
        a: dict = defaultdict(list)
        b: dict = defaultdict(list)
        g = self.graph
        for u, mu in meas.items():
            t = g.node_type(u)
            s = self._node_weight(mu)
            a[t].append(g.k_out[u] * s)
            b[t].append(g.k_in[u] * s)
        return ({t: math.fsum(v) for t, v in a.items()}, {t: math.fsum(v) for t, v in b.items()})

    def _term(self, a: Mapping, b: Mapping, lifetime: float) -> float:
        s = _pair_sum(a, b, self.graph.multipartite)
        return s * lifetime if self._jm else s

    # -- queries ----------------------------------------------------------

    def terms(self) -> QualityTerms:
        g = self.graph
        expected = math.fsum(c.term for c in self.comms.values()) / (g.horizon * g.w)
        return QualityTerms(self.obs, expected, self.eta, g.w, g.m)

    def q(self) -> float:
        return self.terms().value(self.params.gamma, self.params.omega)

    def fresh_label(self) -> int:
        return self._next_label

    def community_sizes(self) -> dict[int, int]:
        return {c: com.size for c, com in self.comms.items()}

    # -- moves ------------------------------------------------------------

    def _view(self, block: Block) -> _View:
        lab = self.labels
        label = lab[block.elements[0]]
        link: dict[int, float] = defaultdict(float)
        for j, wt in block.ext.items():
            link[lab[j]] += wt
        switches: Counter = Counter()
        gaps: dict = defaultdict(lambda: defaultdict(list))
        for node, gap, nb in block.boundary:
            L = lab[nb]
            switches[L] += 1
            if gap[1] > gap[0]:
                gaps[L][node].append(gap)
        return _View(label, link, switches, gaps)

    def _side(self, block: Block, view: _View, label: int, sign: int) -> _Side:
        """Aggregates of ``label`` once the block leaves it (sign -1) or
        joins it (sign +1)."""
        com = self.comms.get(label)
        old_meas = com.meas if com else {}
        old_npos = com.npos if com else {}
        meas = {}
        npos = {}
        a = dict(com.a) if com else {}
        b = dict(com.b) if com else {}
        pieces = []
        g = self.graph
        for node, inner in block.inner.items():
            extra = view.gaps.get(label, {}).get(node, ())
            ps = inner + list(extra)
            if not ps:
                continue
            pieces.extend(ps)
            length = math.fsum(y - x for x, y in ps)
            m0 = old_meas.get(node, 0.0)
            n1 = old_npos.get(node, 0) + sign * len(ps)
            m1 = 0.0 if n1 == 0 else m0 + sign * length
            meas[node] = m1
            npos[node] = n1
            dw = self._node_weight(m1) - self._node_weight(m0)
            if dw:
                t = g.node_type(node)
                a[t] = a.get(t, 0.0) + g.k_out[node] * dw
                b[t] = b.get(t, 0.0) + g.k_in[node] * dw
        lifetime = com.lifetime if com else 0.0
        if self._jm and pieces:
            cov = com.cov if com else Coverage()
            lifetime += cov.probe(pieces, sign)
        if sign < 0 and com is not None and com.size == len(block):
            # the community empties: drop float residue
            a = {t: 0.0 for t in a}
            b = {t: 0.0 for t in b}
            lifetime = 0.0
        return _Side(label, meas, npos, a, b, pieces, lifetime, self._term(a, b, lifetime))

    def _gain(self, view: _View, source: _Side, target: _Side) -> float:
        g = self.graph
        c, t = source.label, target.label
        d_obs = view.link.get(t, 0.0) - view.link.get(c, 0.0)
        d_eta = view.switches.get(c, 0) - view.switches.get(t, 0)
        old = (self.comms[c].term, self.comms[t].term if t in self.comms else 0.0)
        d_exp = (source.term - old[0]) + (target.term - old[1])
        return d_obs / g.w - self._scale * d_exp - self.params.omega * d_eta / (2 * g.m)

    def candidates(self, block: Block, include_fresh: bool = True) -> list[int]:
        """Labels of topological and temporal neighbours, plus a fresh
        singleton label when the block does not form its community alone."""
        view = self._view(block)
        c = view.label
        cands = set(view.link) | set(view.switches)
        if include_fresh and self.comms[c].size > len(block):
            cands.add(self._next_label)
        cands.discard(c)
        return sorted(cands)

    def iter_gains(self, block: Block, targets: Iterable[int]):
        """Yield ``(target, gain)`` lazily for moving the whole block."""
        view = self._view(block)
        c = view.label
        source = None
        for t in targets:
            if t == c:
                yield t, 0.0
                continue
            if source is None:
                source = self._side(block, view, c, -1)
            yield t, self._gain(view, source, self._side(block, view, t, +1))

    def gains(self, block: Block, candidates: Optional[Iterable[int]] = None,
              include_fresh: bool = True) -> dict[int, float]:
        """Quality change for moving the whole block to each candidate label
        (neighbour labels by default, see :meth:`candidates`)."""
        if candidates is None:
            cands = self.candidates(block, include_fresh)
        else:
            c = self.labels[block.elements[0]]
            cands = sorted(set(candidates) - {c})
        return dict(self.iter_gains(block, cands))

    def gain(self, block: Block, target: Optional[int]) -> float:
        if target is None:
            target = self._next_label
        if target == self.labels[block.elements[0]]:
            return 0.0
        return self.gains(block, [target])[target]

    def apply(self, block: Block, target: Optional[int]) -> float:
        """Relabel the block and return the realized quality change."""
        if target is None:
            target = self._next_label
        view = self._view(block)
        c = view.label
        if target == c:
            return 0.0
        source = self._side(block, view, c, -1)
        dest = self._side(block, view, target, +1)
        gain = self._gain(view, source, dest)

        self.obs += view.link.get(target, 0.0) - view.link.get(c, 0.0)
        self.eta += view.switches.get(c, 0) - view.switches.get(target, 0)
        for side, sign in ((source, -1), (dest, +1)):
            com = self.comms.setdefault(side.label, _Community())
            com.size += sign * len(block)
            for node, n1 in side.npos.items():
                if n1:
                    com.meas[node] = side.meas[node]
                    com.npos[node] = n1
                else:
                    com.meas.pop(node, None)
                    com.npos.pop(node, None)
            com.a, com.b = side.a, side.b
            if self._jm and side.pieces:
                com.cov.add_all(side.pieces, sign)
            com.lifetime = side.lifetime
            com.term = side.term
            if com.size == 0:
                del self.comms[side.label]
        for i in block.elements:
            self.labels[i] = target
        if target >= self._next_label:
            self._next_label = target + 1
        return gain


def move_gain(tracker: IncrementalQuality, element: int, target: Optional[int]) -> float:
    """Exact quality change of relabelling one active element.

    ``target=None`` detaches the element into a fresh singleton community;
    moving to the element's own community is a no-op with gain 0.
    """
    return tracker.gain(Block(tracker.graph, [element]), target)
