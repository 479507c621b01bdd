"""Generalized link streams: weighted, directed, multipartite, with
instantaneous, delayed or interval-based interactions."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .errors import StreamError
from .timeset import Segment, TimeSet


class TimeKind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


class Modality(str, Enum):
    TIMESTAMPED = "timestamped"
    INTERVAL = "interval"


@dataclass(frozen=True)
class TimeDomain:
    """Observation horizon ``[t_min, t_max)``.

    In discrete time both bounds are integers and an instant ``t`` stands for
    the unit segment ``[t, t+1)``.  In continuous time an instant is the
    zero-measure segment ``[t, t)``; instantaneous timestamps are accepted on
    the closed horizon so that the last event of a stream needs no padding.
    """

    kind: TimeKind
    t_min: float
    t_max: float

    def __post_init__(self):
        object.__setattr__(self, "kind", TimeKind(self.kind))
        if self.kind is TimeKind.DISCRETE:
            object.__setattr__(self, "t_min", _as_int(self.t_min))
            object.__setattr__(self, "t_max", _as_int(self.t_max))
        if not self.t_min < self.t_max:
            raise StreamError(f"empty horizon [{self.t_min}, {self.t_max})")

    @property
    def discrete(self) -> bool:
        return self.kind is TimeKind.DISCRETE

    @property
    def measure(self) -> float:
        return self.t_max - self.t_min

    @classmethod
    def spanning(cls, times: Iterable[float], kind: TimeKind | str) -> "TimeDomain":
        """Smallest horizon holding ``times``: ``[min, max+1)`` in discrete
        time, ``[min, max]`` in continuous time."""
        kind = TimeKind(kind)
        times = list(times)
        if not times:
            raise StreamError("cannot infer a horizon without any time")
        lo, hi = min(times), max(times)
        if kind is TimeKind.DISCRETE:
            return cls(kind, _as_int(lo), _as_int(hi) + 1)
        if not lo < hi:
            raise StreamError(
                f"continuous stream spans the single time {lo}; give an explicit horizon"
            )
        return cls(kind, lo, hi)

    def instant(self, t: float) -> Segment:
        return (t, t + 1) if self.discrete else (t, t)

    def check_time(self, t: float, *, closed: bool = False) -> float:
        if self.discrete:
            t = _as_int(t)
        hi_ok = t <= self.t_max if closed else t < self.t_max
        if not (self.t_min <= t and hi_ok):
            raise StreamError(f"time {t} outside horizon [{self.t_min}, {self.t_max})")
        return t


def _as_int(t) -> int:
    if isinstance(t, bool):
        raise StreamError(f"invalid time {t!r}")
    if isinstance(t, int):
        return t
    try:
        f = float(t)
    except (TypeError, ValueError):
        raise StreamError(f"non-numeric time {t!r}") from None
    if not f.is_integer():
        raise StreamError(f"discrete time must be an integer, got {t!r}")
    return int(f)


@dataclass(frozen=True)
class NodeTable:
    nodes: tuple
    type_of: Optional[Mapping[str, str]] = None

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if len(set(nodes)) != len(nodes):
            raise StreamError("duplicate node ids")
        if self.type_of is not None:
            type_of = dict(self.type_of)
            missing = [u for u in nodes if u not in type_of]
            if missing:
                raise StreamError(f"nodes without a type: {missing[:5]}")
            type_of = {u: type_of[u] for u in nodes}
            if len(set(type_of.values())) < 2:
                raise StreamError("a multipartite stream needs at least two node types")
            object.__setattr__(self, "type_of", type_of)

    @property
    def multipartite(self) -> bool:
        return self.type_of is not None

    def allowed(self, u, v) -> int:
        """``b_uv``: 1 if the null model may place weight from u to v."""
        if self.type_of is None:
            return 1
        return int(self.type_of[u] != self.type_of[v])

    def type(self, u):
        return None if self.type_of is None else self.type_of[u]


@dataclass(frozen=True)
class Interaction:
    src: str
    dst: str
    t_start: float
    t_second: float
    weight: float = 1.0
    directed: bool = True

    @property
    def factor(self) -> int:
        # undirected records stand for two reciprocal directed interactions
        return 1 if self.directed else 2

    @property
    def duration(self) -> float:
        return self.t_second - self.t_start

    def reversed(self) -> "Interaction":
        return Interaction(
            self.dst, self.src, self.t_start, self.t_second, self.weight, self.directed
        )


@dataclass(frozen=True)
class _Oriented:
    """One directed reading of a stored interaction (undirected ones have two)."""

    t_from: float
    t_to: float
    weight: float
    record: Interaction = field(compare=False)


class LinkStream:
    """An immutable generalized link stream.

    ``base_m`` overrides the interaction count reported by :meth:`totals`;
    segmentation and undirected expansion use it to keep the original ``m``.
    """

    def __init__(
        self,
        domain: TimeDomain,
        interactions: Iterable[Interaction],
        modality: Modality | str = Modality.TIMESTAMPED,
        nodes: NodeTable | Iterable[str] | None = None,
        base_m: Optional[int] = None,
    ):
        self.domain = domain
        self.modality = Modality(modality)
        records = []
        for it in interactions:
            records.append(self._validated(it))
        self.interactions: tuple[Interaction, ...] = tuple(records)

        if nodes is None:
            seen = dict.fromkeys(u for it in records for u in (it.src, it.dst))
            nodes = NodeTable(tuple(seen))
        elif not isinstance(nodes, NodeTable):
            nodes = NodeTable(tuple(nodes))
        self.nodes = nodes
        known = set(nodes.nodes)
        for it in records:
            for u in (it.src, it.dst):
                if u not in known:
                    raise StreamError(f"interaction endpoint {u!r} missing from node table")
            if nodes.multipartite and not nodes.allowed(it.src, it.dst):
                raise StreamError(
                    f"same-type interaction {it.src!r} -> {it.dst!r} in a multipartite stream"
                )
        if base_m is not None and base_m < 0:
            raise StreamError("base_m must be non-negative")
        self.base_m = base_m

    def _validated(self, it: Interaction) -> Interaction:
        dom = self.domain
        if not (it.weight > 0) or math.isinf(it.weight):
            raise StreamError(f"interaction weight must be positive and finite: {it}")
        if it.t_second < it.t_start:
            raise StreamError(f"t_start after t_second in {it}")
        if self.modality is Modality.INTERVAL:
            ts = dom.check_time(it.t_start, closed=True)
            te = dom.check_time(it.t_second, closed=True)
        else:
            closed = not dom.discrete
            ts = dom.check_time(it.t_start, closed=closed)
            te = dom.check_time(it.t_second, closed=closed)
        if (ts, te) != (it.t_start, it.t_second) or type(ts) is not type(it.t_start):
            it = Interaction(it.src, it.dst, ts, te, it.weight, it.directed)
        return it

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------

    def replace(self, interactions=None, *, nodes=None, modality=None, base_m="keep",
                domain=None) -> "LinkStream":
        return LinkStream(
            domain or self.domain,
            self.interactions if interactions is None else interactions,
            modality or self.modality,
            nodes or self.nodes,
            self.base_m if base_m == "keep" else base_m,
        )

    def __repr__(self) -> str:
        return (
            f"LinkStream({self.modality.value}, {self.domain.kind.value} "
            f"[{self.domain.t_min}, {self.domain.t_max}), "
            f"{len(self.nodes.nodes)} nodes, {len(self.interactions)} interactions)"
        )

    @property
    def timestamped(self) -> bool:
        return self.modality is Modality.TIMESTAMPED

    @property
    def directed(self) -> bool:
        return all(it.directed for it in self.interactions)

    # ------------------------------------------------------------------
    # indices
    # ------------------------------------------------------------------

    @cached_property
    def _by_pair(self) -> dict[tuple, list[_Oriented]]:
        """Directed readings keyed by (from, to).

        The reverse reading of an undirected ``(x, y, t_s, t_d)`` leaves ``y``
        at ``t_d`` and reaches ``x`` at ``t_s``, so the active node pairs are
        the same in both orientations.
        """
        index: dict[tuple, list[_Oriented]] = defaultdict(list)
        for it in self.interactions:
            index[(it.src, it.dst)].append(_Oriented(it.t_start, it.t_second, it.weight, it))
            if not it.directed:
                if self.timestamped:
                    rev = _Oriented(it.t_second, it.t_start, it.weight, it)
                else:
                    rev = _Oriented(it.t_start, it.t_second, it.weight, it)
                index[(it.dst, it.src)].append(rev)
        return dict(index)

    @cached_property
    def out_neighbors(self) -> dict[str, tuple]:
        nb: dict[str, set] = defaultdict(set)
        for u, v in self._by_pair:
            nb[u].add(v)
        return {u: tuple(sorted(vs, key=str)) for u, vs in nb.items()}

    def pair_readings(self, u, v) -> list[_Oriented]:
        return self._by_pair.get((u, v), [])

    def _check_node(self, u):
        if u not in self._node_set:
            raise StreamError(f"unknown node {u!r}")

    @cached_property
    def _node_set(self) -> frozenset:
        return frozenset(self.nodes.nodes)

    # ------------------------------------------------------------------
    # aggregate quantities
    # ------------------------------------------------------------------

    def weight_between(self, u, v, T1, T2) -> float:
        """``W_{uv,T1 T2}``.

        Timestamped streams: weight of interactions leaving ``u`` during
        ``T1`` and reaching ``v`` during ``T2``.  Interval streams: integral
        of the intensity ``uv_t`` over ``T1 ∩ T2``.
        """
        self._check_node(u)
        self._check_node(v)
        T1, T2 = TimeSet.coerce(T1), TimeSet.coerce(T2)
        readings = self.pair_readings(u, v)
        if not readings or T1.is_empty() or T2.is_empty():
            return 0.0
        if self.timestamped:
            return math.fsum(r.weight for r in readings if r.t_from in T1 and r.t_to in T2)
        joint = T1 & T2
        return math.fsum(r.weight * joint.clip(r.t_from, r.t_to).measure for r in readings)

    def count_between(self, u, v, T1, T2) -> int:
        """``L_{uv,T1 T2}``, the number of matching interactions."""
        if not self.timestamped:
            raise StreamError("interaction counts are only defined for timestamped streams")
        self._check_node(u)
        self._check_node(v)
        T1, T2 = TimeSet.coerce(T1), TimeSet.coerce(T2)
        return sum(1 for r in self.pair_readings(u, v) if r.t_from in T1 and r.t_to in T2)

    def interaction_weight(self, it: Interaction) -> float:
        """Total weight one stored record contributes over the horizon, both
        directions included."""
        base = it.weight if self.timestamped else it.weight * it.duration
        return base * it.factor

    @cached_property
    def _degrees(self) -> dict[str, tuple[float, float]]:
        k_in: dict[str, list] = {u: [] for u in self.nodes.nodes}
        k_out: dict[str, list] = {u: [] for u in self.nodes.nodes}
        for it in self.interactions:
            w = it.weight if self.timestamped else it.weight * it.duration
            k_out[it.src].append(w)
            k_in[it.dst].append(w)
            if not it.directed:
                k_out[it.dst].append(w)
                k_in[it.src].append(w)
        return {u: (math.fsum(k_in[u]), math.fsum(k_out[u])) for u in self.nodes.nodes}

    def degrees(self) -> dict[str, tuple[float, float]]:
        """Map node -> ``(k_in, k_out)`` over the full horizon."""
        return dict(self._degrees)

    def degree(self, u) -> tuple[float, float]:
        return self._degrees[u]

    @cached_property
    def _total_weight(self) -> float:
        return math.fsum(self.interaction_weight(it) for it in self.interactions)

    def totals(self) -> tuple[float, int]:
        """Total weight ``w`` and interaction count ``m``."""
        m = len(self.interactions) if self.base_m is None else self.base_m
        return self._total_weight, m

    @property
    def total_weight(self) -> float:
        return self.totals()[0]


def degrees(stream: LinkStream) -> dict[str, tuple[float, float]]:
    return stream.degrees()


def totals(stream: LinkStream) -> tuple[float, int]:
    return stream.totals()


def weight_between(stream: LinkStream, u, v, T1, T2) -> float:
    return stream.weight_between(u, v, T1, T2)


def count_between(stream: LinkStream, u, v, T1, T2) -> int:
    return stream.count_between(u, v, T1, T2)
