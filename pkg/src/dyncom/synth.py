"""Seeded random streams with planted two-scale dynamic communities.

Nodes are split into ``groups`` coarse groups, each split into ``subgroups``
fine groups.  Time is cut into ``blocks`` blocks of ``block_length``; at the
start of every block after the first, each node independently moves to a
uniformly chosen fine group with probability ``churn``.  Within a block, each
node pair interacts a Poisson number of times with rate ``lam_fine`` (same
fine group), ``lam_coarse`` (same coarse group only) or ``lam_out``, per unit
of time; interactions are undirected, instantaneous, weight 1, at uniform
times inside the block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .community import DynamicCommunityStructure, MembershipSegment
from .stream import Interaction, LinkStream, Modality, TimeDomain, TimeKind


@dataclass(frozen=True)
class PlantedConfig:
    groups: int = 2
    subgroups: int = 2
    group_size: int = 4  # nodes per fine group
    blocks: int = 2
    block_length: int = 10
    lam_fine: float = 0.3
    lam_coarse: float = 0.08
    lam_out: float = 0.005
    churn: float = 0.0
    time: TimeKind = TimeKind.DISCRETE
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "time", TimeKind(self.time))
        if min(self.groups, self.subgroups, self.group_size, self.blocks, self.block_length) < 1:
            raise ValueError("planted model sizes must be positive")
        if not self.lam_fine >= self.lam_coarse >= self.lam_out >= 0:
            raise ValueError("rates must satisfy lam_fine >= lam_coarse >= lam_out >= 0")
        if not 0 <= self.churn <= 1:
            raise ValueError("churn must lie in [0, 1]")


@dataclass(frozen=True)
class PlantedStream:
    stream: LinkStream
    fine: DynamicCommunityStructure
    coarse: DynamicCommunityStructure


def planted_stream(cfg: PlantedConfig = PlantedConfig()) -> PlantedStream:
    rng = np.random.default_rng(cfg.seed)
    n_fine = cfg.groups * cfg.subgroups
    n = n_fine * cfg.group_size
    width = len(str(n - 1))
    nodes = [f"n{k:0{width}d}" for k in range(n)]
    fine_of = np.repeat(np.arange(n_fine), cfg.group_size)
    discrete = cfg.time is TimeKind.DISCRETE

    interactions = []
    fine_segs, coarse_segs = [], []
    iu, iv = np.triu_indices(n, k=1)
    for b in range(cfg.blocks):
        if b > 0 and cfg.churn > 0:
            moving = rng.random(n) < cfg.churn
            fine_of = np.where(moving, rng.integers(0, n_fine, n), fine_of)
        lo, hi = b * cfg.block_length, (b + 1) * cfg.block_length
        coarse_of = fine_of // cfg.subgroups
        rate = np.where(
            fine_of[iu] == fine_of[iv], cfg.lam_fine,
            np.where(coarse_of[iu] == coarse_of[iv], cfg.lam_coarse, cfg.lam_out),
        )
        counts = rng.poisson(rate * cfg.block_length)
        for k in np.flatnonzero(counts):
            if discrete:
                times = rng.integers(lo, hi, counts[k])
            else:
                times = rng.uniform(lo, hi, counts[k])
            for t in np.sort(times):
                t = int(t) if discrete else float(t)
                interactions.append(Interaction(nodes[iu[k]], nodes[iv[k]], t, t, 1.0, False))
        for u in range(n):
            fine_segs.append(MembershipSegment(nodes[u], lo, hi, int(fine_of[u])))
            coarse_segs.append(MembershipSegment(nodes[u], lo, hi, int(coarse_of[u])))

    interactions.sort(key=lambda it: (it.t_start, it.src, it.dst))
    domain = TimeDomain(cfg.time, 0, cfg.blocks * cfg.block_length)
    stream = LinkStream(domain, interactions, Modality.TIMESTAMPED, nodes)
    return PlantedStream(
        stream,
        _merge_runs(fine_segs, discrete),
        _merge_runs(coarse_segs, discrete),
    )


def _merge_runs(segs: list[MembershipSegment], discrete: bool) -> DynamicCommunityStructure:
    """Join a node's consecutive blocks spent in the same community."""
    merged: dict[str, list[MembershipSegment]] = {}
    for s in segs:
        lst = merged.setdefault(s.node, [])
        if lst and lst[-1].community == s.community and lst[-1].end == s.start:
            lst[-1] = MembershipSegment(s.node, lst[-1].start, s.end, s.community)
        else:
            lst.append(s)
    return DynamicCommunityStructure(
        [s for lst in merged.values() for s in lst], discrete=discrete
    )
