"""LAGO-style greedy optimization of L-Modularity.

Every active element starts in its own time module.  The core loop moves
groups of elements between communities (single elements first, then whole
modules after aggregation) and, optionally, refines the result by moving
per-node contiguous blocks.  A move relabels the group; the membership gaps
next to it follow the induced rule, so a gap is assigned exactly when both
of its delimiting elements end up in the same community.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .community import DynamicCommunityStructure
from .elements import ElementGraph, induced_structure
from .errors import StreamError
from .quality import Block, IncrementalQuality, QualityParams, lmodularity
from .segmentation import is_segmented, segment
from .stream import LinkStream

MIN_GAIN = 1e-12


class Refine(str, Enum):
    NONE = "none"
    STEM = "stem"


@dataclass(frozen=True)
class OptimizerConfig:
    params: QualityParams = QualityParams()
    seed: int = 0
    max_passes: int = 100
    refine: Refine = Refine.STEM
    fast: bool = False
    runs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "refine", Refine(self.refine))
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass
class Diagnostics:
    passes: int = 0
    moves: int = 0
    q_trace: list[float] = field(default_factory=list)
    run_q: list[float] = field(default_factory=list)
    best_run: int = 0


@dataclass
class LagoState:
    """Optimizer state for one run: labels live in the tracker, ``groups``
    are the blocks currently moved as units."""

    tracker: IncrementalQuality
    groups: list[Block]
    rng: np.random.Generator
    fast: bool = False
    passes: int = 0
    moves: int = 0
    q_trace: list[float] = field(default_factory=list)

    @classmethod
    def initial(cls, graph: ElementGraph, params: QualityParams, rng: np.random.Generator,
                fast: bool = False) -> "LagoState":
        tracker = IncrementalQuality(graph, params)
        groups = [Block(graph, [i]) for i in range(len(graph))]
        return cls(tracker, groups, rng, fast, q_trace=[tracker.q()])

    @property
    def graph(self) -> ElementGraph:
        return self.tracker.graph

    @property
    def labels(self) -> list[int]:
        return self.tracker.labels

    def q(self) -> float:
        return self.tracker.q()

    def structure(self) -> DynamicCommunityStructure:
        return induced_structure(self.graph, self.labels)


def _best_move(state: LagoState, block: Block):
    tracker = state.tracker
    cands = tracker.candidates(block)
    if not cands:
        return None, 0.0
    if state.fast:
        order = [cands[k] for k in state.rng.permutation(len(cands))]
        for t, g in tracker.iter_gains(block, order):
            if g > MIN_GAIN:
                return t, g
        return None, 0.0
    best, best_gain = None, MIN_GAIN
    for t, g in tracker.iter_gains(block, cands):
        # candidates come sorted, so strict comparison keeps the lowest label on ties
        if g > best_gain:
            best, best_gain = t, g
    return best, best_gain


def local_move_pass(state: LagoState) -> tuple[LagoState, bool]:
    """One sweep over the current groups in random order, applying each
    group's best strictly positive move."""
    improved = False
    for k in state.rng.permutation(len(state.groups)):
        block = state.groups[k]
        target, _ = _best_move(state, block)
        if target is not None:
            state.tracker.apply(block, target)
            state.moves += 1
            improved = True
    state.passes += 1
    state.q_trace.append(state.q())
    return state, improved


def aggregate(state: LagoState) -> LagoState:
    """Turn every current community (time module) into one meta-element."""
    classes: dict[int, list[int]] = defaultdict(list)
    for i, c in enumerate(state.labels):
        classes[c].append(i)
    state.groups = [Block(state.graph, classes[c]) for c in sorted(classes)]
    return state


def stem_blocks(graph: ElementGraph, labels) -> list[Block]:
    """Maximal runs of consecutive same-label elements of each node."""
    blocks = []
    for seq in graph.node_elements.values():
        run = [seq[0]]
        for x in seq[1:]:
            if labels[x] == labels[run[-1]]:
                run.append(x)
            else:
                blocks.append(Block(graph, run))
                run = [x]
        blocks.append(Block(graph, run))
    return blocks


def _converge(state: LagoState, max_passes: int) -> bool:
    improved_any = False
    while state.passes < max_passes:
        state, improved = local_move_pass(state)
        improved_any |= improved
        if not improved:
            break
    return improved_any


def refine_stem(state: LagoState, max_passes: int | None = None) -> tuple[LagoState, bool]:
    """Split modules into per-node contiguous blocks and move those blocks.

    Refinement is kept only if it does not lower the quality.
    """
    before_labels = list(state.labels)
    before_q = state.q()
    saved_groups = state.groups
    state.groups = stem_blocks(state.graph, state.labels)
    limit = state.passes + 100 if max_passes is None else max(max_passes, state.passes + 1)
    improved = _converge(state, limit)
    if state.q() < before_q:
        state.tracker = IncrementalQuality(state.graph, state.tracker.params, before_labels)
        state.groups = saved_groups
        state.q_trace.append(state.q())
        return state, False
    return state, improved


def optimize(graph: ElementGraph, params: QualityParams, rng: np.random.Generator,
             max_passes: int = 100, refine: Refine | str = Refine.STEM,
             fast: bool = False) -> LagoState:
    """A single optimization run on prepared elements."""
    refine = Refine(refine)
    state = LagoState.initial(graph, params, rng, fast)
    while state.passes < max_passes:
        improved = _converge(state, max_passes)
        if refine is Refine.STEM and state.passes < max_passes:
            state, refined = refine_stem(state, max_passes)
            improved |= refined
        if not improved:
            break
        aggregate(state)
    return state


def prepare(stream: LinkStream) -> ElementGraph:
    if not stream.interactions:
        raise StreamError("cannot detect communities in an empty stream")
    work = stream
    if not stream.timestamped and not is_segmented(stream):
        work = segment(stream).stream
    return ElementGraph(work)


def detect(stream: LinkStream, config: OptimizerConfig = OptimizerConfig()
           ) -> tuple[DynamicCommunityStructure, float, Diagnostics]:
    """Best of ``config.runs`` seeded optimizations.

    Returns the structure, its quality (recomputed from the structure) and
    diagnostics of the winning run.
    """
    graph = prepare(stream)
    seeds = np.random.SeedSequence(config.seed).spawn(config.runs)
    best = None
    run_q = []
    for k, ss in enumerate(seeds):
        state = optimize(graph, config.params, np.random.default_rng(ss), config.max_passes,
                         config.refine, config.fast)
        q = state.q()
        run_q.append(q)
        if best is None or q > best[1]:
            best = (k, q, state)
    k, _, state = best
    struct = state.structure()
    q = lmodularity(stream, struct, config.params)
    diag = Diagnostics(state.passes, state.moves, list(state.q_trace), run_q, k)
    return struct, q, diag
