"""Exhaustive optimum for tiny streams.

All set partitions of the active elements are enumerated as restricted
growth strings (lexicographic order) and scored in vectorized batches by an
evaluator that shares nothing with the optimizer's incremental bookkeeping.
"""

from __future__ import annotations

import numpy as np

from .community import DynamicCommunityStructure
from .elements import ElementGraph, induced_structure
from .errors import OracleSizeError
from .lago import prepare
from .quality import NullModel, QualityParams, lmodularity
from .stream import LinkStream

HARD_LIMIT = 12
_CHUNK = 1 << 15


def restricted_growth_strings(n: int) -> np.ndarray:
    """All restricted growth strings of length ``n`` in lexicographic order,
    one per row (Bell(n) rows)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)  # largest label used so far
    for _ in range(1, n):
        fan = top.astype(np.int64) + 2
        idx = np.repeat(np.arange(len(rows)), fan)
        starts = np.cumsum(fan) - fan
        vals = (np.arange(len(idx)) - np.repeat(starts, fan)).astype(np.int8)
        rows = np.concatenate([rows[idx], vals[:, None]], axis=1)
        top = np.maximum(top[idx], vals)
    return rows


class _Evaluator:
    """Vectorized L-Modularity of element labellings under induced
    memberships."""

    def __init__(self, graph: ElementGraph, params: QualityParams):
        self.params = params
        self.n = n = len(graph)
        self.w, self.m, self.horizon = graph.w, graph.m, graph.horizon
        self.jm = params.null_model is NullModel.JM
        self.self_obs = float(sum(graph.self_weight))
        links = graph.links
        self.li = np.array([i for i, _, _ in links], dtype=np.int64)
        self.lj = np.array([j for _, j, _ in links], dtype=np.int64)
        self.lw = np.array([wt for _, _, wt in links], dtype=float)

        nodes = list(graph.node_elements)
        node_ix = {u: k for k, u in enumerate(nodes)}
        self.n_nodes = len(nodes)
        # pieces: element spans (always labelled) and gaps (labelled if both ends agree)
        pieces = []
        for e in graph.elements:
            pieces.append((e.start, e.end, node_ix[e.node], e.index, e.index))
        self.tx, self.ty = [], []
        for i in range(n):
            j = graph.next[i]
            if j >= 0:
                self.tx.append(i)
                self.ty.append(j)
                a, b = graph.gap(i)
                pieces.append((a, b, node_ix[graph.elements[i].node], i, j))
        self.tx = np.array(self.tx, dtype=np.int64)
        self.ty = np.array(self.ty, dtype=np.int64)
        self.pieces = [p for p in pieces if p[1] > p[0]]

        cuts = sorted({p[0] for p in self.pieces} | {p[1] for p in self.pieces})
        self.cell_len = np.diff(np.array(cuts, dtype=float)) if cuts else np.zeros(0)
        cut_ix = {t: k for k, t in enumerate(cuts)}
        self.piece_cells = [np.arange(cut_ix[a], cut_ix[b]) for a, b, *_ in self.pieces]

        types = sorted({graph.node_type(u) for u in nodes}, key=str)
        self.multipartite = graph.multipartite
        self.kout = np.zeros((self.n_nodes, len(types)))
        self.kin = np.zeros((self.n_nodes, len(types)))
        for u, k in node_ix.items():
            t = types.index(graph.node_type(u))
            self.kout[k, t] = graph.k_out[u]
            self.kin[k, t] = graph.k_in[u]

    def __call__(self, L: np.ndarray) -> np.ndarray:
        B, n = L.shape
        rows = np.arange(B)
        L = L.astype(np.int64)
        obs = self.self_obs + ((L[:, self.li] == L[:, self.lj]) * self.lw).sum(axis=1)
        eta = (L[:, self.tx] != L[:, self.ty]).sum(axis=1)

        n_lab = n + 1  # slot n collects unassigned gaps
        meas = np.zeros((B, n_lab, self.n_nodes))
        cover = np.zeros((B, n_lab, len(self.cell_len)), dtype=bool)
        for (a, b, u, x, y), cells in zip(self.pieces, self.piece_cells):
            lab = L[:, x] if x == y else np.where(L[:, x] == L[:, y], L[:, x], n)
            meas[rows, lab, u] += b - a
            if self.jm:
                cover[rows[:, None], lab[:, None], cells[None, :]] = True
        meas = meas[:, :n, :]
        weight = (meas > 0).astype(float) if self.jm else np.sqrt(meas)
        a = weight @ self.kout  # B x labels x types
        b = weight @ self.kin
        if self.multipartite:
            pair = (a * (b.sum(axis=2, keepdims=True) - b)).sum(axis=2)
        else:
            pair = a[:, :, 0] * b[:, :, 0]
        if self.jm:
            pair = pair * (cover[:, :n, :] @ self.cell_len)
        expected = pair.sum(axis=1) / (self.horizon * self.w)
        p = self.params
        return (obs - p.gamma * expected) / self.w - p.omega * eta / (2 * self.m)


def enumerate_optimal(stream: LinkStream, params: QualityParams = QualityParams(),
                      max_elements: int = HARD_LIMIT) -> tuple[DynamicCommunityStructure, float]:
    """Global optimum over all partitions of the active elements.

    Ties are resolved towards the lexicographically first labelling.
    """
    graph = prepare(stream)
    limit = min(max_elements, HARD_LIMIT)
    if len(graph) > limit:
        raise OracleSizeError(len(graph), limit)
    labels, _ = best_labelling(graph, params)
    struct = induced_structure(graph, labels)
    return struct, lmodularity(stream, struct, params)


def best_labelling(graph: ElementGraph, params: QualityParams) -> tuple[list[int], float]:
    evaluate = _Evaluator(graph, params)
    rgs = restricted_growth_strings(len(graph))
    best_q, best_row = -np.inf, None
    for lo in range(0, len(rgs), _CHUNK):
        q = evaluate(rgs[lo:lo + _CHUNK])
        top = q.max()
        if top > best_q + 1e-12:
            k = int(np.flatnonzero(q >= top - 1e-12)[0])
            best_q, best_row = float(q[k]), rgs[lo + k]
    return [int(v) for v in best_row], best_q
