"""Group-induced graph and binomial significance of inter-group edges."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO

import numpy as np

from .binomial import EXACT_THRESHOLD, binomial_score
from .graph import Graph, Group, group_stats


@dataclass
class GroupGraph:
    """Groups as nodes; edge weights count cross-group node-pair edges.

    ``weights`` holds both ``(a, b)`` and ``(b, a)``.  Edges touching nodes
    outside every group are tallied in ``residual``.
    """

    groups: list
    weights: dict
    self_weights: dict
    residual: int

    def __post_init__(self):
        self.by_id = {g.id: g for g in self.groups}

    def weight(self, a: str, b: str) -> int:
        return self.weights.get((a, b), 0)

    def pairs(self):
        """Each connected pair once, in group order."""
        order = {g.id: i for i, g in enumerate(self.groups)}
        return sorted(((a, b) for (a, b) in self.weights if order[a] < order[b]),
                      key=lambda ab: (order[ab[0]], order[ab[1]]))


def build_group_graph(graph: Graph, partition: list[Group]) -> GroupGraph:
    groups = sorted(partition, key=lambda g: g.id)
    if len({g.id for g in groups}) != len(groups):
        raise ValueError("duplicate group ids")
    assign = np.full(graph.node_count, -1, dtype=np.int64)
    for gi, g in enumerate(groups):
        g.validate(graph)
        idx = g.array
        if np.any(assign[idx] >= 0):
            raise ValueError(f"group {g.id!r} overlaps another group")
        assign[idx] = gi
    rows = np.repeat(np.arange(graph.node_count), np.diff(graph.indptr))
    keep = rows < graph.indices
    cu, cv = assign[rows[keep]], assign[graph.indices[keep]]
    w = graph.weights[keep]
    loops = graph.self_loops

    residual = int(w[(cu < 0) | (cv < 0)].sum()) + int(loops[assign < 0].sum())
    both = (cu >= 0) & (cv >= 0)
    cu, cv, w = cu[both], cv[both], w[both]
    self_weights = {g.id: 0 for g in groups}
    internal = np.bincount(cu[cu == cv], weights=w[cu == cv], minlength=len(groups))
    internal += np.bincount(assign[assign >= 0], weights=loops[assign >= 0], minlength=len(groups))
    for gi, g in enumerate(groups):
        self_weights[g.id] = int(internal[gi])
    weights: dict = {}
    cross = cu != cv
    lo = np.minimum(cu[cross], cv[cross])
    hi = np.maximum(cu[cross], cv[cross])
    if lo.size:
        key = lo * len(groups) + hi
        uniq, inv = np.unique(key, return_inverse=True)
        sums = np.bincount(inv, weights=w[cross])
        for k, s in zip(uniq.tolist(), sums.tolist()):
            a, b = groups[k // len(groups)].id, groups[k % len(groups)].id
            weights[(a, b)] = weights[(b, a)] = int(s)
    return GroupGraph(groups, weights, self_weights, residual)


@dataclass(frozen=True)
class EdgeSignificance:
    source: str
    target: str
    weight: int
    trials: int
    p: float
    score: float
    defined: bool = True


def edge_significance(graph: Graph, group_graph: GroupGraph, source: str, target: str,
                      trials_mode: str = "outgoing",
                      exact_threshold: int | None = EXACT_THRESHOLD) -> EdgeSignificance:
    """Tail score of ``source`` sending at least ``weight`` edges to ``target``.

    Under the null each outgoing edge of ``source`` lands on a uniformly
    random node outside it, so ``p = |target| / (n - |source|)``.  With
    ``trials_mode="total"`` internal edges of ``source`` count as trials too.
    """
    if source == target:
        raise ValueError("source and target must differ")
    gs, gt = group_graph.by_id[source], group_graph.by_id[target]
    st = group_stats(graph, gs)
    if trials_mode == "outgoing":
        trials = st.outgoing
    elif trials_mode == "total":
        trials = st.deg
    else:
        raise ValueError(f"unknown trials mode {trials_mode!r}")
    weight = group_graph.weight(source, target)
    rest = graph.node_count - len(gs)
    p = len(gt) / rest if rest > 0 else 1.0
    if trials == 0:
        return EdgeSignificance(source, target, weight, 0, p, 0.0, defined=False)
    score = binomial_score(trials, weight, p, exact_threshold).score
    return EdgeSignificance(source, target, weight, trials, p, score)


def group_graph_records(graph: Graph, group_graph: GroupGraph, **kw) -> list[dict]:
    """Both directed scores per connected pair, plus their max for display."""
    out = []
    for a, b in group_graph.pairs():
        st = edge_significance(graph, group_graph, a, b, **kw)
        ts = edge_significance(graph, group_graph, b, a, **kw)
        out.append({"source": a, "target": b, "weight": st.weight,
                    "score_st": st.score, "score_ts": ts.score,
                    "score_max": max(st.score, ts.score)})
    return out


def write_group_graph(fh: IO[str], records: list[dict]) -> None:
    for rec in records:
        fh.write(json.dumps(rec) + "\n")
