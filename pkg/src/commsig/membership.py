"""Per-node binomial membership scores and group scores built from them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binomial import EXACT_THRESHOLD, binomial_score, node_probability, score_node_based
from .graph import Graph, Group


@dataclass(frozen=True)
class MembershipScore:
    node: int
    deg_node: int
    din_node: int
    p: float
    score: float


def _node_counts(graph: Graph, node: int, mask: np.ndarray) -> tuple[int, int]:
    lo, hi = graph.indptr[node], graph.indptr[node + 1]
    w = graph.weights[lo:hi]
    inside = mask[graph.indices[lo:hi]].astype(bool)
    return int(w.sum()), int(w[inside].sum())


def membership_scores(graph: Graph, group: Group, exact_threshold: int | None = EXACT_THRESHOLD,
                      self_excluded: bool = True) -> list[MembershipScore]:
    """Membership score of every member, in ascending node id order.

    Trials are the node's edges (self-loops ignored), successes its edges to
    other members, and ``p`` the chance a random other node is a member.
    """
    group.validate(graph)
    members = group.array
    p = node_probability(len(members), graph.node_count, self_excluded)
    mask = graph.scratch_mask()
    mask[members] = 1
    try:
        out = []
        for u in members.tolist():
            deg, din = _node_counts(graph, u, mask)
            s = binomial_score(deg, din, p, exact_threshold).score
            out.append(MembershipScore(u, deg, din, p, s))
        return out
    finally:
        mask[members] = 0


def membership_score(graph: Graph, group: Group, node: int,
                     exact_threshold: int | None = EXACT_THRESHOLD,
                     self_excluded: bool = True) -> MembershipScore:
    if node not in group.members:
        raise ValueError(f"node {node} is not a member of group {group.id!r}")
    group.validate(graph)
    members = group.array
    p = node_probability(len(members), graph.node_count, self_excluded)
    mask = graph.scratch_mask()
    mask[members] = 1
    try:
        deg, din = _node_counts(graph, node, mask)
    finally:
        mask[members] = 0
    return MembershipScore(node, deg, din, p, binomial_score(deg, din, p, exact_threshold).score)


def aggregate(scores, aggregator: str = "median", quantile: float | None = None) -> float:
    values = np.asarray(scores, dtype=float)
    if values.size == 0:
        raise ValueError("nothing to aggregate")
    if aggregator == "median":
        return float(np.quantile(values, 0.5))
    if aggregator == "mean":
        return float(values.mean())
    if aggregator == "quantile":
        if quantile is None or not 0.0 <= quantile <= 1.0:
            raise ValueError("quantile aggregator needs a level in [0, 1]")
        return float(np.quantile(values, quantile))
    raise ValueError(f"unknown aggregator {aggregator!r}")


def group_score_median_membership(graph: Graph, group: Group, aggregator: str = "median",
                                  quantile: float | None = None, **kw) -> float:
    return aggregate([s.score for s in membership_scores(graph, group, **kw)], aggregator, quantile)


@dataclass
class ResolutionReport:
    graph: Graph
    groups: dict
    group_binomial: dict
    median_membership: dict

    @property
    def union_wins_group_binomial(self) -> bool:
        gb = self.group_binomial
        return gb["union"] > gb["g1"] and gb["union"] > gb["g2"]

    @property
    def parts_win_median_membership(self) -> bool:
        mm = self.median_membership
        return mm["g1"] > mm["union"] and mm["g2"] > mm["union"]


def dumbbell_graph(clique_size: int, bridge_edges: int, ambient_nodes: int) -> tuple[Graph, Group, Group]:
    """Two cliques joined by ``bridge_edges`` disjoint edges plus isolated nodes.

    Bridge ``i`` joins node ``i`` of the first clique to node ``i`` of the
    second, so at most ``clique_size`` bridges fit.
    """
    if clique_size < 2 or not 0 <= bridge_edges <= clique_size or ambient_nodes < 0:
        raise ValueError("invalid dumbbell parameters")
    k = clique_size
    edges = []
    for base in (0, k):
        edges += [(base + i, base + j) for i in range(k) for j in range(i + 1, k)]
    edges += [(i, k + i) for i in range(bridge_edges)]
    graph = Graph.from_edges(edges, n=2 * k + ambient_nodes)
    return graph, Group("g1", frozenset(range(k))), Group("g2", frozenset(range(k, 2 * k)))


def resolution_demo(clique_size: int = 6, bridge_edges: int = 1, ambient_nodes: int = 10_000,
                    exact_threshold: int | None = EXACT_THRESHOLD) -> ResolutionReport:
    """Compare group-level and median-membership scores of a dumbbell and its halves."""
    graph, g1, g2 = dumbbell_graph(clique_size, bridge_edges, ambient_nodes)
    union = Group("union", g1.members | g2.members)
    groups = {"g1": g1, "g2": g2, "union": union}
    return ResolutionReport(
        graph=graph,
        groups=groups,
        group_binomial={k: score_node_based(graph, g, exact_threshold).score for k, g in groups.items()},
        median_membership={k: group_score_median_membership(graph, g, exact_threshold=exact_threshold)
                           for k, g in groups.items()},
    )
