"""Comparison scores: group-wise modularity, conductance, TPR, size."""
from __future__ import annotations

from dataclasses import dataclass

from ._backend import kernels
from .graph import Graph, Group, GroupStats, group_stats


@dataclass(frozen=True)
class BaselineVector:
    modularity_q: float
    conductance: float
    tpr: float
    size: int


def modularity_groupwise(graph: Graph, group: Group, stats: GroupStats | None = None) -> float:
    """This group's term of Newman modularity, ``din/m - p_edge**2``."""
    st = stats or group_stats(graph, group)
    if st.m == 0:
        raise ValueError("modularity needs a graph with edges")
    return st.din / st.m - st.p_edge ** 2


def conductance(graph: Graph, group: Group, stats: GroupStats | None = None) -> float:
    """Cut edges over the smaller of the two volumes (lower is better).

    Volumes are ``deg + din`` for the group and ``2m - (deg + din)`` for the
    rest.  A group without edges gets 1.0; a group holding every edge gets
    0.0 (nothing is cut).
    """
    st = stats or group_stats(graph, group)
    vol_in = st.deg + st.din
    vol_out = 2 * st.m - vol_in
    if vol_in == 0 and vol_out == 0:
        raise ValueError("conductance undefined on a graph without edges")
    denom = min(vol_in, vol_out)
    if denom == 0:
        return 1.0 if vol_in == 0 else 0.0
    return (st.deg - st.din) / denom


def tpr(graph: Graph, group: Group) -> float:
    """Fraction of members on a triangle lying wholly inside the group."""
    group.validate(graph)
    members = group.array
    hit = kernels.triangle_members(graph.indptr, graph.indices, members, graph.scratch_mask())
    return hit / len(members)


def size_score(group: Group) -> int:
    return len(group)


def baseline_vector(graph: Graph, group: Group, stats: GroupStats | None = None) -> BaselineVector:
    st = stats or group_stats(graph, group)
    return BaselineVector(
        modularity_q=modularity_groupwise(graph, group, st),
        conductance=conductance(graph, group, st),
        tpr=tpr(graph, group),
        size=st.size,
    )
