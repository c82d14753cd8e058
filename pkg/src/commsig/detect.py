"""Louvain community detection on edge- or node-based modularity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import _backend
from .graph import Graph, Group

OBJECTIVES = ("edge_modularity", "node_modularity")


def _check_objective(objective: str) -> None:
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")


@dataclass
class Partition:
    """Community assignment of original nodes after each Louvain pass.

    ``levels[0]`` is the finest (first pass), ``levels[-1]`` the final one.
    """

    levels: list
    objective: str = "edge_modularity"
    seed: int | None = None

    @property
    def assignment(self) -> np.ndarray:
        return self.levels[-1]

    def __len__(self) -> int:
        return len(self.levels)


def _assignment_stats(graph: Graph, assignment: np.ndarray):
    assignment = np.asarray(assignment, dtype=np.int64)
    if assignment.shape != (graph.node_count,) or (assignment.size and assignment.min() < 0):
        raise ValueError("assignment must map every node to a nonnegative community id")
    k = int(assignment.max()) + 1 if assignment.size else 0
    rows = np.repeat(np.arange(graph.node_count), np.diff(graph.indptr))
    same = assignment[rows] == assignment[graph.indices]
    internal = np.bincount(assignment[rows[same]], weights=graph.weights[same], minlength=k) / 2.0
    internal += np.bincount(assignment, weights=graph.self_loops, minlength=k)
    volume = np.bincount(assignment, weights=graph.degree, minlength=k)
    size = np.bincount(assignment, minlength=k).astype(float)
    return internal, volume, size


def modularity_total(graph: Graph, partition, objective: str = "edge_modularity") -> float:
    """Modularity of an exhaustive, exclusive partition.

    ``partition`` may be an assignment array, a :class:`Partition` (its final
    level) or a list of groups covering every node exactly once.  The node
    objective is ``(1/m) * sum(din - deg * |g| / n)``.
    """
    _check_objective(objective)
    if graph.m == 0:
        raise ValueError("modularity needs a graph with edges")
    if isinstance(partition, Partition):
        assignment = partition.assignment
    elif isinstance(partition, (list, tuple)) and partition and isinstance(partition[0], Group):
        assignment = groups_to_assignment(graph, partition)
    else:
        assignment = partition
    din, vol, size = _assignment_stats(graph, assignment)
    m = graph.m
    if objective == "edge_modularity":
        return float(np.sum(din / m - (vol / (2.0 * m)) ** 2))
    deg = vol - din
    return float(np.sum(din - deg * size / graph.node_count) / m)


def groups_to_assignment(graph: Graph, groups: list[Group]) -> np.ndarray:
    assignment = np.full(graph.node_count, -1, dtype=np.int64)
    for k, g in enumerate(groups):
        g.validate(graph)
        idx = g.array
        if np.any(assignment[idx] >= 0):
            raise ValueError("groups overlap")
        assignment[idx] = k
    if np.any(assignment < 0):
        raise ValueError("groups do not cover every node")
    return assignment


def _aggregate(indptr, indices, weights, self_w, vol, size, comm, k):
    n = vol.shape[0]
    rows = np.repeat(np.arange(n), np.diff(indptr))
    cr, cc = comm[rows], comm[indices]
    diag = cr == cc
    new_self = (np.bincount(cr[diag], weights=weights[diag], minlength=k) / 2.0
                + np.bincount(comm, weights=self_w, minlength=k))
    mat = sp.csr_matrix((weights[~diag], (cr[~diag], cc[~diag])), shape=(k, k))
    mat.sum_duplicates()
    mat.sort_indices()
    return (mat.indptr.astype(np.int64), mat.indices.astype(np.int64),
            mat.data.astype(np.float64), new_self,
            np.bincount(comm, weights=vol, minlength=k),
            np.bincount(comm, weights=size, minlength=k))


def louvain(graph: Graph, objective: str = "edge_modularity", seed: int | None = 0,
            tol: float = 1e-12, kernels=None) -> Partition:
    """Two-phase Louvain: greedy local moves, then community aggregation.

    Nodes are visited in a seeded random order each level; a node moves
    only for a gain above ``tol`` (ties keep it in place).  Stops when a
    pass no longer reduces the number of communities.
    """
    _check_objective(objective)
    if graph.m == 0:
        raise ValueError("louvain needs a graph with edges")
    kern = kernels or _backend.kernels
    rng = np.random.default_rng(seed)
    node_objective = objective == "node_modularity"
    n = graph.node_count
    indptr, indices = graph.indptr, graph.indices
    weights = graph.weights.astype(np.float64)
    self_w = graph.self_loops.astype(np.float64)
    vol = graph.degree.astype(np.float64)
    size = np.ones(n)
    node_comm = np.arange(n, dtype=np.int64)
    levels = []
    while True:
        N = vol.shape[0]
        comm = np.arange(N, dtype=np.int64)
        order = rng.permutation(N).astype(np.int64)
        kern.local_moves(indptr, indices, weights, self_w, vol, size, comm, order,
                         node_objective, float(graph.m), float(n), tol)
        _, comm = np.unique(comm, return_inverse=True)
        comm = comm.astype(np.int64)
        k = int(comm.max()) + 1
        if k == N and levels:
            break
        node_comm = comm[node_comm]
        levels.append(node_comm.copy())
        if k == N:
            break
        indptr, indices, weights, self_w, vol, size = _aggregate(
            indptr, indices, weights, self_w, vol, size, comm, k)
    return Partition(levels, objective, seed)


def extract_level(partition: Partition, level: int = -1,
                  size_range: tuple[int, int | None] | None = (3, None)) -> list[Group]:
    """Groups of one Louvain level, optionally restricted to a size range."""
    if not -len(partition.levels) <= level < len(partition.levels):
        raise IndexError(f"level {level} out of range for {len(partition.levels)} levels")
    assignment = partition.levels[level]
    lo, hi = size_range if size_range is not None else (None, None)
    order = np.argsort(assignment, kind="stable")
    bounds = np.flatnonzero(np.diff(assignment[order])) + 1
    groups = []
    for k, members in enumerate(np.split(order, bounds)):
        s = members.size
        if s == 0 or (lo is not None and s < lo) or (hi is not None and s > hi):
            continue
        groups.append(Group(str(int(assignment[members[0]])), frozenset(members.tolist())))
    return groups
