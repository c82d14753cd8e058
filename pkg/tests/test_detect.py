import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commsig import Graph, Group
from commsig._backend import available_backends
from commsig.detect import (OBJECTIVES, Partition, extract_level, groups_to_assignment, louvain,
                            modularity_total)
from commsig.synth import generate, preset

TWO_K3 = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]


@pytest.mark.parametrize("objective", OBJECTIVES)
def test_two_triangles(objective):
    g = Graph.from_edges(TWO_K3)
    part = louvain(g, objective, seed=3)
    groups = extract_level(part)
    assert sorted(sorted(x.members) for x in groups) == [[0, 1, 2], [3, 4, 5]]
    if objective == "edge_modularity":
        assert modularity_total(g, part) == pytest.approx(0.5)


def test_single_edge():
    part = louvain(Graph.from_edges([(0, 1)]), seed=0)
    assert part.assignment.tolist() == [0, 0]
    assert extract_level(part, size_range=(1, None))[0].members == {0, 1}
    assert extract_level(part) == []


def test_no_edges_rejected():
    with pytest.raises(ValueError):
        louvain(Graph.from_edges([], n=3))
    with pytest.raises(ValueError):
        louvain(Graph.from_edges(TWO_K3), "resolution")


def test_extract_level_range_and_errors():
    g, _ = generate(preset("syn3", 0.02, seed=2))
    part = louvain(g, seed=1)
    mid = extract_level(part, size_range=(50, 500))
    assert mid and all(50 <= len(x) <= 500 for x in mid)
    everything = extract_level(part, size_range=None)
    assert sum(len(x) for x in everything) == g.node_count
    with pytest.raises(IndexError):
        extract_level(part, len(part.levels))
    extract_level(part, -len(part.levels))


def test_levels_coarsen_and_objective_nondecreasing():
    for objective in OBJECTIVES:
        g, _ = generate(preset("syn1", 0.1, seed=11))
        part = louvain(g, objective, seed=5)
        counts = [len(np.unique(lv)) for lv in part.levels]
        assert all(b < a for a, b in zip(counts, counts[1:]))
        q = [modularity_total(g, lv, objective) for lv in part.levels]
        assert all(b >= a - 1e-12 for a, b in zip(q, q[1:]))
        assert q[0] > modularity_total(g, np.arange(g.node_count), objective)


def test_deterministic_given_seed():
    g, _ = generate(preset("syn2", 0.1, seed=1))
    a, b = louvain(g, seed=42), louvain(g, seed=42)
    assert all(np.array_equal(x, y) for x, y in zip(a.levels, b.levels))


def test_backends_give_identical_partitions():
    backends = available_backends()
    if len(backends) < 2:
        pytest.skip("compiled backend not built")
    g, _ = generate(preset("syn1", 0.075, seed=8))
    for objective in OBJECTIVES:
        runs = [louvain(g, objective, seed=3, kernels=k) for k in backends.values()]
        assert len(runs[0].levels) == len(runs[1].levels)
        assert all(np.array_equal(x, y) for x, y in zip(runs[0].levels, runs[1].levels))


def test_planted_partition_recovered_at_low_noise():
    g, refs = generate(preset("syn2", 0.01, seed=3))
    found = extract_level(louvain(g, seed=0))
    assert sorted(sorted(x.members) for x in found) == sorted(sorted(r.members) for r in refs)


def test_node_modularity_single_group_is_zero():
    g, _ = generate(preset("syn1", 0.1, seed=0))
    assert modularity_total(g, np.zeros(g.node_count, dtype=int), "node_modularity") == 0.0


def test_node_modularity_extremes():
    # bipartite graph grouped by its two sides reaches the lower end exactly
    k = 40
    bip = [(a, k + b) for a in range(k) for b in range(k)]
    sides = np.repeat([0, 1], k)
    assert modularity_total(Graph.from_edges(bip), sides, "node_modularity") == -1.0
    qn = modularity_total(Graph.from_edges(bip + [(0, 1)]), sides, "node_modularity")
    assert -1 < qn < -0.95
    # many disjoint cliques, one group each: Qn approaches 1
    cliques = [(10 * c + a, 10 * c + b) for c in range(50) for a, b in itertools.combinations(range(10), 2)]
    g = Graph.from_edges(cliques)
    qn = modularity_total(g, np.repeat(np.arange(50), 10), "node_modularity")
    assert 0.97 < qn < 1


def test_modularity_total_inputs():
    g = Graph.from_edges(TWO_K3)
    groups = [Group("a", {0, 1, 2}), Group("b", {3, 4, 5})]
    assert groups_to_assignment(g, groups).tolist() == [0, 0, 0, 1, 1, 1]
    assert modularity_total(g, groups) == modularity_total(g, Partition([np.array([0, 0, 0, 1, 1, 1])]))
    with pytest.raises(ValueError, match="cover"):
        groups_to_assignment(g, groups[:1])
    with pytest.raises(ValueError, match="overlap"):
        groups_to_assignment(g, [groups[0], Group("c", {2, 3, 4, 5})])
    with pytest.raises(ValueError):
        modularity_total(g, np.array([0, 0, 0, 1, 1]))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 60), st.integers(1, 200), st.integers(1, 60), st.integers(0, 2 ** 32 - 1))
def test_node_modularity_range(n, m, k, seed):
    rng = np.random.default_rng(seed)
    u, v = rng.integers(0, n, m), rng.integers(0, n, m)
    keep = u != v
    if not keep.any():
        return
    g = Graph.from_edges(zip(u[keep].tolist(), v[keep].tolist()), n=n)
    qn = modularity_total(g, rng.integers(0, k, n), "node_modularity")
    assert -1.0 <= qn <= 1.0
