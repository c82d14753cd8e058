import io
import math
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commsig import Graph, Group, group_stats
from commsig.groupgraph import (build_group_graph, edge_significance, group_graph_records,
                                write_group_graph)
from commsig.synth import SyntheticSpec, generate


def _bridge():
    # two triangles joined by two edges, plus node 6 outside every group
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (5, 6)]
    g = Graph.from_edges(edges)
    return g, [Group("b", {3, 4, 5}), Group("a", {0, 1, 2})]


def test_weights_and_residual():
    g, parts = _bridge()
    gg = build_group_graph(g, parts)
    assert [x.id for x in gg.groups] == ["a", "b"]
    assert gg.weight("a", "b") == gg.weight("b", "a") == 2
    assert gg.self_weights == {"a": 3, "b": 3}
    assert gg.residual == 1
    assert gg.pairs() == [("a", "b")]


def test_overlap_rejected():
    g, _ = _bridge()
    with pytest.raises(ValueError, match="overlaps"):
        build_group_graph(g, [Group("a", {0, 1}), Group("b", {1, 2})])


def test_edge_significance_worked_value():
    # source has 2 outgoing edges, both to a 1-node target; n - |source| = 10
    edges = [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3)]
    g = Graph.from_edges(edges, n=13)
    parts = [Group("s", {0, 1, 2}), Group("t", {3})] + [Group(f"x{i}", {i}) for i in range(4, 13)]
    gg = build_group_graph(g, parts)
    e = edge_significance(g, gg, "s", "t")
    assert (e.weight, e.trials, e.p) == (2, 2, 0.1)
    assert e.score == pytest.approx(2.0)
    total = edge_significance(g, gg, "s", "t", trials_mode="total")
    assert total.trials == 5 and total.score < e.score


def test_all_outgoing_edges_to_one_of_nine_groups():
    # ten groups of three; all 10 outgoing edges of "s" land in "t", p = 3/27
    edges = [(0, 1), (1, 2), (0, 2)] + [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5),
                                        (2, 3), (2, 4), (2, 5), (2, 5)]
    g = Graph.from_edges(edges, n=30)
    parts = [Group("s", {0, 1, 2}), Group("t", {3, 4, 5})]
    parts += [Group(f"x{i}", {i, i + 1, i + 2}) for i in range(6, 30, 3)]
    e = edge_significance(g, build_group_graph(g, parts), "s", "t")
    assert (e.trials, e.weight, e.p) == (10, 10, pytest.approx(1 / 9))
    assert e.score == pytest.approx(10 * math.log10(9), abs=1e-9)
    assert e.score == pytest.approx(9.542425094393249, abs=1e-9)


def test_zero_weight_scores_zero():
    g = Graph.from_edges([(0, 1), (1, 2)], n=6)
    parts = [Group("a", {0, 1}), Group("b", {2}), Group("c", {3, 4})]
    e = edge_significance(g, build_group_graph(g, parts), "a", "c")
    assert e.weight == 0 and e.score == 0.0 and e.defined


def test_whole_graph_single_group(triangle):
    gg = build_group_graph(triangle, [Group("all", {0, 1, 2})])
    assert gg.weights == {} and gg.self_weights == {"all": 3}


def test_two_disconnected_triangles():
    g = Graph.from_edges([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    gg = build_group_graph(g, [Group("a", {0, 1, 2}), Group("b", {3, 4, 5})])
    assert gg.weights == {} and gg.self_weights == {"a": 3, "b": 3}


def test_directionality():
    g = Graph.from_edges([(0, 1), (1, 2), (0, 2), (0, 3), (3, 4)], n=30)
    parts = [Group("a", {0, 1, 2}), Group("b", {3})]
    gg = build_group_graph(g, parts)
    ab = edge_significance(g, gg, "a", "b")
    ba = edge_significance(g, gg, "b", "a")
    assert ab.score != ba.score
    recs = group_graph_records(g, gg)
    assert recs[0]["score_max"] == max(ab.score, ba.score)
    buf = io.StringIO()
    write_group_graph(buf, recs)
    assert json.loads(buf.getvalue())["weight"] == 1


def test_no_outgoing_edges_undefined():
    g = Graph.from_edges([(0, 1), (2, 3)])
    gg = build_group_graph(g, [Group("a", {0, 1}), Group("b", {2, 3})])
    e = edge_significance(g, gg, "a", "b")
    assert not e.defined and e.score == 0.0
    with pytest.raises(ValueError):
        edge_significance(g, gg, "a", "a")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([0.02, 0.1]))
def test_row_sums_equal_outgoing(seed, noise):
    g, groups = generate(SyntheticSpec((12, 9, 7, 5), (0.5,) * 4, noise, seed))
    gg = build_group_graph(g, groups)
    for grp in groups:
        row = sum(gg.weight(grp.id, other.id) for other in groups if other.id != grp.id)
        assert row == group_stats(g, grp).outgoing
        assert gg.self_weights[grp.id] == group_stats(g, grp).din
    w = np.array([[gg.weight(a.id, b.id) for b in groups] for a in groups])
    assert np.array_equal(w, w.T)
