import io
import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commsig import Graph, Group, group_stats, load_graph, read_groups, write_groups
from commsig.graph import GraphFormatError


def _load(text, **kw):
    return load_graph(io.StringIO(text), **kw)


def test_load_triangle():
    g = _load("0 1\n1 2\n2 0\n")
    assert (g.node_count, g.m) == (3, 3)


def test_duplicate_lines_accumulate():
    g = _load("0 1\n0 1\n")
    assert g.multiplicity(0, 1) == 2 == g.multiplicity(1, 0)
    assert g.m == 2


def test_round_half_up():
    g = _load("0 1 2.6\n", weight_mode="round-to-integer")
    assert g.multiplicity(0, 1) == 3 and g.m == 3
    g = _load("0 1 2.5\n1 2 0.4\n", weight_mode="round-to-integer")
    assert g.multiplicity(0, 1) == 3
    assert g.multiplicity(1, 2) == 0 and g.m == 3


def test_integer_weights_mode():
    g = _load("a b 4\nb c 1\n", weight_mode="integer-weights")
    assert g.multiplicity(g.index_of("a"), g.index_of("b")) == 4
    with pytest.raises(GraphFormatError, match="line 1"):
        _load("a b 1.5\n", weight_mode="integer-weights")


def test_unweighted_ignores_weight_column():
    assert _load("0 1 7\n").m == 1


def test_labels_and_comments():
    g = _load("# header\nalice bob\n\nbob carol\n")
    assert g.labels == ("alice", "bob", "carol")
    assert g.degree.tolist() == [1, 2, 1]


@pytest.mark.parametrize("text, line", [("0 1\n0\n", 2), ("0 1 2 3\n", 1), ("0 1\n2 3 x\n", 2)])
def test_malformed_lines_report_line_number(text, line):
    with pytest.raises(GraphFormatError) as exc:
        _load(text, weight_mode="integer-weights")
    assert exc.value.line == line


def test_negative_weight_rejected():
    with pytest.raises(GraphFormatError, match="negative"):
        _load("0 1 -2\n", weight_mode="round-to-integer")


def test_self_loops_rejected_by_default_and_counted_when_allowed():
    with pytest.raises(GraphFormatError, match="self-loop"):
        _load("0 0\n")
    g = _load("0 0\n0 1\n", allow_self_loops=True)
    assert g.m == 2
    assert g.degree.tolist() == [3, 1]
    st_ = group_stats(g, Group("a", {0}))
    assert (st_.din, st_.deg) == (1, 2)


def test_clique_and_path_stats(clique_and_path):
    g, g1, g2 = clique_and_path
    s1, s2 = group_stats(g, g1), group_stats(g, g2)
    assert (s1.size, s1.deg, s1.din) == (4, 6, 6)
    assert s1.p_node == 0.5 and s1.p_edge == pytest.approx(2 / 3)
    assert (s2.deg, s2.din, s2.p_node) == (3, 3, 0.5)
    assert s2.p_edge == pytest.approx(1 / 3)


def test_whole_graph_group(triangle):
    s = group_stats(triangle, Group("all", {0, 1, 2}))
    assert (s.deg, s.din, s.q, s.p_node) == (3, 3, 1.0, 1.0)


def test_out_of_range_member(triangle):
    with pytest.raises(ValueError, match="out of range"):
        group_stats(triangle, Group("x", {0, 5}))


def test_empty_group_forbidden():
    with pytest.raises(ValueError):
        Group("e", frozenset())


def test_isolated_trailing_nodes():
    g = Graph.from_edges([(0, 1)], n=5)
    assert g.degree.tolist() == [1, 1, 0, 0, 0]
    assert group_stats(g, Group("iso", {3, 4})).deg == 0


@st.composite
def multigraphs(draw):
    n = draw(st.integers(2, 12))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1])
    edges = draw(st.lists(pairs.map(lambda e: (*e, 1)), max_size=40))
    members = draw(st.sets(st.integers(0, n - 1), min_size=1))
    return n, edges, members


@settings(max_examples=200, deadline=None)
@given(multigraphs())
def test_stats_match_brute_force(case):
    n, edges, members = case
    g = Graph.from_edges(edges, n=n)
    s = group_stats(g, Group("g", members))
    deg = sum(1 for u, v, _ in edges if u in members or v in members)
    din = sum(1 for u, v, _ in edges if u in members and v in members)
    assert (s.deg, s.din) == (deg, din)
    # volume identity: 2 din + outgoing = sum of member degrees
    assert 2 * s.din + s.outgoing == int(g.degree[list(members)].sum())
    assert s.p_edge * 2 * g.m == pytest.approx(s.deg + s.din)
    assert 0 <= s.din <= s.deg and s.p_edge <= 1


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10), st.data())
def test_adjacency_symmetric(n, data):
    edges = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                                         st.integers(1, 4)).filter(lambda e: e[0] != e[1])))
    g = Graph.from_edges(edges, n=n)
    for u, v in itertools.product(range(n), repeat=2):
        assert g.multiplicity(u, v) == g.multiplicity(v, u)
    assert np.all(g.weights > 0)
    assert g.m * 2 == int(g.degree.sum())
    full = group_stats(g, Group("all", range(n)))
    assert full.din == full.deg == g.m


def test_group_files_roundtrip(clique_and_path):
    g, g1, g2 = clique_and_path
    for fmt in ("jsonl", "tsv"):
        buf = io.StringIO()
        write_groups(buf, [g1, g2], g, fmt)
        buf.seek(0)
        assert read_groups(buf, g) == [g1, g2]


def test_group_file_errors(clique_and_path):
    g = clique_and_path[0]
    with pytest.raises(GraphFormatError, match="unknown node label"):
        read_groups(io.StringIO(json.dumps({"id": "a", "nodes": ["99"]}) + "\n"), g)
    with pytest.raises(GraphFormatError, match="twice"):
        read_groups(io.StringIO("a\t1 1\n"), g)
