import pytest

from commsig import Graph, Group
from commsig._backend import available_backends


@pytest.fixture
def clique_and_path():
    """K4 (group g1) and a 4-node path (group g2), no edges between: n=8, m=9."""
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 5), (5, 6), (6, 7)]
    graph = Graph.from_edges(edges, n=8)
    return graph, Group("g1", frozenset({0, 1, 2, 3})), Group("g2", frozenset({4, 5, 6, 7}))


@pytest.fixture
def triangle():
    return Graph.from_edges([(0, 1), (1, 2), (2, 0)])


@pytest.fixture(params=sorted(available_backends()))
def kernels(request):
    return available_backends()[request.param]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
