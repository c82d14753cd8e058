"""Immutable undirected multigraph and group connectivity statistics."""
from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from ._backend import kernels

WEIGHT_MODES = ("unweighted", "integer-weights", "round-to-integer")


class GraphFormatError(ValueError):
    """Malformed edge-list or group input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Graph:
    """Undirected multigraph on dense node ids ``0..n-1``.

    Adjacency is stored in CSR form with sorted neighbor lists and positive
    integer multiplicities.  Self-loops live in a separate per-node array;
    a loop counts once in ``m`` and twice in its owner's degree.
    """

    def __init__(self, indptr, indices, weights, labels: Sequence[str], self_loops=None):
        n = len(labels)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.weights = np.ascontiguousarray(weights, dtype=np.int64)
        if self_loops is None:
            self_loops = np.zeros(n, dtype=np.int64)
        self.self_loops = np.ascontiguousarray(self_loops, dtype=np.int64)
        if self.indptr.shape != (n + 1,):
            raise ValueError("indptr length must be n + 1")
        if np.any(self.weights <= 0) or np.any(self.self_loops < 0):
            raise ValueError("multiplicities must be positive")
        for arr in (self.indptr, self.indices, self.weights, self.self_loops):
            arr.setflags(write=False)
        self.labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != n:
            raise ValueError("node labels must be unique")
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.indptr))
        deg = np.bincount(rows, weights=self.weights, minlength=n).astype(np.int64)
        deg += 2 * self.self_loops
        deg.setflags(write=False)
        self.degree = deg
        total = int(self.weights.sum())
        if total % 2:
            raise ValueError("adjacency is not symmetric")
        self.m = total // 2 + int(self.self_loops.sum())
        self._local = threading.local()

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], n: int | None = None,
                   labels: Sequence[str] | None = None, allow_self_loops: bool = False) -> "Graph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples of integer ids.

        Repeated pairs accumulate multiplicity.
        """
        us, vs, ws = [], [], []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = int(e[2]) if len(e) > 2 else 1
            if w < 0:
                raise ValueError(f"negative weight on edge ({u}, {v})")
            if w == 0:
                continue
            us.append(u)
            vs.append(v)
            ws.append(w)
        if n is None:
            n = max(max(us, default=-1), max(vs, default=-1)) + 1
        if labels is None:
            labels = [str(i) for i in range(n)]
        u = np.asarray(us, dtype=np.int64)
        v = np.asarray(vs, dtype=np.int64)
        w = np.asarray(ws, dtype=np.int64)
        if u.size and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("edge endpoint out of range")
        loop = u == v
        if loop.any() and not allow_self_loops:
            raise ValueError(f"self-loop on node {int(u[loop][0])}")
        self_loops = np.bincount(u[loop], weights=w[loop], minlength=n).astype(np.int64)
        u, v, w = u[~loop], v[~loop], w[~loop]
        return cls._from_arrays(u, v, w, labels, self_loops)

    @classmethod
    def _from_arrays(cls, u, v, w, labels, self_loops=None) -> "Graph":
        n = len(labels)
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        wt = np.concatenate([w, w])
        order = np.lexsort((dst, src))
        src, dst, wt = src[order], dst[order], wt[order]
        if src.size:
            key_change = np.ones(src.size, dtype=bool)
            key_change[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
            starts = np.flatnonzero(key_change)
            wt = np.add.reduceat(wt, starts)
            src, dst = src[starts], dst[starts]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(indptr, dst, wt, labels, self_loops)

    @property
    def node_count(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return self.node_count

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.m})"

    def index_of(self, label: str) -> int:
        return self._index[label]

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def multiplicity(self, u: int, v: int) -> int:
        if u == v:
            return int(self.self_loops[u])
        row = self.neighbors(u)
        k = np.searchsorted(row, v)
        if k < row.size and row[k] == v:
            return int(self.weights[self.indptr[u] + k])
        return 0

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield each undirected edge once as ``(u, v, multiplicity)``, u <= v."""
        for u in range(self.node_count):
            if self.self_loops[u]:
                yield u, u, int(self.self_loops[u])
            lo, hi = self.indptr[u], self.indptr[u + 1]
            for k in range(lo, hi):
                v = int(self.indices[k])
                if v > u:
                    yield u, v, int(self.weights[k])

    def scratch_mask(self) -> np.ndarray:
        """Per-thread zeroed membership mask used by the kernels."""
        mask = getattr(self._local, "mask", None)
        if mask is None:
            mask = np.zeros(self.node_count, dtype=np.uint8)
            self._local.mask = mask
        return mask

    def write_edge_list(self, fh: IO[str], weighted: bool = False) -> None:
        for u, v, w in self.edges():
            a, b = self.labels[u], self.labels[v]
            if weighted:
                fh.write(f"{a} {b} {w}\n")
            else:
                for _ in range(w):
                    fh.write(f"{a} {b}\n")


def _parse_weight(token: str, mode: str, lineno: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise GraphFormatError(f"bad weight {token!r}", lineno) from None
    if not math.isfinite(value):
        raise GraphFormatError(f"bad weight {token!r}", lineno)
    if value < 0:
        raise GraphFormatError(f"negative weight {token!r}", lineno)
    if mode == "integer-weights":
        if value != int(value):
            raise GraphFormatError(f"non-integer weight {token!r}", lineno)
        return int(value)
    return int(math.floor(value + 0.5))


def load_graph(stream: Iterable[str], weight_mode: str = "unweighted",
               allow_self_loops: bool = False) -> Graph:
    """Parse a whitespace-separated edge list (``u v`` or ``u v w``).

    Node labels are arbitrary tokens, numbered densely in order of first
    appearance.  ``#`` starts a comment line.  In ``unweighted`` mode every
    line counts as one edge and a weight column is ignored; in
    ``round-to-integer`` mode weights round half-up and edges rounding to
    zero are dropped.
    """
    if weight_mode not in WEIGHT_MODES:
        raise ValueError(f"unknown weight mode {weight_mode!r}")
    index: dict[str, int] = {}
    us, vs, ws = [], [], []
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"expected 2 or 3 fields, got {len(parts)}", lineno)
        a, b = parts[0], parts[1]
        w = 1
        if len(parts) == 3 and weight_mode != "unweighted":
            w = _parse_weight(parts[2], weight_mode, lineno)
        if a == b and not allow_self_loops:
            raise GraphFormatError(f"self-loop on {a!r}", lineno)
        u = index.setdefault(a, len(index))
        v = index.setdefault(b, len(index))
        if w == 0:
            continue
        us.append(u)
        vs.append(v)
        ws.append(w)
    labels = list(index)
    return Graph.from_edges(zip(us, vs, ws), n=len(labels), labels=labels,
                            allow_self_loops=allow_self_loops)


@dataclass(frozen=True)
class Group:
    """A labelled set of node ids."""

    id: str
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(x) for x in self.members))
        if not self.members:
            raise ValueError(f"group {self.id!r} is empty")

    def __len__(self) -> int:
        return len(self.members)

    @property
    def array(self) -> np.ndarray:
        return np.fromiter(sorted(self.members), dtype=np.int64, count=len(self.members))

    def validate(self, graph: Graph) -> None:
        n = graph.node_count
        for x in self.members:
            if x < 0 or x >= n:
                raise ValueError(f"group {self.id!r}: node id {x} out of range [0, {n})")


@dataclass(frozen=True)
class GroupStats:
    """Connectivity summary of one group.

    ``deg`` counts edges with at least one endpoint in the group, ``din``
    those with both; both count multiplicity.
    """

    size: int
    deg: int
    din: int
    n: int
    m: int

    @property
    def outgoing(self) -> int:
        return self.deg - self.din

    @property
    def p_node(self) -> float:
        return self.size / self.n

    @property
    def p_edge(self) -> float:
        return (self.deg + self.din) / (2 * self.m) if self.m else 0.0

    @property
    def q(self) -> float:
        return self.din / self.deg if self.deg else 0.0

    @property
    def intensity(self) -> float:
        """Observed over expected proportion, node null model."""
        return self.q / self.p_node

    @property
    def intensity_edge(self) -> float:
        return self.q / self.p_edge if self.p_edge else 0.0


def group_stats(graph: Graph, group: Group) -> GroupStats:
    group.validate(graph)
    members = group.array
    volume, internal2 = kernels.group_counts(graph.indptr, graph.indices, graph.weights,
                                             members, graph.scratch_mask())
    loops = int(graph.self_loops[members].sum())
    din = internal2 // 2 + loops
    deg = volume + 2 * loops - din
    return GroupStats(size=len(members), deg=deg, din=din, n=graph.node_count, m=graph.m)


# -- group files -----------------------------------------------------------

def _resolve(graph: Graph | None, label: str, lineno: int) -> int:
    if graph is None:
        try:
            return int(label)
        except ValueError:
            raise GraphFormatError(f"node label {label!r} is not an integer id", lineno) from None
    try:
        return graph.index_of(label)
    except KeyError:
        raise GraphFormatError(f"unknown node label {label!r}", lineno) from None


def read_groups(stream: Iterable[str], graph: Graph | None = None) -> list[Group]:
    """Read JSON Lines (``{"id": ..., "nodes": [...]}``) or TSV group files.

    The format is detected per line: a line starting with ``{`` is JSON,
    anything else is ``id<TAB>space-separated labels``.
    """
    groups = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("{"):
            try:
                obj = json.loads(line)
                gid, labels = str(obj["id"]), [str(x) for x in obj["nodes"]]
            except (ValueError, KeyError, TypeError) as exc:
                raise GraphFormatError(f"bad group record: {exc}", lineno) from None
        else:
            gid, sep, rest = raw.rstrip("\r\n").partition("\t")
            if not sep:
                raise GraphFormatError("expected 'id<TAB>nodes'", lineno)
            labels = rest.split()
        if not labels:
            raise GraphFormatError(f"group {gid!r} has no nodes", lineno)
        ids = [_resolve(graph, lab, lineno) for lab in labels]
        if len(set(ids)) != len(ids):
            raise GraphFormatError(f"group {gid!r} lists a node twice", lineno)
        groups.append(Group(gid, frozenset(ids)))
    return groups


def write_groups(fh: IO[str], groups: Iterable[Group], graph: Graph | None = None,
                 fmt: str = "jsonl") -> None:
    for g in groups:
        ids = sorted(g.members)
        labels = [graph.labels[i] for i in ids] if graph is not None else [str(i) for i in ids]
        if fmt == "jsonl":
            fh.write(json.dumps({"id": g.id, "nodes": labels}) + "\n")
        elif fmt == "tsv":
            fh.write(f"{g.id}\t{' '.join(labels)}\n")
        else:
            raise ValueError(f"unknown group format {fmt!r}")
