"""All scores of one group in a single record."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from . import baselines
from .binomial import (EXACT_THRESHOLD, pvalue_bound_he, score_edge_based, score_global,
                       score_node_based, significance_label)
from .graph import Graph, Group, group_stats

MODELS = ("node", "edge", "global", "pvalue", "max", "lower")
RANKABLE = MODELS + ("conductance", "modularity", "tpr", "size")

COLUMNS = ("id", "size", "deg", "din", "p_node", "p_edge", "q", "intensity", "model", "score",
           "label", "lower", "upper", "used_exact", "rel_error", "node", "edge", "global",
           "pvalue", "modularity", "conductance", "tpr")


@dataclass(frozen=True)
class ScoreVector:
    id: str
    size: int
    deg: int
    din: int
    p_node: float
    p_edge: float
    q: float
    intensity: float
    model: str
    score: float
    label: str
    lower: float
    upper: float
    used_exact: bool
    rel_error: float | None
    node: float
    edge: float
    global_: float
    pvalue: float
    modularity: float
    conductance: float
    tpr: float

    def as_row(self) -> dict:
        row = asdict(self)
        row["global"] = row.pop("global_")
        return {k: row[k] for k in COLUMNS}

    def value(self, key: str) -> float:
        """Score used when ranking by ``key`` (higher is better except conductance)."""
        return {"node": self.node, "edge": self.edge, "global": self.global_,
                "pvalue": self.pvalue, "max": max(self.node, self.edge), "lower": self.lower_score,
                "conductance": self.conductance, "modularity": self.modularity,
                "tpr": self.tpr, "size": float(self.size)}[key]

    @property
    def lower_score(self) -> float:
        return self.node if self.used_exact else self.lower


def score_vector(graph: Graph, group: Group, model: str = "node",
                 exact_threshold: int | None = EXACT_THRESHOLD) -> ScoreVector:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    st = group_stats(graph, group)
    node = score_node_based(graph, group, exact_threshold, stats=st)
    edge = score_edge_based(graph, group, exact_threshold, stats=st) if graph.m else None
    glob = score_global(graph, group, exact_threshold, stats=st)
    pval = pvalue_bound_he(st.deg, st.din, st.m) if graph.m else 0.0
    edge_score = edge.score if edge else 0.0
    chosen = {"node": node.score, "edge": edge_score, "global": glob.score,
              "pvalue": max(pval, 0.0), "max": max(node.score, edge_score),
              "lower": node.score if node.used_exact else node.lower}[model]
    bounds = edge if model == "edge" and edge else node
    return ScoreVector(
        id=group.id, size=st.size, deg=st.deg, din=st.din, p_node=st.p_node, p_edge=st.p_edge,
        q=st.q, intensity=st.intensity, model=model, score=chosen,
        label=significance_label(chosen), lower=bounds.lower, upper=bounds.upper,
        used_exact=bounds.used_exact, rel_error=bounds.rel_error_bound,
        node=node.score, edge=edge_score, global_=glob.score, pvalue=pval,
        modularity=baselines.modularity_groupwise(graph, group, st) if graph.m else 0.0,
        conductance=baselines.conductance(graph, group, st) if graph.m else 0.0,
        tpr=baselines.tpr(graph, group),
    )
