"""Statistical significance scoring and ranking of graph communities."""
from ._backend import BACKEND
from .baselines import conductance, modularity_groupwise, size_score, tpr
from .binomial import (BinomialScore, approx_scores, binomial_score, binomial_tail_exact,
                       kl_divergence, pvalue_bound_he, score_edge_based, score_global,
                       score_node_based, significance_label)
from .detect import Partition, extract_level, louvain, modularity_total
from .evaluate import overlap_scores, rank_metrics, run_experiment, spearman
from .graph import Graph, Group, GroupStats, group_stats, load_graph, read_groups, write_groups
from .synth import SyntheticSpec, generate, preset

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BinomialScore", "Graph", "Group", "GroupStats", "Partition", "SyntheticSpec",
    "approx_scores", "binomial_score", "binomial_tail_exact", "conductance", "extract_level",
    "generate", "group_stats", "kl_divergence", "load_graph", "louvain", "modularity_groupwise",
    "modularity_total", "overlap_scores", "preset", "pvalue_bound_he", "rank_metrics",
    "read_groups", "run_experiment", "score_edge_based", "score_global", "score_node_based",
    "significance_label", "size_score", "spearman", "tpr", "write_groups",
]
