"""Ranking evaluation against reference groups.

Each candidate group gets an overlap score (geometric mean of precision and
recall against its best-matching reference group).  A scoring method is
judged by the Spearman correlation between its scores and the overlap
scores, and by the overlap of its top-ranked group(s).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import baselines, binomial
from .detect import extract_level, louvain
from .graph import Graph, Group, GroupStats, group_stats
from .synth import SyntheticSpec, generate

CSV_COLUMNS = ("noise", "method", "spr_mean", "spr_std", "topPR_mean", "topPR_std",
               "top5PR_mean", "avgPR", "groups_mean", "noranking_rate", "spr_n")


@dataclass(frozen=True)
class OverlapScore:
    candidate: str
    best_reference: str
    recall: float
    precision: float
    score: float


def filter_groups(groups: Sequence[Group], min_size: int | None = 3,
                  max_size: int | None = None) -> list[Group]:
    return [g for g in groups
            if (min_size is None or len(g) >= min_size) and (max_size is None or len(g) <= max_size)]


def overlap_scores(candidates: Sequence[Group], references: Sequence[Group]) -> list[OverlapScore]:
    """Best ``sqrt(recall * precision)`` of each candidate over all references.

    Matching is not exclusive: one reference may be the best match of
    several candidates.  Ties go to the earliest reference.
    """
    if not references:
        raise ValueError("no reference groups")
    out = []
    for c in candidates:
        best = None
        for r in references:
            inter = len(c.members & r.members)
            recall = inter / len(r)
            precision = inter / len(c)
            score = math.sqrt(recall * precision)
            if best is None or score > best.score:
                best = OverlapScore(c.id, r.id, recall, precision, score)
        out.append(best)
    return out


def average_ranks(values) -> np.ndarray:
    """1-based ranks, ties sharing the mean of the positions they span."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ranks = np.empty(x.size)
    start = 0
    for end in range(1, x.size + 1):
        if end == x.size or xs[end] != xs[start]:
            ranks[order[start:end]] = 0.5 * (start + end - 1) + 1.0
            start = end
    return ranks


def spearman(reference_scores, method_scores) -> float:
    """Spearman correlation with tie-averaged ranks; NaN if either side is constant."""
    a = np.asarray(reference_scores, dtype=float)
    b = np.asarray(method_scores, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("score lists must be one-dimensional and of equal length")
    if a.size < 2:
        raise ValueError("need at least two scores")
    if np.all(a == a[0]) or np.all(b == b[0]):
        return math.nan
    ra = average_ranks(a) - (a.size + 1) / 2.0
    rb = average_ranks(b) - (b.size + 1) / 2.0
    r = float(np.dot(ra, rb) / math.sqrt(np.dot(ra, ra) * np.dot(rb, rb)))
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class RankMetrics:
    top_pr: float
    top5_pr: float
    top_size: float | None = None


def rank_metrics(overlaps, method_scores, direction: str = "desc", sizes=None,
                 k: int = 5) -> RankMetrics:
    """Overlap of the top-ranked candidate and mean overlap of the top ``k``.

    Candidates tied at the top share the mean of their overlaps.  For top-k,
    a tie block straddling the cut contributes its mean overlap for each of
    the remaining slots.  Fewer than ``k`` candidates: all are used.
    """
    ov = np.asarray([o.score if isinstance(o, OverlapScore) else o for o in overlaps], dtype=float)
    s = np.asarray(method_scores, dtype=float)
    if ov.size == 0 or ov.shape != s.shape:
        raise ValueError("overlaps and scores must be non-empty and aligned")
    if direction == "asc":
        s = -s
    elif direction != "desc":
        raise ValueError(f"direction must be 'asc' or 'desc', got {direction!r}")
    levels = np.unique(s)[::-1]
    top = s == levels[0]
    top_size = float(np.mean(np.asarray(sizes, dtype=float)[top])) if sizes is not None else None
    slots = min(k, ov.size)
    total, filled = 0.0, 0
    for lv in levels:
        block = ov[s == lv]
        take = min(block.size, slots - filled)
        total += take * block.mean()
        filled += take
        if filled == slots:
            break
    return RankMetrics(float(ov[top].mean()), total / slots, top_size)


# -- scoring methods ---------------------------------------------------------

ScoreFn = Callable[[Graph, Group, GroupStats], float]


def _node(g, grp, st):
    return binomial.score_node_based(g, grp, stats=st).score


def _node_exact(g, grp, st):
    return binomial.score_node_based(g, grp, exact_threshold=None, stats=st,
                                     insignificant="exact").score


def _lower(g, grp, st):
    return binomial.score_node_based(g, grp, stats=st, use_lower=True).score


def _edge(g, grp, st):
    return binomial.score_edge_based(g, grp, stats=st).score


def _max(g, grp, st):
    return max(_node(g, grp, st), _edge(g, grp, st))


def _global(g, grp, st):
    return binomial.score_global(g, grp, stats=st).score


def _pvalue(g, grp, st):
    return binomial.pvalue_bound_he(st.deg, st.din, st.m, clamp=True)


def _pvalue_raw(g, grp, st):
    return binomial.pvalue_bound_he(st.deg, st.din, st.m)


METHODS: dict[str, tuple[ScoreFn, str]] = {
    "binomial": (_node, "desc"),
    "binomial_exact": (_node_exact, "desc"),
    "lower": (_lower, "desc"),
    "edge": (_edge, "desc"),
    "max": (_max, "desc"),
    "global": (_global, "desc"),
    "pvalue": (_pvalue, "desc"),
    "pvalue_raw": (_pvalue_raw, "desc"),
    "conductance": (lambda g, grp, st: baselines.conductance(g, grp, st), "asc"),
    "modularity": (lambda g, grp, st: baselines.modularity_groupwise(g, grp, st), "desc"),
    "tpr": (lambda g, grp, st: baselines.tpr(g, grp), "desc"),
    "size": (lambda g, grp, st: float(len(grp)), "desc"),
}

DEFAULT_METHODS = ("binomial", "conductance", "modularity", "tpr", "size")


def score_groups(graph: Graph, groups: Sequence[Group], methods: Sequence[str]) -> dict:
    """Raw scores per method, aligned with ``groups``."""
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}")
    stats = [group_stats(graph, g) for g in groups]
    return {m: np.array([METHODS[m][0](graph, g, st) for g, st in zip(groups, stats)], dtype=float)
            for m in methods}


def oriented(method: str, scores) -> np.ndarray:
    """Scores flipped so that higher is better."""
    s = np.asarray(scores, dtype=float)
    return -s if METHODS.get(method, (None, "desc"))[1] == "asc" else s


# -- trials ------------------------------------------------------------------

@dataclass
class TrialResult:
    n_groups: int
    avg_pr: float
    reference_defined: bool
    spr: dict
    top_pr: dict
    top5_pr: dict
    top_size: dict
    scores: dict = field(repr=False, default_factory=dict)


def evaluate_candidates(candidates: Sequence[Group], references: Sequence[Group],
                        method_scores: dict) -> TrialResult:
    """Evaluate one set of candidates under each method's (raw) scores."""
    if not candidates:
        nan = {m: math.nan for m in method_scores}
        return TrialResult(0, math.nan, False, dict(nan), dict(nan), dict(nan), dict(nan),
                           dict(method_scores))
    ov = np.array([o.score for o in overlap_scores(candidates, references)])
    sizes = [len(c) for c in candidates]
    ref_defined = ov.size >= 2 and not np.all(ov == ov[0])
    spr, top, top5, tsize = {}, {}, {}, {}
    for m, raw in method_scores.items():
        s = oriented(m, raw)
        spr[m] = spearman(ov, s) if ref_defined else math.nan
        rm = rank_metrics(ov, s, "desc", sizes)
        top[m], top5[m], tsize[m] = rm.top_pr, rm.top5_pr, rm.top_size
    return TrialResult(len(candidates), float(ov.mean()), ref_defined, spr, top, top5, tsize,
                       dict(method_scores))


def _trial_seeds(seed: int, trial: int) -> tuple[int, int]:
    state = np.random.SeedSequence([seed, trial]).generate_state(2)
    return int(state[0]), int(state[1])


def run_trial(spec: SyntheticSpec, methods: Sequence[str], trial: int, seed: int,
              objective: str = "edge_modularity", level: int = -1, min_size: int = 3,
              max_size: int | None = None) -> TrialResult:
    graph_seed, louvain_seed = _trial_seeds(seed, trial)
    graph, refs = generate(spec.with_seed(graph_seed))
    part = louvain(graph, objective, seed=louvain_seed)
    cands = extract_level(part, level, (min_size, max_size))
    refs = filter_groups(refs, min_size)
    return evaluate_candidates(cands, refs, score_groups(graph, cands, methods))


def _run_trial_args(args):
    return run_trial(*args)


@dataclass
class MethodSummary:
    spr_mean: float
    spr_std: float
    spr_n: int
    top_pr_mean: float
    top_pr_std: float
    top5_pr_mean: float
    noranking_rate: float

    @property
    def spr_se(self) -> float:
        return self.spr_std / math.sqrt(self.spr_n) if self.spr_n > 1 else math.nan


@dataclass
class EvalReport:
    trials: list
    methods: tuple
    undefined: str = "exclude"

    @property
    def groups_mean(self) -> float:
        return float(np.mean([t.n_groups for t in self.trials]))

    @property
    def avg_pr(self) -> float:
        return _nanmean([t.avg_pr for t in self.trials])

    @property
    def reference_defined_rate(self) -> float:
        return float(np.mean([t.reference_defined for t in self.trials]))

    def spr_values(self, method: str) -> np.ndarray:
        """Per-trial SPR over trials whose reference ranking is defined.

        A method that ties every group gives NaN; in ``zero`` mode it counts
        as 0 correlation instead, otherwise the trial is dropped.
        """
        vals = []
        for t in self.trials:
            if not t.reference_defined:
                continue
            v = t.spr[method]
            if math.isnan(v):
                if self.undefined == "zero":
                    vals.append(0.0)
                continue
            vals.append(v)
        return np.array(vals)

    def noranking_rate(self, method: str) -> float:
        flags = [bool(np.all(t.scores[method] == t.scores[method][0]))
                 for t in self.trials if t.n_groups >= 2]
        return float(np.mean(flags)) if flags else math.nan

    def summary(self, method: str) -> MethodSummary:
        spr = self.spr_values(method)
        top = np.array([t.top_pr[method] for t in self.trials if t.n_groups])
        top5 = np.array([t.top5_pr[method] for t in self.trials if t.n_groups])
        return MethodSummary(
            spr_mean=float(spr.mean()) if spr.size else math.nan,
            spr_std=float(spr.std(ddof=1)) if spr.size > 1 else math.nan,
            spr_n=int(spr.size),
            top_pr_mean=float(top.mean()) if top.size else math.nan,
            top_pr_std=float(top.std(ddof=1)) if top.size > 1 else math.nan,
            top5_pr_mean=float(top5.mean()) if top5.size else math.nan,
            noranking_rate=self.noranking_rate(method),
        )

    def rows(self, noise: float | None = None) -> list[dict]:
        out = []
        for m in self.methods:
            s = self.summary(m)
            out.append({"noise": noise, "method": m, "spr_mean": s.spr_mean, "spr_std": s.spr_std,
                        "topPR_mean": s.top_pr_mean, "topPR_std": s.top_pr_std,
                        "top5PR_mean": s.top5_pr_mean, "avgPR": self.avg_pr,
                        "groups_mean": self.groups_mean, "noranking_rate": s.noranking_rate,
                        "spr_n": s.spr_n})
        return out

    def method_correlation(self, a: str, b: str) -> np.ndarray:
        """Per-trial SPR between two methods' rankings (defined trials only)."""
        vals = []
        for t in self.trials:
            if t.n_groups < 2:
                continue
            r = spearman(oriented(a, t.scores[a]), oriented(b, t.scores[b]))
            if not math.isnan(r):
                vals.append(r)
        return np.array(vals)


def _nanmean(values) -> float:
    arr = np.asarray(values, dtype=float)
    arr = arr[~np.isnan(arr)]
    return float(arr.mean()) if arr.size else math.nan


def run_experiment(spec: SyntheticSpec, methods: Sequence[str] = DEFAULT_METHODS,
                   trials: int = 200, seed: int = 0, undefined: str = "exclude",
                   workers: int = 1, **trial_kw) -> EvalReport:
    """Generate, detect, score and evaluate ``trials`` times.

    Trial ``i`` draws its graph and Louvain seeds from ``(seed, i)``, so the
    report is the same whatever ``workers`` is.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if undefined not in ("exclude", "zero"):
        raise ValueError("undefined must be 'exclude' or 'zero'")
    methods = tuple(methods)
    score_groups(Graph.from_edges([(0, 1)]), [], methods)  # validates names early
    jobs = [(spec, methods, i, seed, trial_kw.get("objective", "edge_modularity"),
             trial_kw.get("level", -1), trial_kw.get("min_size", 3), trial_kw.get("max_size"))
            for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_trial_args, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        results = [_run_trial_args(j) for j in jobs]
    return EvalReport(results, methods, undefined)


def evaluate_graph(graph: Graph, candidates: Sequence[Group], references: Sequence[Group],
                   methods: Sequence[str] = DEFAULT_METHODS, min_size: int = 3) -> TrialResult:
    """Evaluate fixed candidate groups on a loaded graph."""
    cands = filter_groups(candidates, min_size)
    refs = filter_groups(references, min_size)
    return evaluate_candidates(cands, refs, score_groups(graph, cands, methods))
