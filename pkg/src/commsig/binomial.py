"""Binomial-tail significance scores for groups.

Scores are ``-log10`` of the probability, under a null model, of seeing at
least ``din`` of a group's ``deg`` edge endpoints land inside the group.
Small groups use the exact tail; larger ones use the midpoint of the
KL-divergence (Chernoff-type) bounds on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ._backend import kernels
from .graph import Graph, Group, GroupStats, group_stats

LN10 = math.log(10.0)
EXACT_THRESHOLD = 50

LABELS = ("none", "weak", "moderate", "high", "very high")


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"success probability must be in (0, 1), got {p}")


def _check_counts(trials: int, successes: int) -> None:
    if trials < 0 or successes < 0 or successes > trials:
        raise ValueError(f"need 0 <= successes <= trials, got ({trials}, {successes})")


def log_binomial_tail(trials: int, successes: int, p: float) -> float:
    """Natural log of ``P(X >= successes)``, ``X ~ Binomial(trials, p)``."""
    _check_counts(trials, successes)
    _check_p(p)
    return kernels.log_binomial_tail(int(trials), int(successes), float(p))


def binomial_tail_exact(trials: int, successes: int, p: float) -> float:
    """Exact upper tail probability; may underflow to 0.0 for extreme inputs."""
    return math.exp(log_binomial_tail(trials, successes, p))


def kl_divergence(q: float, p: float) -> float:
    """Bernoulli relative entropy ``KL(q || p)`` in nats, with 0 ln 0 = 0."""
    _check_p(p)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    out = 0.0
    if q > 0.0:
        out += q * math.log(q / p)
    if q < 1.0:
        out += (1.0 - q) * math.log((1.0 - q) / (1.0 - p))
    return max(out, 0.0)


def approx_scores(deg: int, din: int, p: float) -> tuple[float, float]:
    """Lower and upper scores from the bounds ``U/sqrt(2 deg) <= tail <= U``."""
    if deg < 1:
        raise ValueError("approximate scores need deg >= 1")
    _check_counts(deg, din)
    lower = deg * kl_divergence(din / deg, p) / LN10
    return lower, lower + 0.5 * math.log10(2 * deg)


@dataclass(frozen=True)
class BinomialScore:
    score: float
    lower: float
    upper: float
    used_exact: bool
    significant: bool
    rel_error_bound: float | None = None

    @property
    def label(self) -> str:
        return significance_label(self.score)


_ZERO = BinomialScore(0.0, 0.0, 0.0, used_exact=False, significant=False)


def _exact_score(deg: int, din: int, p: float) -> float:
    lt = kernels.log_binomial_tail(deg, din, p)
    return max(0.0, -lt / LN10)


def binomial_score(deg: int, din: int, p: float, exact_threshold: int | None = EXACT_THRESHOLD,
                   use_lower: bool = False, insignificant: str = "zero") -> BinomialScore:
    """Score ``din`` internal out of ``deg`` incident edges against ``p``.

    The exact tail is used when ``deg <= exact_threshold`` (always when the
    threshold is None), the bound midpoint otherwise; ``use_lower`` takes
    the conservative lower score instead of the midpoint.  Groups with
    ``q <= p`` score 0, unless ``insignificant="exact"``, in which case they
    get ``-log10`` of their exact tail (small but still rankable).
    """
    _check_counts(deg, din)
    if insignificant not in ("zero", "exact"):
        raise ValueError(f"unknown insignificant mode {insignificant!r}")
    if p >= 1.0 or deg == 0:
        return _ZERO
    if p <= 0.0:
        raise ValueError(f"success probability must be positive, got {p}")
    if din <= p * deg:
        if insignificant == "exact" and din > 0:
            s = _exact_score(deg, din, p)
            return BinomialScore(s, s, s, used_exact=True, significant=False)
        return _ZERO
    lower, upper = approx_scores(deg, din, p)
    if exact_threshold is None or deg <= exact_threshold:
        return BinomialScore(_exact_score(deg, din, p), lower, upper,
                             used_exact=True, significant=True)
    score = lower if use_lower else 0.5 * (lower + upper)
    rel = (upper - lower) / lower if lower > 0 else None
    return BinomialScore(score, lower, upper, used_exact=False, significant=True,
                         rel_error_bound=rel)


def node_probability(size: int, n: int, self_excluded: bool = False) -> float:
    if self_excluded:
        return (size - 1) / (n - 1) if n > 1 else 1.0
    return size / n


def score_node_based(graph: Graph, group: Group, exact_threshold: int | None = EXACT_THRESHOLD,
                     self_excluded: bool = False, stats: GroupStats | None = None,
                     **kw) -> BinomialScore:
    st = stats or group_stats(graph, group)
    p = node_probability(st.size, st.n, self_excluded)
    return binomial_score(st.deg, st.din, p, exact_threshold, **kw)


def score_edge_based(graph: Graph, group: Group, exact_threshold: int | None = EXACT_THRESHOLD,
                     half_volume_trials: bool = False, stats: GroupStats | None = None,
                     **kw) -> BinomialScore:
    """Edge null model, ``p = (deg + din) / 2m``.

    With ``half_volume_trials`` the trial count is ``(deg + din) // 2``
    instead of ``deg``.
    """
    st = stats or group_stats(graph, group)
    if st.m == 0:
        raise ValueError("edge-based score needs a graph with edges")
    trials = (st.deg + st.din) // 2 if half_volume_trials else st.deg
    return binomial_score(trials, st.din, st.p_edge, exact_threshold, **kw)


def log10_comb(n: int, k: int) -> float:
    if k < 0 or k > n:
        raise ValueError(f"C({n}, {k}) undefined")
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / LN10


def score_global(graph: Graph, group: Group, exact_threshold: int | None = EXACT_THRESHOLD,
                 stats: GroupStats | None = None) -> BinomialScore:
    """Union bound over all size-k subsets: ``C(n, k) * tail``, as a clamped score."""
    st = stats or group_stats(graph, group)
    base = score_node_based(graph, group, exact_threshold, stats=st)
    penalty = log10_comb(st.n, st.size)
    score = max(0.0, base.score - penalty)
    return BinomialScore(score, max(0.0, base.lower - penalty), max(0.0, base.upper - penalty),
                         used_exact=base.used_exact, significant=score > 0.0,
                         rel_error_bound=base.rel_error_bound)


def pvalue_bound_he(deg: int, din: int, m: int, clamp: bool = False) -> float:
    """``-log10`` of the configuration-model p-value bound of He et al.

    The bound is ``C(din+deg, 2 din) C(m, din) / C(2m, 2 din)``.  It can
    exceed 1, giving a negative score; ``clamp`` floors the score at 0.
    """
    if din < 0 or din > deg or din > m or din + deg > 2 * m:
        raise ValueError(f"invalid (deg={deg}, din={din}, m={m}) for the p-value bound")
    log_bound = (log10_comb(din + deg, 2 * din) + log10_comb(m, din)
                 - log10_comb(2 * m, 2 * din))
    score = -log_bound
    if score == 0.0:
        score = 0.0  # no negative zero
    return max(score, 0.0) if clamp else score


def significance_label(score: float) -> str:
    """Band a score: 0 none, (0,1) weak, [1,2) moderate, [2,3) high, >=3 very high."""
    if score < 0:
        raise ValueError("scores are nonnegative")
    if score == 0:
        return "none"
    return LABELS[min(int(math.floor(score)) + 1, 4)]
