"""Pure-Python kernels, used when the compiled extension is unavailable.

Every function here has a twin of the same name and signature in
``_ckernels.pyx``.  The two must agree exactly (the Louvain sweep performs
its floating point operations in the same order in both).
"""
import math

import numpy as np

_LN_TINY = -745.0  # exp() underflows below this


def _gather(indptr, members):
    """Flat CSR positions of all adjacency entries of ``members``."""
    starts = indptr[members]
    lens = indptr[members + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.repeat(starts - np.cumsum(lens) + lens, lens)
    return offsets + np.arange(total, dtype=np.int64)


def group_counts(indptr, indices, weights, members, mask):
    """Return ``(volume, internal_twice)`` for a member set.

    ``volume`` sums adjacency weights of the members (self-loops excluded),
    ``internal_twice`` sums the weights whose other endpoint is also a
    member, so each internal edge appears twice.  ``mask`` is a zeroed
    uint8 scratch array of length n and is left zeroed on return.
    """
    pos = _gather(indptr, members)
    if pos.size == 0:
        return 0, 0
    mask[members] = 1
    w = weights[pos]
    inside = mask[indices[pos]].astype(bool)
    mask[members] = 0
    return int(w.sum()), int(w[inside].sum())


def triangle_members(indptr, indices, members, mask):
    """Count members lying on a triangle whose three nodes are all members."""
    mask[members] = 1
    try:
        nbrs = {}
        for u in members.tolist():
            row = indices[indptr[u]:indptr[u + 1]]
            nbrs[u] = {v for v in row.tolist() if mask[v] and v != u}
        hit = set()
        for u, nu in nbrs.items():
            for v in nu:
                if v <= u:
                    continue
                for w in nu & nbrs[v]:
                    if w > v:
                        hit.update((u, v, w))
        return len(hit)
    finally:
        mask[members] = 0


def _log_term(trials, i, log_p, log_q, lg_n1):
    return (lg_n1 - math.lgamma(i + 1) - math.lgamma(trials - i + 1)
            + i * log_p + (trials - i) * log_q)


def log_binomial_tail(trials, successes, p):
    """Natural log of P(X >= successes) for X ~ Binomial(trials, p).

    Sums outward from the term nearest the mode and stops once terms no
    longer change the (compensated) sum.  When ``successes`` is at or below
    the mean the complement is summed instead and subtracted from one.
    """
    if successes <= 0:
        return 0.0
    if successes > trials:
        return -math.inf
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return 0.0
    log_p = math.log(p)
    log_q = math.log1p(-p)
    lg_n1 = math.lgamma(trials + 1)
    if successes > trials * p:
        # upper tail, terms decrease from i = successes upward
        first = _log_term(trials, successes, log_p, log_q, lg_n1)
        total = 1.0
        comp = 0.0
        for i in range(successes + 1, trials + 1):
            t = math.exp(_log_term(trials, i, log_p, log_q, lg_n1) - first)
            y = t - comp
            s = total + y
            comp = (s - total) - y
            total = s
            if t < 1e-17 * total:
                break
        return first + math.log(total)
    # complement: P(X <= successes - 1), terms decrease from successes - 1 downward
    top = successes - 1
    first = _log_term(trials, top, log_p, log_q, lg_n1)
    total = 1.0
    comp = 0.0
    for i in range(top - 1, -1, -1):
        t = math.exp(_log_term(trials, i, log_p, log_q, lg_n1) - first)
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if t < 1e-17 * total:
            break
    log_lower = first + math.log(total)
    if log_lower < _LN_TINY:
        return 0.0
    lower = math.exp(log_lower)
    if lower >= 1.0:
        return -math.inf
    return math.log1p(-lower)


def _gain(D, V, S, node_objective, m, n_total):
    if node_objective:
        return (D - (V - D) * S / n_total) / m
    x = V / (2.0 * m)
    return D / m - x * x


def local_moves(indptr, indices, weights, self_w, vol, size, comm, order,
                node_objective, m, n_total, tol):
    """Louvain phase one: move nodes between communities until stable.

    ``comm`` is modified in place; returns the number of moves made.
    Communities are identified by node ids of the current level, so
    ``comm`` must start as a valid assignment into ``range(len(vol))``.
    """
    N = vol.shape[0]
    D = np.zeros(N)
    V = np.zeros(N)
    S = np.zeros(N)
    for i in range(N):
        c = comm[i]
        V[c] += vol[i]
        S[c] += size[i]
        D[c] += self_w[i]
    for i in range(N):
        ci = comm[i]
        for k in range(indptr[i], indptr[i + 1]):
            if comm[indices[k]] == ci:
                D[ci] += 0.5 * weights[k]
    D = D.tolist()
    V = V.tolist()
    S = S.tolist()
    comm_l = comm.tolist()
    indptr_l = indptr.tolist()
    indices_l = indices.tolist()
    weights_l = weights.tolist()
    vol_l = vol.tolist()
    size_l = size.tolist()
    self_l = self_w.tolist()
    order_l = order.tolist()

    moves = 0
    improved = True
    while improved:
        improved = False
        for i in order_l:
            a = comm_l[i]
            ki = vol_l[i]
            di = self_l[i]
            si = size_l[i]
            w_to = {a: 0.0}
            for k in range(indptr_l[i], indptr_l[i + 1]):
                c = comm_l[indices_l[k]]
                if c in w_to:
                    w_to[c] += weights_l[k]
                else:
                    w_to[c] = weights_l[k]
            D[a] -= di + w_to[a]
            V[a] -= ki
            S[a] -= si
            best = a
            best_gain = (_gain(D[a] + di + w_to[a], V[a] + ki, S[a] + si, node_objective, m, n_total)
                         - _gain(D[a], V[a], S[a], node_objective, m, n_total))
            for c, w in w_to.items():
                if c == a:
                    continue
                g = (_gain(D[c] + di + w, V[c] + ki, S[c] + si, node_objective, m, n_total)
                     - _gain(D[c], V[c], S[c], node_objective, m, n_total))
                if g > best_gain + tol:
                    best = c
                    best_gain = g
            D[best] += di + w_to[best]
            V[best] += ki
            S[best] += si
            if best != a:
                comm_l[i] = best
                moves += 1
                improved = True
    comm[:] = comm_l
    return moves
