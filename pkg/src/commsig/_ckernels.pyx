# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.  Mirrors ``_pykernels`` function by function."""
from libc.math cimport exp, log, log1p, lgamma, INFINITY
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.uint8_t u8

cdef double LN_TINY = -745.0


def group_counts(const i64[::1] indptr, const i64[::1] indices, const i64[::1] weights,
                 const i64[::1] members, u8[::1] mask):
    cdef Py_ssize_t a, k, u
    cdef i64 volume = 0, internal = 0
    for a in range(members.shape[0]):
        mask[members[a]] = 1
    for a in range(members.shape[0]):
        u = members[a]
        for k in range(indptr[u], indptr[u + 1]):
            volume += weights[k]
            if mask[indices[k]]:
                internal += weights[k]
    for a in range(members.shape[0]):
        mask[members[a]] = 0
    return volume, internal


def triangle_members(const i64[::1] indptr, const i64[::1] indices,
                     const i64[::1] members, u8[::1] mask):
    cdef Py_ssize_t a, ku, kv, eu, ev
    cdef i64 u, v, x, y
    cdef Py_ssize_t count = 0
    for a in range(members.shape[0]):
        mask[members[a]] = 1
    for a in range(members.shape[0]):
        u = members[a]
        for ku in range(indptr[u], indptr[u + 1]):
            v = indices[ku]
            if v <= u or not mask[v]:
                continue
            # sorted intersection of N(u) and N(v), restricted to members > v
            kv = indptr[v]
            ev = indptr[v + 1]
            eu = indptr[u + 1]
            x = ku + 1
            while x < eu and kv < ev:
                if indices[x] < indices[kv]:
                    x += 1
                elif indices[x] > indices[kv]:
                    kv += 1
                else:
                    y = indices[x]
                    if y > v and mask[y]:
                        mask[u] |= 2
                        mask[v] |= 2
                        mask[y] |= 2
                    x += 1
                    kv += 1
    for a in range(members.shape[0]):
        if mask[members[a]] & 2:
            count += 1
        mask[members[a]] = 0
    return count


cdef inline double _log_term(i64 trials, i64 i, double log_p, double log_q, double lg_n1) nogil:
    return (lg_n1 - lgamma(i + 1.0) - lgamma(trials - i + 1.0)
            + i * log_p + (trials - i) * log_q)


def log_binomial_tail(i64 trials, i64 successes, double p):
    cdef double log_p, log_q, lg_n1, first, total, comp, t, y, s, log_lower, lower
    cdef i64 i, top
    if successes <= 0:
        return 0.0
    if successes > trials:
        return -INFINITY
    if p <= 0.0:
        return -INFINITY
    if p >= 1.0:
        return 0.0
    log_p = log(p)
    log_q = log1p(-p)
    lg_n1 = lgamma(trials + 1.0)
    total = 1.0
    comp = 0.0
    if successes > trials * p:
        first = _log_term(trials, successes, log_p, log_q, lg_n1)
        for i in range(successes + 1, trials + 1):
            t = exp(_log_term(trials, i, log_p, log_q, lg_n1) - first)
            y = t - comp
            s = total + y
            comp = (s - total) - y
            total = s
            if t < 1e-17 * total:
                break
        return first + log(total)
    top = successes - 1
    first = _log_term(trials, top, log_p, log_q, lg_n1)
    i = top - 1
    while i >= 0:
        t = exp(_log_term(trials, i, log_p, log_q, lg_n1) - first)
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if t < 1e-17 * total:
            break
        i -= 1
    log_lower = first + log(total)
    if log_lower < LN_TINY:
        return 0.0
    lower = exp(log_lower)
    if lower >= 1.0:
        return -INFINITY
    return log1p(-lower)


cdef inline double _gain(double D, double V, double S, bint node_objective,
                         double m, double n_total) nogil:
    cdef double x
    if node_objective:
        return (D - (V - D) * S / n_total) / m
    x = V / (2.0 * m)
    return D / m - x * x


def local_moves(const i64[::1] indptr, const i64[::1] indices, const double[::1] weights,
                const double[::1] self_w, const double[::1] vol, const double[::1] size,
                i64[::1] comm, const i64[::1] order, bint node_objective,
                double m, double n_total, double tol):
    cdef Py_ssize_t N = vol.shape[0]
    cdef double[::1] D = np.zeros(N)
    cdef double[::1] V = np.zeros(N)
    cdef double[::1] S = np.zeros(N)
    cdef double[::1] w_to = np.zeros(N)
    cdef u8[::1] seen = np.zeros(N, dtype=np.uint8)
    cdef i64[::1] cands = np.empty(N + 1, dtype=np.int64)
    cdef Py_ssize_t i, k, idx, nc, j
    cdef i64 a, c, best
    cdef double ki, di, si, best_gain, g
    cdef Py_ssize_t moves = 0
    cdef bint improved = True

    for i in range(N):
        c = comm[i]
        V[c] += vol[i]
        S[c] += size[i]
        D[c] += self_w[i]
    for i in range(N):
        c = comm[i]
        for k in range(indptr[i], indptr[i + 1]):
            if comm[indices[k]] == c:
                D[c] += 0.5 * weights[k]

    with nogil:
        while improved:
            improved = False
            for idx in range(N):
                i = order[idx]
                a = comm[i]
                ki = vol[i]
                di = self_w[i]
                si = size[i]
                # candidate list: current community first, then first-seen order
                cands[0] = a
                seen[a] = 1
                nc = 1
                for k in range(indptr[i], indptr[i + 1]):
                    c = comm[indices[k]]
                    if not seen[c]:
                        seen[c] = 1
                        cands[nc] = c
                        nc += 1
                    w_to[c] += weights[k]
                D[a] -= di + w_to[a]
                V[a] -= ki
                S[a] -= si
                best = a
                best_gain = (_gain(D[a] + di + w_to[a], V[a] + ki, S[a] + si, node_objective, m, n_total)
                             - _gain(D[a], V[a], S[a], node_objective, m, n_total))
                for j in range(1, nc):
                    c = cands[j]
                    g = (_gain(D[c] + di + w_to[c], V[c] + ki, S[c] + si, node_objective, m, n_total)
                         - _gain(D[c], V[c], S[c], node_objective, m, n_total))
                    if g > best_gain + tol:
                        best = c
                        best_gain = g
                D[best] += di + w_to[best]
                V[best] += ki
                S[best] += si
                for j in range(nc):
                    c = cands[j]
                    seen[c] = 0
                    w_to[c] = 0.0
                if best != a:
                    comm[i] = best
                    moves += 1
                    improved = True
    return moves
