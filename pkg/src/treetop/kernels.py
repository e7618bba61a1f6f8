"""Hot numeric loops, each in a numba flavour and a pure-numpy flavour.

The public entry points (``log_recursion``, ``left_perron_iteration``,
``tree_block_search``, ``min_partial_sum_ratio``) dispatch on
:data:`treetop._accel.USE_NUMBA`. The ``*_numba`` / ``*_numpy`` twins are
exported so tests and the benchmark can run both paths side by side.
"""

from __future__ import annotations

import math

import numpy as np

from . import _accel
from ._accel import njit

__all__ = [
    "log_recursion",
    "log_recursion_numba",
    "log_recursion_numpy",
    "left_perron_iteration",
    "left_perron_iteration_numba",
    "left_perron_iteration_numpy",
    "tree_block_search",
    "tree_block_search_numba",
    "tree_block_search_numpy",
    "min_partial_sum_ratio",
    "min_partial_sum_ratio_numba",
    "min_partial_sum_ratio_numpy",
]

NEG_INF = -np.inf


# ---------------------------------------------------------------------------
# log-domain block count recursion
#
# y_i(n) = d * logsumexp{ y_j(n-1) : A_ij = 1 },  y_i(0) = 0.
# Stored as y(n) = scaled[n] * d**n + rel[n] with max(rel[n]) == 0, so the
# relative part keeps full precision while absolute values grow like d**n.
# ---------------------------------------------------------------------------


@njit
def log_recursion_numba(adj, d, n_max):
    k = adj.shape[0]
    scaled = np.zeros(n_max + 1)
    rel = np.zeros((n_max + 1, k))
    lse = np.empty(k)
    dead = False
    for n in range(1, n_max + 1):
        if dead:
            scaled[n] = -np.inf
            for i in range(k):
                rel[n, i] = -np.inf
            continue
        mx = -np.inf
        for i in range(k):
            top = -np.inf
            for j in range(k):
                if adj[i, j] and rel[n - 1, j] > top:
                    top = rel[n - 1, j]
            if top == -np.inf:
                lse[i] = -np.inf
            else:
                acc = 0.0
                for j in range(k):
                    if adj[i, j] and rel[n - 1, j] > -np.inf:
                        acc += math.exp(rel[n - 1, j] - top)
                lse[i] = top + math.log(acc)
            if lse[i] > mx:
                mx = lse[i]
        if mx == -np.inf:
            dead = True
            scaled[n] = -np.inf
            for i in range(k):
                rel[n, i] = -np.inf
            continue
        for i in range(k):
            rel[n, i] = d * (lse[i] - mx)
        scaled[n] = scaled[n - 1] + mx * float(d) ** (1 - n)
    return scaled, rel


def log_recursion_numpy(adj, d, n_max):
    adj = np.asarray(adj, dtype=bool)
    k = adj.shape[0]
    scaled = np.zeros(n_max + 1)
    rel = np.zeros((n_max + 1, k))
    for n in range(1, n_max + 1):
        prev = rel[n - 1]
        if not np.isfinite(scaled[n - 1]):
            scaled[n] = NEG_INF
            rel[n] = NEG_INF
            continue
        masked = np.where(adj, prev[None, :], NEG_INF)
        top = masked.max(axis=1)
        alive = top > NEG_INF
        lse = np.full(k, NEG_INF)
        if alive.any():
            shifted = np.exp(masked[alive] - top[alive, None])
            lse[alive] = top[alive] + np.log(shifted.sum(axis=1))
        mx = lse.max()
        if mx == NEG_INF:
            scaled[n] = NEG_INF
            rel[n] = NEG_INF
            continue
        with np.errstate(over="ignore"):  # a lagging row may run off to -inf
            rel[n] = d * (lse - mx)
        scaled[n] = scaled[n - 1] + mx * float(d) ** (1 - n)
    return scaled, rel


def log_recursion(adj, d: int, n_max: int):
    """Return ``(scaled, rel)`` arrays for depths ``0..n_max``."""
    adj = np.ascontiguousarray(adj, dtype=np.uint8)
    if _accel.USE_NUMBA:
        return log_recursion_numba(adj, int(d), int(n_max))
    return log_recursion_numpy(adj, int(d), int(n_max))


# ---------------------------------------------------------------------------
# left Perron vector by power iteration on A + I
# ---------------------------------------------------------------------------


@njit
def left_perron_iteration_numba(a, tol, max_iter):
    k = a.shape[0]
    v = np.full(k, 1.0 / k)
    w = np.empty(k)
    rho = 0.0
    residual = np.inf
    it = 0
    while it < max_iter:
        for j in range(k):
            acc = 0.0
            for i in range(k):
                acc += v[i] * a[i, j]
            w[j] = acc
        rho = 0.0
        for j in range(k):
            rho += w[j]
        residual = 0.0
        for j in range(k):
            r = abs(w[j] - rho * v[j])
            if r > residual:
                residual = r
        if residual <= tol:
            break
        total = 0.0
        for j in range(k):
            w[j] += v[j]
            total += w[j]
        for j in range(k):
            v[j] = w[j] / total
        it += 1
    return v, rho, residual, it


def left_perron_iteration_numpy(a, tol, max_iter):
    a = np.asarray(a, dtype=np.float64)
    k = a.shape[0]
    v = np.full(k, 1.0 / k)
    rho, residual, it = 0.0, np.inf, 0
    while it < max_iter:
        w = v @ a
        rho = float(w.sum())
        residual = float(np.abs(w - rho * v).max())
        if residual <= tol:
            break
        w += v
        v = w / w.sum()
        it += 1
    return v, rho, residual, it


def left_perron_iteration(a, tol: float, max_iter: int):
    """Iterate ``v <- v(A + I) / |.|_1`` from the uniform vector.

    Returns ``(v, rho, residual, iterations)`` with ``rho = sum(v A)`` and
    ``residual = max|vA - rho v|`` evaluated at the returned ``v``.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    if _accel.USE_NUMBA:
        v, rho, res, it = left_perron_iteration_numba(a, float(tol), int(max_iter))
    else:
        v, rho, res, it = left_perron_iteration_numpy(a, float(tol), int(max_iter))
    return np.asarray(v), float(rho), float(res), int(it)


# ---------------------------------------------------------------------------
# exhaustive tree-block search
#
# Nodes of Delta_n are numbered breadth-first; node p > 0 has parent (p-1)//d.
# Both flavours visit labelings in lexicographic order with the root as the
# most significant position, so samples agree.
# ---------------------------------------------------------------------------


@njit
def tree_block_search_numba(adj, d, n_nodes, limit):
    k = adj.shape[0]
    counts = np.zeros(k, dtype=np.int64)
    samples = np.zeros((limit, n_nodes), dtype=np.int64)
    n_samples = 0
    labels = np.zeros(n_nodes, dtype=np.int64)
    cand = np.zeros(n_nodes, dtype=np.int64)
    pos = 0
    while pos >= 0:
        s = cand[pos]
        if s >= k:
            pos -= 1
            if pos >= 0:
                cand[pos] += 1
            continue
        if pos > 0 and adj[labels[(pos - 1) // d], s] == 0:
            cand[pos] += 1
            continue
        labels[pos] = s
        if pos == n_nodes - 1:
            counts[labels[0]] += 1
            if n_samples < limit:
                for q in range(n_nodes):
                    samples[n_samples, q] = labels[q]
                n_samples += 1
            cand[pos] += 1
        else:
            pos += 1
            cand[pos] = 0
    return counts, samples[:n_samples]


def tree_block_search_numpy(adj, d, n_nodes, limit, chunk=1 << 20):
    adj = np.asarray(adj, dtype=bool)
    k = adj.shape[0]
    total = k**n_nodes
    counts = np.zeros(k, dtype=np.int64)
    samples = []
    place = k ** np.arange(n_nodes - 1, -1, -1, dtype=np.int64)
    parents = (np.arange(1, n_nodes) - 1) // d
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        labels = (idx[:, None] // place[None, :]) % k
        ok = np.ones(idx.size, dtype=bool)
        for p, q in enumerate(parents, start=1):
            ok &= adj[labels[:, q], labels[:, p]]
        good = labels[ok]
        counts += np.bincount(good[:, 0], minlength=k)
        if len(samples) < limit and good.size:
            samples.extend(good[: limit - len(samples)])
    out = np.array(samples, dtype=np.int64).reshape(len(samples), n_nodes)
    return counts, out


def tree_block_search(adj, d: int, n_nodes: int, limit: int = 0):
    """Count admissible labelings of ``n_nodes`` breadth-first nodes by root symbol."""
    adj = np.ascontiguousarray(adj, dtype=np.uint8)
    if _accel.USE_NUMBA:
        return tree_block_search_numba(adj, int(d), int(n_nodes), int(limit))
    return tree_block_search_numpy(adj, int(d), int(n_nodes), int(limit))


# ---------------------------------------------------------------------------
# min over proper non-empty subsets T of
#     (W + x**d (1 - W)) / (W + x (1 - W))**d,   W = sum_{i in T} v_i
# ---------------------------------------------------------------------------


@njit
def min_partial_sum_ratio_numba(v, d, x):
    k = v.shape[0]
    full = 1 << k
    sums = np.zeros(full)
    size = 1
    for i in range(k):  # sums[mask] = sum of v over the bits of mask
        for m in range(size):
            sums[size + m] = sums[m] + v[i]
        size *= 2
    xd = x**d
    best = np.inf
    for mask in range(1, full - 1):
        w = sums[mask]
        den = w + x * (1.0 - w)
        p = den
        for _ in range(d - 1):
            p *= den
        val = (w + xd * (1.0 - w)) / p
        if val < best:
            best = val
    return best


def min_partial_sum_ratio_numpy(v, d, x):
    v = np.asarray(v, dtype=np.float64)
    sums = np.zeros(1)
    for vi in v:
        sums = np.concatenate([sums, sums + vi])
    w = sums[1:-1]  # drop the empty set and the full set
    vals = (w + x**d * (1.0 - w)) / (w + x * (1.0 - w)) ** d
    return float(vals.min())


def min_partial_sum_ratio(v, d: int, x: float) -> float:
    v = np.ascontiguousarray(v, dtype=np.float64)
    if _accel.USE_NUMBA:
        return float(min_partial_sum_ratio_numba(v, int(d), float(x)))
    return min_partial_sum_ratio_numpy(v, int(d), float(x))
