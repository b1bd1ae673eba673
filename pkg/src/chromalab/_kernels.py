"""Numba kernels for the hot search loops.

Graphs enter as (n, W) uint64 bitset rows.  The counting kernel counts
k-cliques of whatever rows it is handed (callers pass complement rows to
count independent sets); the coloring kernel is an iterative DSATUR
branch-and-bound.  Both take explicit node caps so budget exhaustion is
reproducible in node terms.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_FULL = uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, nogil=True)
def _popcount64(x):
    x = x - ((x >> uint64(1)) & uint64(0x5555555555555555))
    x = (x & uint64(0x3333333333333333)) + ((x >> uint64(2)) & uint64(0x3333333333333333))
    x = (x + (x >> uint64(4))) & uint64(0x0F0F0F0F0F0F0F0F)
    return (x * uint64(0x0101010101010101)) >> uint64(56)


@njit(cache=True, nogil=True)
def _ctz64(x):
    # trailing zeros of a nonzero word
    return _popcount64((x & (uint64(0) - x)) - uint64(1))


@njit(cache=True, nogil=True)
def count_kcliques(rows, n, W, k, node_cap, count_cap):
    """Exact number of k-cliques in the bitset graph ``rows``.

    Returns (count, nodes).  count == -1 signals the node cap was hit;
    count == count_cap + 1 signals early exit once the count is known to
    exceed count_cap (pass a huge count_cap for exact totals).
    Vertices are taken in ascending order, so each clique is visited once.
    """
    if k == 0:
        return 1, 0
    if k > n:
        return 0, 0
    cand = np.zeros((k, W), dtype=np.uint64)
    full_words = n // 64
    for w in range(full_words):
        cand[0, w] = _FULL
    rem = n - full_words * 64
    if rem > 0:
        cand[0, full_words] = (uint64(1) << uint64(rem)) - uint64(1)
    count = 0
    nodes = 0
    d = 0
    while d >= 0:
        nodes += 1
        if nodes > node_cap:
            return -1, nodes
        pc = 0
        for w in range(W):
            pc += _popcount64(cand[d, w])
        if d == k - 1:
            count += int(pc)
            if count > count_cap:
                return count_cap + 1, nodes
            d -= 1
            continue
        if int(pc) + d < k:
            d -= 1
            continue
        v = -1
        for w in range(W):
            cw = cand[d, w]
            if cw != uint64(0):
                v = w * 64 + int(_ctz64(cw))
                cand[d, w] = cw & (cw - uint64(1))
                break
        if v < 0:
            d -= 1
            continue
        for w in range(W):
            cand[d + 1, w] = cand[d, w] & rows[v, w]
        d += 1
    return count, nodes


@njit(cache=True, nogil=True)
def max_clique(rows, n, W, node_cap):
    """Exact clique number by branch and bound with greedy upper bounds.

    Returns (omega, complete_flag, nodes); on node-cap exhaustion the
    best clique found so far is returned with complete_flag = 0.
    """
    best = 0
    nodes = 0
    # stack frames: candidate sets plus current clique size
    cand = np.zeros((n + 1, W), dtype=np.uint64)
    size = np.zeros(n + 1, dtype=np.int64)
    full_words = n // 64
    for w in range(full_words):
        cand[0, w] = _FULL
    rem = n - full_words * 64
    if rem > 0:
        cand[0, full_words] = (uint64(1) << uint64(rem)) - uint64(1)
    size[0] = 0
    d = 0
    complete = 1
    while d >= 0:
        nodes += 1
        if nodes > node_cap:
            complete = 0
            break
        pc = 0
        for w in range(W):
            pc += _popcount64(cand[d, w])
        if size[d] + int(pc) <= best:
            d -= 1
            continue
        v = -1
        for w in range(W):
            cw = cand[d, w]
            if cw != uint64(0):
                v = w * 64 + int(_ctz64(cw))
                cand[d, w] = cw & (cw - uint64(1))
                break
        if v < 0:
            if size[d] > best:
                best = size[d]
            d -= 1
            continue
        if size[d] + 1 > best:
            best = size[d] + 1
        for w in range(W):
            cand[d + 1, w] = cand[d, w] & rows[v, w]
        size[d + 1] = size[d] + 1
        d += 1
    return best, complete, nodes


@njit(cache=True, nogil=True)
def dsatur_exact(rows, n, W, lower_bound, ub_init, colors_init, node_cap):
    """DSATUR branch-and-bound chromatic number.

    ``ub_init``/``colors_init`` seed the incumbent (greedy coloring).
    Colors are 1-based and capped at 64 (a color bitmask per vertex).
    Returns (best_k, best_colors, complete_flag, nodes): on node-cap
    exhaustion complete_flag is 0 and best_k is the incumbent upper
    bound.  Vertex selection: maximum saturation, ties by lowest index.
    """
    best = ub_init
    best_colors = colors_init.copy()
    if lower_bound >= best or n == 0:
        return best, best_colors, 1, 0

    color = np.zeros(n, dtype=np.int64)
    # per-vertex count of colored neighbors holding each color
    adj_count = np.zeros((n, 65), dtype=np.int32)
    sat = np.zeros(n, dtype=np.int64)
    chosen = np.full(n, -1, dtype=np.int64)
    tried = np.zeros(n, dtype=np.int64)
    maxused = np.zeros(n + 1, dtype=np.int64)

    nodes = 0
    complete = 1
    d = 0
    fresh = True
    while d >= 0:
        if d == n:
            # full coloring found
            if maxused[d] < best:
                best = maxused[d]
                for i in range(n):
                    best_colors[i] = color[i]
            d -= 1
            if d >= 0:
                v = chosen[d]
                c = color[v]
                color[v] = 0
                for w in range(W):
                    cw = rows[v, w]
                    while cw != uint64(0):
                        u = w * 64 + int(_ctz64(cw))
                        cw = cw & (cw - uint64(1))
                        adj_count[u, c] -= 1
                        if adj_count[u, c] == 0:
                            sat[u] -= 1
                fresh = False
            continue
        nodes += 1
        if nodes > node_cap:
            complete = 0
            break
        if fresh:
            # select uncolored vertex: max saturation, ties lowest index
            v = -1
            smax = -1
            for u in range(n):
                if color[u] == 0 and sat[u] > smax:
                    v = u
                    smax = sat[u]
            chosen[d] = v
            tried[d] = 0
        v = chosen[d]
        limit = maxused[d] + 1
        if limit > best - 1:
            limit = best - 1
        if limit > 64:
            limit = 64
        c = tried[d] + 1
        while c <= limit and adj_count[v, c] > 0:
            c += 1
        if c > limit:
            # exhausted colors at this frame: backtrack
            d -= 1
            if d >= 0:
                pv = chosen[d]
                pc = color[pv]
                color[pv] = 0
                for w in range(W):
                    cw = rows[pv, w]
                    while cw != uint64(0):
                        u = w * 64 + int(_ctz64(cw))
                        cw = cw & (cw - uint64(1))
                        adj_count[u, pc] -= 1
                        if adj_count[u, pc] == 0:
                            sat[u] -= 1
                fresh = False
            continue
        tried[d] = c
        color[v] = c
        for w in range(W):
            cw = rows[v, w]
            while cw != uint64(0):
                u = w * 64 + int(_ctz64(cw))
                cw = cw & (cw - uint64(1))
                adj_count[u, c] += 1
                if adj_count[u, c] == 1:
                    sat[u] += 1
        nm = maxused[d]
        if c > nm:
            nm = c
        if nm >= best:
            # cannot improve; undo and try next color
            color[v] = 0
            for w in range(W):
                cw = rows[v, w]
                while cw != uint64(0):
                    u = w * 64 + int(_ctz64(cw))
                    cw = cw & (cw - uint64(1))
                    adj_count[u, c] -= 1
                    if adj_count[u, c] == 0:
                        sat[u] -= 1
            fresh = False
            continue
        maxused[d + 1] = nm
        d += 1
        fresh = True
        if best == lower_bound:
            break
    return best, best_colors, complete, nodes
