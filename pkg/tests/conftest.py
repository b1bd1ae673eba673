"""Shared brute-force oracles, deliberately independent of the package's
own algorithms: subset-mask dynamic programs only."""

from __future__ import annotations

import itertools

import pytest

from chromalab.graphcore import Graph


def brute_independent_counts(G: Graph) -> list[int]:
    """counts[k] = number of independent k-sets, by a DP over all 2^n
    subsets (independent(s) = independent(s \\ {v}) and v has no neighbor
    in s \\ {v})."""
    n = G.n
    masks = G.row_masks()
    counts = [0] * (n + 1)
    counts[0] = 1
    indep = bytearray(1 << n)
    indep[0] = 1
    for s in range(1, 1 << n):
        low = s & -s
        v = low.bit_length() - 1
        rest = s ^ low
        if indep[rest] and not (masks[v] & rest):
            indep[s] = 1
            counts[s.bit_count()] += 1
    return counts


def brute_independence_number(G: Graph) -> int:
    counts = brute_independent_counts(G)
    return max(k for k, c in enumerate(counts) if c > 0)


def brute_independent_sets(G: Graph, k: int) -> set:
    masks = G.row_masks()
    out = set()
    for combo in itertools.combinations(range(G.n), k):
        ok = True
        for i, u in enumerate(combo):
            for v in combo[i + 1:]:
                if masks[u] >> v & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.add(combo)
    return out


def brute_chromatic_number(G: Graph) -> int:
    """Minimum number of independent sets covering V, by BFS over
    vertex-subset masks (each layer adds one maximal independent set)."""
    n = G.n
    masks = G.row_masks()
    full = (1 << n) - 1
    if full == 0:
        return 1 if n else 0

    # all maximal independent sets within each residual mask are expensive;
    # instead: reachable[mask] = fewest colors to color vertices of mask
    import functools

    @functools.lru_cache(maxsize=None)
    def best(mask: int) -> int:
        if mask == 0:
            return 0
        # branch on the lowest uncolored vertex; enumerate independent
        # subsets of mask containing it
        low = mask & -mask
        v = low.bit_length() - 1
        avail = mask & ~masks[v] & ~low
        result = n
        sub = avail
        while True:
            cls = sub | low
            if _is_independent(cls, masks):
                r = 1 + best(mask & ~cls)
                if r < result:
                    result = r
            if sub == 0:
                break
            sub = (sub - 1) & avail
        return result

    return best(full)


def _is_independent(s: int, masks) -> bool:
    m = s
    while m:
        low = m & -m
        v = low.bit_length() - 1
        m ^= low
        if masks[v] & s & ~low:
            return False
    return True


def petersen() -> Graph:
    return Graph.from_edges(10, [
        (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
        (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
        (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture(scope="session")
def petersen_graph() -> Graph:
    return petersen()
