"""Dense-graph substrate: fair-coin sampling, independent-set counting and
enumeration, exact independence and chromatic numbers, serialization.

Graphs are symmetric bit matrices, one row of ceil(n/64) uint64 words per
vertex, diagonal and padding bits zero.  Graph values are immutable after
construction and safe to share read-only; the solvers keep private state.
"""

from __future__ import annotations

import hashlib
import math
import struct
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .rng import coin_bits

MAX_VERTICES = 16384
_MAGIC = b"CLGRAPH1"
_U = np.uint64
_EXACT_COUNT_CAP = (1 << 62)


def _padding_mask(n: int, W: int) -> np.ndarray:
    pad = np.zeros(W, dtype=np.uint64)
    full = n // 64
    pad[:full] = _U(0xFFFFFFFFFFFFFFFF)
    rem = n - full * 64
    if rem:
        pad[full] = (_U(1) << _U(rem)) - _U(1)
    return pad


def edge_index(u: int, v: int, n: int) -> int:
    """Row-major upper-triangular index of edge (u, v), u < v."""
    if u > v:
        u, v = v, u
    return u * n - u * (u + 1) // 2 + (v - u - 1)


class Graph:
    """Immutable dense undirected graph on 1..16384 vertices."""

    __slots__ = ("n", "_rows")

    def __init__(self, n: int, rows: np.ndarray):
        if not (1 <= n <= MAX_VERTICES):
            raise DomainError(f"vertex count must be in [1, {MAX_VERTICES}], got {n}")
        W = (n + 63) // 64
        rows = np.ascontiguousarray(rows, dtype=np.uint64)
        if rows.shape != (n, W):
            raise DomainError(f"adjacency shape {rows.shape} != ({n}, {W})")
        self.n = n
        self._rows = rows
        self._rows.setflags(write=False)

    # -- construction -------------------------------------------------

    @staticmethod
    def from_edges(n: int, edges) -> "Graph":
        W = (n + 63) // 64
        rows = np.zeros((n, W), dtype=np.uint64)
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"bad edge ({u}, {v}) for n={n}")
            rows[u, v // 64] |= _U(1) << _U(v % 64)
            rows[v, u // 64] |= _U(1) << _U(u % 64)
        return Graph(n, rows)

    @staticmethod
    def from_dense(mat: np.ndarray) -> "Graph":
        mat = np.asarray(mat, dtype=bool)
        n = mat.shape[0]
        W = (n + 63) // 64
        packed = np.packbits(mat, axis=1, bitorder="little")
        buf = np.zeros((n, W * 8), dtype=np.uint8)
        buf[:, : packed.shape[1]] = packed
        return Graph(n, buf.view(np.uint64))

    # -- basic queries -------------------------------------------------

    @property
    def W(self) -> int:
        return (self.n + 63) // 64

    @property
    def rows(self) -> np.ndarray:
        return self._rows

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._rows[u, v // 64] >> _U(v % 64)) & _U(1))

    def degree(self, u: int) -> int:
        return int(sum(bin(int(w)).count("1") for w in self._rows[u]))

    def degree_sequence(self) -> list[int]:
        return [self.degree(u) for u in range(self.n)]

    def edge_count(self) -> int:
        return sum(self.degree(u) for u in range(self.n)) // 2

    def density(self) -> float:
        if self.n < 2:
            return 0.0
        return self.edge_count() / (self.n * (self.n - 1) / 2)

    def neighbors_mask(self, u: int) -> int:
        m = 0
        for w in range(self.W - 1, -1, -1):
            m = (m << 64) | int(self._rows[u, w])
        return m

    def row_masks(self) -> list[int]:
        return [self.neighbors_mask(u) for u in range(self.n)]

    def validate(self) -> None:
        """Check symmetry, zero diagonal, zero padding bits."""
        n, W = self.n, self.W
        pad = _padding_mask(n, W)
        if np.any(self._rows & ~pad):
            raise DomainError("padding bits set")
        for u in range(n):
            if self.has_edge(u, u):
                raise DomainError(f"diagonal bit set at {u}")
        for u in range(n):
            for w in range(W):
                x = int(self._rows[u, w])
                while x:
                    b = x & -x
                    v = w * 64 + b.bit_length() - 1
                    x ^= b
                    if not self.has_edge(v, u):
                        raise DomainError(f"asymmetric edge ({u}, {v})")

    # -- derived graphs ------------------------------------------------

    def complement(self) -> "Graph":
        pad = _padding_mask(self.n, self.W)
        rows = (~self._rows) & pad
        for v in range(self.n):
            rows[v, v // 64] &= ~(_U(1) << _U(v % 64))
        return Graph(self.n, rows)

    def induced(self, vertices) -> "Graph":
        verts = sorted(vertices)
        idx = {v: i for i, v in enumerate(verts)}
        edges = []
        for i, u in enumerate(verts):
            for v in verts[i + 1:]:
                if self.has_edge(u, v):
                    edges.append((idx[u], idx[v]))
        return Graph.from_edges(len(verts), edges)

    def relabel(self, perm) -> "Graph":
        """Isomorphic copy with vertex u renamed perm[u]."""
        edges = []
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if self.has_edge(u, v):
                    edges.append((perm[u], perm[v]))
        return Graph.from_edges(self.n, edges)

    # -- hashing / serialization --------------------------------------

    def adjacency_hash(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()

    def to_bytes(self) -> bytes:
        """Binary format: magic, n (uint32 LE), upper-triangular bits
        packed row-major, little-endian within bytes."""
        n = self.n
        m = n * (n - 1) // 2
        bits = np.zeros(m, dtype=bool)
        pos = 0
        for u in range(n):
            for v in range(u + 1, n):
                bits[pos] = self.has_edge(u, v)
                pos += 1
        return _MAGIC + struct.pack("<I", n) + np.packbits(bits, bitorder="little").tobytes()

    @staticmethod
    def from_bytes(data: bytes) -> "Graph":
        if data[:8] != _MAGIC:
            raise DomainError("bad magic in graph data")
        (n,) = struct.unpack("<I", data[8:12])
        m = n * (n - 1) // 2
        raw = np.frombuffer(data[12:], dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[:m].astype(bool)
        iu, ju = np.triu_indices(n, 1)
        mat = np.zeros((n, n), dtype=bool)
        mat[iu, ju] = bits
        mat[ju, iu] = bits
        return Graph.from_dense(mat)

    def to_dimacs(self) -> str:
        lines = [f"p edge {self.n} {self.edge_count()}"]
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if self.has_edge(u, v):
                    lines.append(f"e {u + 1} {v + 1}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_dimacs(text: str) -> "Graph":
        n = None
        edges = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("c"):
                continue
            if line.startswith("p"):
                parts = line.split()
                n = int(parts[2])
            elif line.startswith("e"):
                _, u, v = line.split()
                edges.append((int(u) - 1, int(v) - 1))
        if n is None:
            raise DomainError("DIMACS text has no problem line")
        return Graph.from_edges(n, edges)

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and np.array_equal(
            self._rows, other._rows)

    def __hash__(self):
        return hash((self.n, self._rows.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count()})"


# ---------------------------------------------------------------------------
# Sampling


def sample_gnp_half(n: int, seed: int, stream: int = 0) -> Graph:
    """Fair-coin random graph, one counter-based bit per edge.

    Edge (u, v), u < v, uses counter position edge_index(u, v, n) of the
    (seed, stream) bit stream, so conditioning or resampling any edge
    subset leaves all other edges untouched.
    """
    if not (1 <= n <= MAX_VERTICES):
        raise DomainError(f"n must be in [1, {MAX_VERTICES}], got {n}")
    m = n * (n - 1) // 2
    if m == 0:
        return Graph(1, np.zeros((1, 1), dtype=np.uint64))
    bits = coin_bits(seed, stream, m)
    iu, ju = np.triu_indices(n, 1)
    mat = np.zeros((n, n), dtype=bool)
    mat[iu, ju] = bits
    mat[ju, iu] = bits
    return Graph.from_dense(mat)


# ---------------------------------------------------------------------------
# Independent sets


@dataclass(frozen=True)
class IndependentSetReport:
    k: int
    count: int
    sets: tuple | None          # tuple of sorted vertex tuples, when enumerated
    all_disjoint: bool | None   # pairwise disjointness of the listed sets
    truncated: bool = False     # enumeration cap hit; count still exact

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "count": self.count,
            "sets": [list(s) for s in self.sets] if self.sets is not None else None,
            "all_disjoint": self.all_disjoint,
            "truncated": self.truncated,
        }


def _enumerate_cliques(masks: list[int], n: int, k: int, cap: int):
    """Python-side enumeration of k-cliques (ascending vertex order).
    Returns (sets, truncated); stops collecting past cap but keeps going
    is not needed since the exact count comes from the kernel."""
    out = []
    truncated = False

    full = (1 << n) - 1

    def rec(chosen, cand, depth):
        nonlocal truncated
        if truncated:
            return
        if depth == k:
            out.append(tuple(chosen))
            if len(out) > cap:
                truncated = True
            return
        c = cand
        while c:
            b = c & -c
            v = b.bit_length() - 1
            c ^= b
            if bin(c).count("1") + depth + 1 < k:
                # not enough candidates left after v either; keep looping
                pass
            chosen.append(v)
            rec(chosen, c & masks[v], depth + 1)
            chosen.pop()
            if truncated:
                return

    if k == 0:
        return [()], False
    rec([], full, 0)
    if truncated:
        return None, True
    return out, False


def count_independent_ksets(G: Graph, k: int, enumerate: bool = False,
                            cap: int = 10_000) -> IndependentSetReport:
    """Exact number of independent k-sets; optional enumeration.

    The count is a branch-and-bound over bitset candidate sets (clique
    search on the complement, depth k).  Enumeration is stored only when
    requested and the count fits under ``cap``; otherwise the count is
    still exact and the report is flagged truncated.
    """
    if k < 0 or k > G.n:
        raise DomainError(f"need 0 <= k <= n, got k={k}, n={G.n}")
    comp = G.complement()
    count, _nodes = _kernels.count_kcliques(
        comp.rows, G.n, G.W, k, 1 << 62, _EXACT_COUNT_CAP)
    count = int(count)
    sets = None
    disjoint = None
    truncated = False
    if enumerate:
        if count <= cap:
            found, _ = _enumerate_cliques(comp.row_masks(), G.n, k, cap)
            sets = tuple(tuple(sorted(s)) for s in found)
            assert len(sets) == count
            disjoint = _pairwise_disjoint(sets)
        else:
            truncated = True
    return IndependentSetReport(k=k, count=count, sets=sets,
                                all_disjoint=disjoint, truncated=truncated)


def count_independent_ksets_capped(G: Graph, k: int, count_cap: int) -> int:
    """Count independent k-sets, early-exiting with count_cap + 1 as soon
    as the count provably exceeds count_cap (rejection-sampling helper)."""
    comp = G.complement()
    count, _ = _kernels.count_kcliques(comp.rows, G.n, G.W, k, 1 << 62, count_cap)
    return int(count)


def _pairwise_disjoint(sets) -> bool:
    seen = set()
    for s in sets:
        for v in s:
            if v in seen:
                return False
            seen.add(v)
    return True


def all_disjoint(report: IndependentSetReport) -> bool:
    """Pairwise vertex-disjointness of the report's enumerated sets."""
    if report.sets is None:
        raise DomainError("report carries no enumerated sets")
    return _pairwise_disjoint(report.sets)


def independence_number(G: Graph) -> int:
    """Exact independence number (max clique of the complement)."""
    comp = G.complement()
    omega, complete, _ = _kernels.max_clique(comp.rows, G.n, G.W, 1 << 62)
    assert complete == 1
    return int(omega)


# ---------------------------------------------------------------------------
# Coloring


def greedy_coloring(G: Graph) -> list[int]:
    """Largest-degree-first greedy proper coloring (1-based colors)."""
    order = sorted(range(G.n), key=lambda v: (-G.degree(v), v))
    masks = G.row_masks()
    colors = [0] * G.n
    for v in order:
        used = {colors[u] for u in _mask_bits(masks[v]) if colors[u]}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return colors


def _mask_bits(m: int):
    while m:
        b = m & -m
        yield b.bit_length() - 1
        m ^= b


def is_proper_coloring(G: Graph, colors) -> bool:
    if len(colors) != G.n or any(c < 1 for c in colors):
        return False
    for u in range(G.n):
        for v in range(u + 1, G.n):
            if G.has_edge(u, v) and colors[u] == colors[v]:
                return False
    return True


@dataclass(frozen=True)
class ChromaticResult:
    """Exact chromatic number, or a (lower, upper) bracket when the
    budget ran out.  ``node_cap`` makes budget exhaustion replayable."""

    lower: int
    upper: int
    complete: bool
    nodes: int
    node_cap: int
    coloring: tuple | None = None

    @property
    def value(self) -> int:
        if not self.complete:
            raise DomainError("chromatic solve incomplete; only the bracket "
                              f"[{self.lower}, {self.upper}] is available")
        return self.upper

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "complete": self.complete,
            "nodes": self.nodes,
            "node_cap": self.node_cap,
        }


_INITIAL_NODE_CHUNK = 200_000


def chromatic_number(G: Graph, budget_ms: int | None = None,
                     node_cap: int | None = None) -> ChromaticResult:
    """Exact chromatic number by DSATUR branch and bound.

    Clique lower bound, greedy upper bound.  With ``budget_ms``, the
    search restarts with doubling node caps until the wall clock budget
    is spent; the final cap is recorded so exhaustion is reproducible in
    node terms.  With ``node_cap`` the solve is fully deterministic.
    """
    n = G.n
    if n == 0:
        raise DomainError("empty graph")
    greedy = greedy_coloring(G)
    ub = max(greedy)
    omega, ccomp, _ = _kernels.max_clique(G.rows, n, G.W, 1 << 62)
    lb = int(omega)
    greedy_arr = np.array(greedy, dtype=np.int64)
    if lb == ub:
        return ChromaticResult(lower=lb, upper=ub, complete=True, nodes=0,
                               node_cap=0, coloring=tuple(greedy))
    if ub > 64:
        raise DomainError("greedy bound above 64 colors; out of desk scale")

    caps: list[int]
    if node_cap is not None:
        caps = [node_cap]
        deadline = None
    else:
        caps = []
        deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000.0

    cap = node_cap if node_cap is not None else _INITIAL_NODE_CHUNK
    total_nodes = 0
    while True:
        best, colors, complete, nodes = _kernels.dsatur_exact(
            G.rows, n, G.W, lb, ub, greedy_arr, cap)
        total_nodes += int(nodes)
        if complete == 1:
            return ChromaticResult(lower=int(best), upper=int(best), complete=True,
                                   nodes=total_nodes, node_cap=cap,
                                   coloring=tuple(int(c) for c in colors))
        if node_cap is not None:
            return ChromaticResult(lower=lb, upper=int(best), complete=False,
                                   nodes=total_nodes, node_cap=cap)
        if deadline is not None and time.monotonic() >= deadline:
            return ChromaticResult(lower=lb, upper=int(best), complete=False,
                                   nodes=total_nodes, node_cap=cap)
        cap *= 2


def count_triangles(G: Graph) -> int:
    """Number of triangles via row intersections."""
    total = 0
    masks = G.row_masks()
    for u in range(G.n):
        mu = masks[u]
        for v in _mask_bits(mu):
            if v > u:
                total += bin(mu & masks[v] & ~((1 << (v + 1)) - 1)).count("1")
    return total
