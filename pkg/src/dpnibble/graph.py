"""Simple undirected graphs and the structural queries the engine needs.

Vertices are dense integers ``0..n-1``.  Adjacency is stored in CSR form
(``indptr``/``indices``) with each row sorted, which keeps runs reproducible
and feeds the numba kernels directly.  Graphs are immutable after
construction; every query here is pure.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Sequence

import numpy as np

from .errors import BudgetExceededError

INFINITE = math.inf

# work estimate above which brute-force complete-bipartite detection refuses
DEFAULT_KST_BUDGET = 2 * 10**8


class Graph:
    """Immutable simple undirected graph on vertices ``0..vertex_count-1``."""

    __slots__ = ("vertex_count", "indptr", "indices")

    def __init__(self, vertex_count: int, indptr: np.ndarray, indices: np.ndarray):
        self.vertex_count = int(vertex_count)
        self.indptr = indptr
        self.indices = indices
        indptr.flags.writeable = False
        indices.flags.writeable = False

    # -- constructors ------------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from an edge list or (m, 2) array; rejects loops, duplicates,
        and out-of-range ids."""
        if isinstance(edges, np.ndarray):
            e = edges.astype(np.int64, copy=False).reshape(-1, 2)
        else:
            e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise ValueError(f"edge endpoint out of range [0, {n})")
            if np.any(e[:, 0] == e[:, 1]):
                bad = e[e[:, 0] == e[:, 1]][0]
                raise ValueError(f"self-loop at vertex {bad[0]}")
            lo = np.minimum(e[:, 0], e[:, 1])
            hi = np.maximum(e[:, 0], e[:, 1])
            keys = lo * n + hi
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate edge in edge list")
            src = np.concatenate([lo, hi])
            dst = np.concatenate([hi, lo])
        else:
            src = np.zeros(0, dtype=np.int64)
            dst = np.zeros(0, dtype=np.int64)
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, dst.astype(np.int64))

    # -- basic queries -----------------------------------------------------

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    @property
    def adjacency(self) -> list[np.ndarray]:
        """Per-vertex sorted neighbor arrays (read-only views)."""
        return [self.neighbors(v) for v in range(self.vertex_count)]

    def edge_array(self) -> np.ndarray:
        """All edges as an (m, 2) array with u < v, lexicographically sorted."""
        src = np.repeat(np.arange(self.vertex_count, dtype=np.int64), self.degrees())
        mask = src < self.indices
        return np.stack([src[mask], self.indices[mask]], axis=1)

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.vertex_count == other.vertex_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash((self.vertex_count, self.indices.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.vertex_count}, m={self.num_edges})"


def induced_subgraph(g: Graph, vmap: np.ndarray, new_n: int) -> Graph:
    """Induced subgraph under a monotone renumbering.

    ``vmap`` sends each old vertex to its new id or -1 to drop it; kept ids
    must be assigned in increasing order, which lets the CSR rows be filtered
    without re-sorting.
    """
    if g.indices.size == 0:
        return Graph.empty(new_n)
    edge_src = np.repeat(np.arange(g.vertex_count, dtype=np.int64), g.degrees())
    keep = (vmap[edge_src] >= 0) & (vmap[g.indices] >= 0)
    new_src = vmap[edge_src[keep]]
    new_dst = vmap[g.indices[keep]]
    indptr = np.zeros(new_n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(new_src, minlength=new_n))
    return Graph(new_n, indptr, new_dst)


def max_degree(g: Graph) -> int:
    """Maximum vertex degree; 0 for the empty graph."""
    if g.vertex_count == 0:
        return 0
    return int(g.degrees().max(initial=0))


def girth(g: Graph) -> float:
    """Length of the shortest cycle, or ``math.inf`` for forests.

    BFS from every vertex with early exit once the current best cannot be
    improved.  Exact for all simple graphs; intended for graphs up to around
    10^4 vertices.
    """
    from ._kernels import girth_dispatch

    return girth_dispatch(g.indptr, g.indices, g.vertex_count)


def girth_python(indptr: np.ndarray, indices: np.ndarray, n: int) -> float:
    """Pure-Python BFS girth (fallback path and small-graph oracle)."""
    best = -1  # -1 encodes "no cycle yet"
    dist = np.empty(n, dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    for root in range(n):
        dist.fill(-1)
        dist[root] = 0
        parent[root] = -1
        dq = deque([root])
        while dq:
            u = dq.popleft()
            du = dist[u]
            if best >= 0 and 2 * du >= best - 1:
                continue
            for w in indices[indptr[u]:indptr[u + 1]]:
                if dist[w] < 0:
                    dist[w] = du + 1
                    parent[w] = u
                    dq.append(w)
                elif w != parent[u]:
                    c = du + dist[w] + 1
                    if best < 0 or c < best:
                        best = c
    return INFINITE if best < 0 else float(best)


def kst_edge_bound(m: int, n: int, s: int, t: int) -> float:
    """Edge-count upper bound for bipartite graphs with no K_{s,t}.

    Parts of sizes ``m >= n``; the forbidden complete bipartite subgraph has
    its ``s`` side in the part of size ``m``.
    """
    if m < n:
        raise ValueError(f"require m >= n, got m={m} < n={n}")
    if min(m, n, s, t) < 1:
        raise ValueError("m, n, s, t must all be >= 1")
    return s ** (1.0 / t) * m ** (1.0 - 1.0 / t) * n + t * m


def contains_kst(
    g: Graph,
    s: int,
    t: int,
    left: Sequence[int] | None = None,
    right: Sequence[int] | None = None,
    budget: int = DEFAULT_KST_BUDGET,
) -> bool:
    """Exact detection of a complete bipartite subgraph K_{s,t}.

    With ``left``/``right`` given (disjoint vertex sets), looks for ``s``
    vertices in ``left`` and ``t`` in ``right`` inducing a complete bipartite
    subgraph.  Without them, checks the whole graph over all disjoint
    placements.  Branches over s-subsets by common-neighborhood intersection:
    a subset is extended only by vertices still adjacent to at least ``t``
    members of the running intersection.  Work is metered; when it would
    exceed ``budget`` (for the two-sided form, also when the subset-count
    guard ``C(|left|,s)*C(|right|,t)`` does) the search refuses with
    :class:`BudgetExceededError` rather than approximating.
    """
    if s < 1 or t < 1:
        raise ValueError("s and t must be >= 1")
    if (left is None) != (right is None):
        raise ValueError("left and right must be given together")

    if left is not None:
        left_list = sorted(set(int(v) for v in left))
        right_set = frozenset(int(v) for v in right)
        if right_set & set(left_list):
            raise ValueError("left and right must be disjoint")
        guard = math.comb(len(left_list), s) * math.comb(len(right_set), t)
        if guard > budget:
            raise BudgetExceededError(
                f"K_(s,t) subset guard: C({len(left_list)},{s})*C({len(right_set)},{t})"
                f" = {guard} exceeds budget {budget}")
        cand_set = set(left_list)
        restrict = right_set
    else:
        # whole-graph mode: an s-subset with >= t common neighbors is exactly
        # a K_{s,t} (a common neighbor is never inside the subset)
        cand_set = set(range(g.vertex_count))
        restrict = None
    return _search_subsets(g, cand_set, s, t, restrict, budget)


def _search_subsets(g: Graph, cand_set: set[int], s: int, t: int,
                    restrict, budget: int) -> bool:
    """DFS over s-subsets; the intersection of neighborhoods only shrinks."""
    work = 0

    def charge(units: int):
        nonlocal work
        work += units
        if work > budget:
            raise BudgetExceededError(
                f"K_(s,t) search spent over {budget} work units")

    def extensions(inter: frozenset, min_id: int) -> list[int]:
        """Vertices above ``min_id`` adjacent to >= t members of ``inter``."""
        counts: dict[int, int] = {}
        for y in inter:
            row = g.neighbors(y)
            charge(row.size)
            for x in row.tolist():
                if x > min_id and x in cand_set:
                    counts[x] = counts.get(x, 0) + 1
        return sorted(x for x, cnt in counts.items() if cnt >= t)

    def nbrs(v: int) -> frozenset:
        ns = frozenset(g.neighbors(v).tolist())
        return ns & restrict if restrict is not None else ns

    def rec(v: int, depth: int, inter: frozenset) -> bool:
        if depth == s:
            return True
        for x in extensions(inter, v):
            new = inter & nbrs(x)
            charge(len(inter))
            if len(new) >= t and rec(x, depth + 1, new):
                return True
        return False

    for v in sorted(cand_set):
        first = nbrs(v)
        charge(g.degree(v))
        if len(first) >= t and (s == 1 or rec(v, 1, first)):
            return True
    return False


def has_cycle_up_to_4(g: Graph) -> bool:
    """True iff the graph contains a triangle or a 4-cycle.

    Dense common-neighbor counting; used by generators to test girth >= 5
    quickly without computing the exact girth.
    """
    n = g.vertex_count
    if n == 0 or g.indices.size == 0:
        return False
    if n <= 4096:
        # float32 matmul hits BLAS; counts are < 2^24 so they stay exact
        a = np.zeros((n, n), dtype=np.float32)
        src = np.repeat(np.arange(n, dtype=np.int64), g.degrees())
        a[src, g.indices] = 1.0
        common = a @ a
        if np.any((common >= 1.0) & (a == 1.0)):
            return True
        np.fill_diagonal(common, 0.0)
        return bool(np.any(common >= 2.0))
    # sparse path: count vertex pairs at distance 2 via each middle vertex
    seen: dict[int, int] = {}
    for x in range(n):
        row = g.neighbors(x)
        for i in range(row.size):
            u = int(row[i])
            for j in range(i + 1, row.size):
                w = int(row[j])
                if g.has_edge(u, w):
                    return True
                key = u * n + w
                if key in seen:
                    return True
                seen[key] = x
    return False


# -- edge-list text format -------------------------------------------------
#
#   p <vertex_count>
#   e <u> <v>            (0-based, one line per edge)
#   # comment lines are ignored


def graph_to_text(g: Graph) -> str:
    lines = [f"p {g.vertex_count}"]
    for u, v in g.edge_array():
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    n = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ValueError(f"line {lineno}: repeated 'p' line")
            n = int(parts[1])
        elif parts[0] == "e":
            if n is None:
                raise ValueError(f"line {lineno}: 'e' before 'p'")
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise ValueError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise ValueError("missing 'p' line")
    return Graph.from_edges(n, edges)
