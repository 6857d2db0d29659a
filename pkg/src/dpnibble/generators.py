"""Reproducible instance generators.

Everything here is a deterministic function of its full parameter set
including the seed.  Regular graphs come from the pairing (configuration)
model with rejection of loops and parallel edges; girth-5 regular graphs are
obtained by rejection, then local edge-swap repair of 3- and 4-cycles, and,
at densities where local search cannot work (roughly ``n`` close to ``d^2``,
where only near-extremal structures exist), from the incidence graph of a
projective plane with a seeded random relabeling.
"""

from __future__ import annotations

import math
from collections import defaultdict
from itertools import combinations

import numpy as np

from ._rng import derive_seed, normalize_seed
from .cover import DpCover
from .errors import GenerationError
from .graph import Graph, contains_kst, has_cycle_up_to_4


def _rng(seed: int, tag: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(normalize_seed(seed), tag))


# ---------------------------------------------------------------------------
# regular graphs
# ---------------------------------------------------------------------------


def random_regular(n: int, d: int, seed: int, max_tries: int = 200) -> Graph:
    """Random simple ``d``-regular graph on ``n`` vertices (pairing model)."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    if (n * d) % 2 != 0:
        raise ValueError("n*d must be even")
    if d >= n:
        raise ValueError("need d < n")
    if d == 0:
        return Graph.empty(n)
    rng = _rng(seed)
    for _ in range(max_tries):
        edges = _pairing_attempt(n, d, rng)
        if edges is not None:
            return Graph.from_edges(n, edges)
    raise GenerationError(f"pairing model failed for (n={n}, d={d}) after {max_tries} tries")


def _pairing_attempt(n: int, d: int, rng: np.random.Generator):
    """One run of the stub-matching heuristic; None when it wedges."""
    edges: set[tuple[int, int]] = set()
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    while stubs.size:
        rng.shuffle(stubs)
        leftovers: dict[int, int] = defaultdict(int)
        for k in range(0, stubs.size - 1, 2):
            s1, s2 = int(stubs[k]), int(stubs[k + 1])
            if s1 > s2:
                s1, s2 = s2, s1
            if s1 != s2 and (s1, s2) not in edges:
                edges.add((s1, s2))
            else:
                leftovers[s1] += 1
                leftovers[s2] += 1
        if leftovers and not _has_suitable_pair(edges, leftovers):
            return None
        stubs = np.array([v for v, cnt in leftovers.items() for _ in range(cnt)],
                         dtype=np.int64)
    return edges


def _has_suitable_pair(edges, leftovers) -> bool:
    keys = list(leftovers)
    for i, s1 in enumerate(keys):
        for s2 in keys[i + 1:]:
            a, b = (s1, s2) if s1 < s2 else (s2, s1)
            if (a, b) not in edges:
                return True
    return False


# ---------------------------------------------------------------------------
# girth >= 5 regular graphs
# ---------------------------------------------------------------------------


def _ball3_size(d: int) -> int:
    return 1 + d + d * (d - 1) + d * (d - 1) ** 2


def _expected_short_cycles(d: int) -> float:
    return (d - 1) ** 3 / 6 + (d - 1) ** 4 / 8


def _find_short_cycle(adj: list[set[int]]):
    """Edges of some triangle or 4-cycle, or None."""
    n = len(adj)
    for u in range(n):
        nb = sorted(adj[u])
        for i in range(len(nb)):
            for j in range(i + 1, len(nb)):
                a, b = nb[i], nb[j]
                if b in adj[a]:
                    return [(u, a), (a, b), (b, u)]
    # 4-cycles: two vertices with two common neighbors
    seen: dict[tuple[int, int], int] = {}
    for x in range(n):
        nb = sorted(adj[x])
        for i in range(len(nb)):
            for j in range(i + 1, len(nb)):
                key = (nb[i], nb[j])
                if key in seen:
                    w = seen[key]
                    return [(nb[i], w), (w, nb[j]), (nb[j], x), (x, nb[i])]
                seen[key] = x
    return None


def _swap_repair(g: Graph, rng: np.random.Generator, max_swaps: int) -> Graph | None:
    """Break 3/4-cycles with degree-preserving double edge swaps."""
    adj = [set(g.neighbors(v).tolist()) for v in range(g.vertex_count)]
    edges = [tuple(e) for e in g.edge_array().tolist()]
    edge_pos = {e: i for i, e in enumerate(edges)}

    def remove_edge(a, b):
        key = (a, b) if a < b else (b, a)
        i = edge_pos.pop(key)
        last = edges[-1]
        edges[i] = last
        if last != key:
            edge_pos[last] = i
        edges.pop()
        adj[a].discard(b)
        adj[b].discard(a)

    def add_edge(a, b):
        key = (a, b) if a < b else (b, a)
        edge_pos[key] = len(edges)
        edges.append(key)
        adj[a].add(b)
        adj[b].add(a)

    for _ in range(max_swaps):
        cyc = _find_short_cycle(adj)
        if cyc is None:
            return Graph.from_edges(g.vertex_count, edges)
        a, b = cyc[int(rng.integers(len(cyc)))]
        for _ in range(64):
            x, y = edges[int(rng.integers(len(edges)))]
            if rng.integers(2):
                x, y = y, x
            if len({a, b, x, y}) < 4:
                continue
            if x in adj[a] or y in adj[b]:
                continue
            remove_edge(a, b)
            remove_edge(x if x < y else y, y if x < y else x)
            add_edge(a, x)
            add_edge(b, y)
            break
    return None


def random_girth5_regular(n: int, d: int, seed: int,
                          rejection_tries: int = 40,
                          repair_tries: int = 8) -> Graph:
    """``d``-regular graph on ``n`` vertices with girth at least 5.

    Strategy: plain rejection while the expected short-cycle count is small;
    then rejection plus swap repair while a repair step is expected to make
    progress (radius-3 balls clearly smaller than the graph); then, near the
    extremal density where neither can work, the projective-plane incidence
    graph when ``(n, d)`` matches one, relabeled by the seed.  The result is
    always verified before being returned.
    """
    if d <= 2:
        # 0/1/2-regular graphs: cycles of length >= 5 cover all valid cases
        if d < 2:
            g = random_regular(n, d, seed)
        else:
            g = _union_of_long_cycles(n, seed)
        _check_girth5(g)
        return g
    if n <= d * d:
        raise ValueError(f"need n > d^2 for girth 5 headroom (n={n}, d={d})")

    lam = _expected_short_cycles(d)
    if lam <= 14:
        # success rate per sample is roughly exp(-lam); scale tries to match
        tries = min(3000, max(rejection_tries, int(12 * math.exp(lam))))
        for k in range(tries):
            g = random_regular(n, d, seed + k)
            if not has_cycle_up_to_4(g):
                return g

    if _ball3_size(d) <= 0.7 * n:
        budget = int(40 * (lam + 10))
        for k in range(repair_tries):
            g = random_regular(n, d, seed + 1000 + k)
            repaired = _swap_repair(g, _rng(seed, 7000 + k), budget)
            if repaired is not None and not has_cycle_up_to_4(repaired):
                _check_degrees(repaired, d)
                return repaired

    q = d - 1
    if _is_prime(q) and n == 2 * (q * q + q + 1):
        g = incidence_graph(q, seed)
        _check_girth5(g)
        return g

    feasible = 2 * ((d - 1) ** 2 + (d - 1) + 1) if _is_prime(d - 1) else None
    hint = f"; nearest incidence-graph order for d={d} is n={feasible}" if feasible else ""
    raise GenerationError(
        f"cannot reach girth 5 at (n={n}, d={d}): too dense for local repair"
        f" and no algebraic construction at this exact order{hint}")


def _union_of_long_cycles(n: int, seed: int) -> Graph:
    if n < 5:
        raise ValueError("2-regular girth-5 graphs need n >= 5")
    perm = _rng(seed, 3).permutation(n)
    edges = [(int(perm[i]), int(perm[(i + 1) % n])) for i in range(n)]
    return Graph.from_edges(n, edges)


def _check_degrees(g: Graph, d: int):
    degs = g.degrees()
    if degs.size and (degs.min() != d or degs.max() != d):
        raise GenerationError("repair broke regularity")


def _check_girth5(g: Graph):
    if has_cycle_up_to_4(g):
        raise GenerationError("construction produced a short cycle")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for f in range(2, int(math.isqrt(p)) + 1):
        if p % f == 0:
            return False
    return True


def incidence_graph(q: int, seed: int) -> Graph:
    """Point-line incidence graph of the projective plane of prime order ``q``.

    A (q+1)-regular bipartite graph on ``2(q^2+q+1)`` vertices with girth 6,
    relabeled by a seeded random permutation.  This is the instance family
    for girth-5 regular graphs at densities local search cannot reach.
    """
    if not _is_prime(q):
        raise ValueError(f"prime order required, got {q}")
    pts = [(1, x, y) for x in range(q) for y in range(q)]
    pts += [(0, 1, x) for x in range(q)]
    pts.append((0, 0, 1))
    arr = np.array(pts, dtype=np.int64)
    inc = (arr @ arr.T) % q == 0
    npts = arr.shape[0]
    rows, cols = np.nonzero(inc)
    n = 2 * npts
    perm = _rng(seed, 11).permutation(n).astype(np.int64)
    edges = np.stack([perm[rows], perm[cols + npts]], axis=1)
    return Graph.from_edges(n, edges)


def girth5_auxiliary(regular_degree: int, seed: int, budget: int = 6) -> Graph:
    """Auxiliary regular girth-5 graph used by cover regularization.

    Explicit for degrees 1 and 2; sampled (with swap repair) for degree >= 3,
    starting at ``max(N^2+2, 50)`` vertices and doubling on failure up to
    ``budget`` times.
    """
    n_reg = regular_degree
    if n_reg == 0:
        return Graph.empty(1)
    if n_reg == 1:
        return Graph.from_edges(2, [(0, 1)])
    if n_reg == 2:
        return Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    n = max(n_reg * n_reg + 2, 50)
    attempts = []
    for doubling in range(budget):
        if (n * n_reg) % 2 != 0:
            n += 1
        try:
            return random_girth5_regular(n, n_reg, seed + 131 * doubling)
        except (GenerationError, ValueError) as exc:
            attempts.append(f"n={n}: {exc}")
            n *= 2
    raise GenerationError(
        f"no girth-5 {n_reg}-regular auxiliary graph within budget; attempts: "
        + " | ".join(attempts))


# ---------------------------------------------------------------------------
# covers
# ---------------------------------------------------------------------------


def random_dp_cover(g: Graph, ell: int, rho: float, seed: int) -> DpCover:
    """Cover with lists of size ``ell`` and tunable matching density.

    Each base edge gets a uniformly random bijection between the two lists,
    thinned independently at rate ``rho``; ``rho=1`` gives perfect matchings,
    so the cover degree of every color equals its vertex's base degree.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must be in [0, 1]")
    n = g.vertex_count
    rng = _rng(seed, 23)
    cover_edges = []
    for u, v in map(tuple, g.edge_array()):
        perm = rng.permutation(ell)
        mask = rng.random(ell) < rho
        for j in np.nonzero(mask)[0]:
            cover_edges.append((u * ell + int(j), v * ell + int(perm[j])))
    cover_graph = Graph.from_edges(n * ell, cover_edges)
    lists = [np.arange(v * ell, (v + 1) * ell, dtype=np.int64) for v in range(n)]
    return DpCover(g, cover_graph, lists)


def kst_free_bipartite(m: int, n: int, s: int, t: int, seed: int) -> Graph:
    """Bipartite graph with no K_{s,t} whose s-side lies in the m-part.

    Greedy seeded construction: candidate edges in random order, each added
    only if no forbidden complete bipartite subgraph appears; verified
    exactly before returning.  Vertices ``0..m-1`` form X, ``m..m+n-1`` form
    Y.
    """
    if m < n:
        raise ValueError("orient the larger side first: need m >= n")
    if min(n, s, t) < 1:
        raise ValueError("n, s, t must be >= 1")
    rng = _rng(seed, 31)
    adj_x: list[set[int]] = [set() for _ in range(m)]
    adj_y: list[set[int]] = [set() for _ in range(n)]
    order = rng.permutation(m * n)
    for key in order:
        x, y = int(key) // n, int(key) % n
        if _would_create_kst(adj_x, adj_y, x, y, s, t):
            continue
        adj_x[x].add(y)
        adj_y[y].add(x)
    edges = [(x, m + y) for x in range(m) for y in sorted(adj_x[x])]
    g = Graph.from_edges(m + n, edges)
    assert not contains_kst(g, s, t, left=range(m), right=range(m, m + n))
    return g


def _would_create_kst(adj_x, adj_y, x, y, s, t) -> bool:
    """Exact check: does adding edge (x, y) complete some K_{s,t}?"""
    new_nx = adj_x[x] | {y}
    if s == 1:
        return len(new_nx) >= t
    others = [u for u in adj_y[y] if u != x]
    if len(others) < s - 1:
        return False
    for group in combinations(sorted(others), s - 1):
        inter = set(new_nx)
        for u in group:
            inter &= adj_x[u]
            if len(inter) < t:
                break
        if len(inter) >= t:
            return True
    return False
