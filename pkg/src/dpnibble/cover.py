"""DP-cover data model: per-vertex color lists plus a cover graph over colors.

A cover pairs a base graph with a graph ``H`` on color ids such that the
per-vertex lists partition the colors, every list is independent in ``H``,
and the ``H``-edges between two lists form a matching that may be nonempty
only across a base edge.  A proper coloring picks one color per vertex with
no two picks adjacent in ``H``.

Covers carry optional ``vertex_labels`` / ``color_labels`` arrays mapping the
dense local ids of a derived cover (after trimming or taking residuals) back
to the ids of the cover it came from; the pipeline uses them to lift partial
colorings.  Labels are metadata and play no role in validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CoverValidationError, GenerationError
from .graph import Graph, induced_subgraph, max_degree


@dataclass(frozen=True)
class Violation:
    """One structural defect found by :func:`validate`."""

    kind: str
    ids: tuple

    def __str__(self):
        return f"{self.kind}{self.ids}"


class DpCover:
    """Immutable cover: base graph, cover graph, and the list partition."""

    __slots__ = ("base", "cover", "owner", "lptr", "lcolors",
                 "vertex_labels", "color_labels")

    def __init__(self, base: Graph, cover: Graph, lists: Sequence[np.ndarray],
                 vertex_labels: np.ndarray | None = None,
                 color_labels: np.ndarray | None = None):
        if len(lists) != base.vertex_count:
            raise ValueError("need one list per base vertex")
        self.base = base
        self.cover = cover
        lptr = np.zeros(base.vertex_count + 1, dtype=np.int64)
        for v, lst in enumerate(lists):
            lptr[v + 1] = lptr[v] + len(lst)
        lcolors = np.concatenate([np.sort(np.asarray(lst, dtype=np.int64))
                                  for lst in lists]) if lptr[-1] else np.zeros(0, np.int64)
        if lcolors.size and (lcolors.min() < 0 or lcolors.max() >= cover.vertex_count):
            raise ValueError("list entries must be color ids of the cover graph")
        owner = np.full(cover.vertex_count, -1, dtype=np.int64)
        for v in range(base.vertex_count):
            owner[lcolors[lptr[v]:lptr[v + 1]]] = v
        self.owner = owner
        self.lptr = lptr
        self.lcolors = lcolors
        self.vertex_labels = (np.arange(base.vertex_count, dtype=np.int64)
                              if vertex_labels is None else np.asarray(vertex_labels, np.int64))
        self.color_labels = (np.arange(cover.vertex_count, dtype=np.int64)
                             if color_labels is None else np.asarray(color_labels, np.int64))
        for a in (self.owner, self.lptr, self.lcolors,
                  self.vertex_labels, self.color_labels):
            a.flags.writeable = False

    # -- accessors ---------------------------------------------------------

    @property
    def num_colors(self) -> int:
        return self.cover.vertex_count

    def lists(self, v: int) -> np.ndarray:
        """Sorted color ids available to base vertex ``v``."""
        return self.lcolors[self.lptr[v]:self.lptr[v + 1]]

    def list_of(self, c: int) -> int:
        """Owning base vertex of color ``c``."""
        return int(self.owner[c])

    def list_sizes(self) -> np.ndarray:
        return np.diff(self.lptr)

    def all_lists(self) -> list[np.ndarray]:
        return [self.lists(v) for v in range(self.base.vertex_count)]

    def __repr__(self):
        return (f"DpCover(n={self.base.vertex_count}, colors={self.num_colors}, "
                f"cover_edges={self.cover.num_edges})")


@dataclass
class PartialColoring:
    """Assignment of a color id (or -1 for blank) to each base vertex."""

    assignment: np.ndarray

    @classmethod
    def blank(cls, n: int) -> "PartialColoring":
        return cls(np.full(n, -1, dtype=np.int64))

    def domain(self) -> np.ndarray:
        return np.nonzero(self.assignment >= 0)[0]

    def image(self) -> np.ndarray:
        return self.assignment[self.assignment >= 0]

    def is_total(self) -> bool:
        return bool(np.all(self.assignment >= 0))

    def as_dict(self) -> dict[int, int]:
        return {int(v): int(c) for v, c in enumerate(self.assignment) if c >= 0}


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def validate(c: DpCover, max_violations: int = 1000) -> list[Violation]:
    """All structural defects of a cover; empty list iff the cover is valid."""
    out: list[Violation] = []

    def add(kind, *ids):
        if len(out) < max_violations:
            out.append(Violation(kind, tuple(int(i) for i in ids)))

    # partition: every color in exactly one list, owners consistent
    seen = np.zeros(c.num_colors, dtype=np.int64)
    if c.lcolors.size:
        np.add.at(seen, c.lcolors, 1)
    for col in np.nonzero(seen == 0)[0]:
        add("color-in-no-list", col)
    for col in np.nonzero(seen > 1)[0]:
        add("color-in-multiple-lists", col)

    edges = c.cover.edge_array()
    if edges.size == 0:
        return out
    u = c.owner[edges[:, 0]]
    v = c.owner[edges[:, 1]]
    placed = (u >= 0) & (v >= 0)  # partition defects already reported

    same = placed & (u == v)
    for i in np.nonzero(same)[0]:
        add("list-not-independent", u[i], edges[i, 0], edges[i, 1])

    cross = placed & ~same
    n = c.base.vertex_count
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    base_keys = np.sort(c.base.edge_array()[:, 0] * n + c.base.edge_array()[:, 1]) \
        if c.base.indices.size else np.zeros(0, np.int64)
    pos = np.searchsorted(base_keys, lo * n + hi)
    backed = np.zeros(edges.shape[0], dtype=bool)
    inr = pos < base_keys.size
    backed[inr] = base_keys[pos[inr]] == (lo * n + hi)[inr]
    for i in np.nonzero(cross & ~backed)[0]:
        add("cover-edge-without-base-edge", u[i], v[i], edges[i, 0], edges[i, 1])

    # matching: each color has at most one partner inside any one list
    good = cross & backed
    keys = np.concatenate([edges[good, 0] * n + v[good],
                           edges[good, 1] * n + u[good]])
    if keys.size:
        uniq, counts = np.unique(keys, return_counts=True)
        for key in uniq[counts > 1]:
            add("not-a-matching", int(key) % n, int(key) // n)
    return out


def require_valid(c: DpCover) -> DpCover:
    violations = validate(c)
    if violations:
        raise CoverValidationError(violations)
    return c


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def from_list_assignment(g: Graph, lists: Mapping[int, Iterable] | Sequence[Iterable]) -> DpCover:
    """Cover encoding an ordinary list assignment.

    Colors sharing a label across a base edge are matched; labels must be
    sortable.  Every vertex needs a nonempty label set.
    """
    n = g.vertex_count
    label_lists = []
    for v in range(n):
        labels = sorted(set(lists[v]))
        if not labels:
            raise ValueError(f"vertex {v} has an empty color list")
        label_lists.append(labels)
    lptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        lptr[v + 1] = lptr[v] + len(label_lists[v])
    index_of = [{lab: int(lptr[v]) + i for i, lab in enumerate(label_lists[v])}
                for v in range(n)]
    edges = []
    for u, v in g.edge_array():
        common = set(label_lists[u]) & set(label_lists[v])
        for lab in common:
            edges.append((index_of[u][lab], index_of[v][lab]))
    cover_graph = Graph.from_edges(int(lptr[-1]), edges)
    list_arrays = [np.arange(lptr[v], lptr[v + 1], dtype=np.int64) for v in range(n)]
    return DpCover(g, cover_graph, list_arrays)


def uniform_list_cover(g: Graph, ell: int) -> DpCover:
    """List cover where every vertex has the same ``ell`` labels."""
    return from_list_assignment(g, [range(ell)] * g.vertex_count)


def subcover(c: DpCover, keep_vertices: np.ndarray, kept_colors: Sequence[np.ndarray]) -> DpCover:
    """Induced cover on ``keep_vertices`` with per-vertex color subsets.

    ``kept_colors[i]`` lists the surviving colors of ``keep_vertices[i]`` in
    the ids of ``c``.  Vertices and colors are renumbered densely; labels are
    composed so they keep pointing at the originating cover's ancestors.
    """
    keep_vertices = np.asarray(keep_vertices, dtype=np.int64)
    nv = keep_vertices.size
    old_colors = (np.concatenate([np.asarray(k, np.int64) for k in kept_colors])
                  if nv else np.zeros(0, np.int64))
    old_colors = np.sort(old_colors)
    color_map = np.full(c.num_colors, -1, dtype=np.int64)
    color_map[old_colors] = np.arange(old_colors.size)
    vmap = np.full(c.base.vertex_count, -1, dtype=np.int64)
    vmap[keep_vertices] = np.arange(nv)

    new_base = induced_subgraph(c.base, vmap, nv)
    new_cover = induced_subgraph(c.cover, color_map, old_colors.size)

    new_lists = [color_map[np.sort(np.asarray(k, np.int64))] for k in kept_colors]
    return DpCover(
        new_base, new_cover, new_lists,
        vertex_labels=c.vertex_labels[keep_vertices],
        color_labels=c.color_labels[old_colors],
    )


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def trim(c: DpCover, ell: int) -> DpCover:
    """Reduce every list to exactly ``ell`` colors, dropping the largest ids.

    Base edges whose cross-matching becomes empty are deleted afterwards, so
    the base max degree is at most ``ell`` times the cover max degree.
    """
    n = c.base.vertex_count
    kept_colors = []
    for v in range(n):
        lst = c.lists(v)
        if lst.size < ell:
            raise ValueError(f"vertex {v} has only {lst.size} colors, need {ell}")
        kept_colors.append(lst[:ell])
    trimmed = subcover(c, np.arange(n, dtype=np.int64), kept_colors)
    # drop base edges that no longer carry any cover edge
    carrying = set()
    for c1, c2 in trimmed.cover.edge_array():
        u, v = int(trimmed.owner[c1]), int(trimmed.owner[c2])
        carrying.add((min(u, v), max(u, v)))
    base_edges = [e for e in map(tuple, trimmed.base.edge_array()) if e in carrying]
    new_base = Graph.from_edges(n, base_edges)
    return DpCover(new_base, trimmed.cover, trimmed.all_lists(),
                   vertex_labels=trimmed.vertex_labels,
                   color_labels=trimmed.color_labels)


def residual(c: DpCover, phi: PartialColoring, kept: Mapping[int, np.ndarray] | Sequence[np.ndarray]) -> DpCover:
    """Induced cover on blank vertices with lists restricted to ``kept``."""
    blanks = np.nonzero(phi.assignment < 0)[0]
    kept_lists = [np.asarray(kept[int(v)], dtype=np.int64) for v in blanks]
    for v, lst in zip(blanks, kept_lists):
        own = c.lists(int(v))
        if np.setdiff1d(lst, own).size:
            raise ValueError(f"kept colors of vertex {v} are not a subset of its list")
    return subcover(c, blanks, kept_lists)


def regularize(c: DpCover, d: int, s: int, t: int, seed: int,
               gamma_budget: int = 64) -> DpCover:
    """Embed the cover into one whose cover graph is exactly ``d``-regular.

    Takes ``k`` disjoint copies of the input, where ``k`` is the order of an
    auxiliary ``N``-regular graph of girth at least 5 and ``N`` is the total
    degree deficiency, then adds one cover edge (plus the corresponding base
    edge) per auxiliary edge, always consuming the smallest deficient color
    ids first.  Girth 5 of the auxiliary graph is what keeps the output free
    of complete bipartite subgraphs that the input did not contain.  The
    input embeds as copy 0.
    """
    from .generators import girth5_auxiliary

    degs = c.cover.degrees() if c.num_colors else np.zeros(0, np.int64)
    if degs.size and int(degs.max()) > d:
        raise ValueError(f"cover max degree {int(degs.max())} exceeds target {d}")
    deficiency = (d - degs).astype(np.int64)
    n_total = int(deficiency.sum())
    if n_total == 0:
        return c

    gamma = girth5_auxiliary(n_total, seed, budget=gamma_budget)
    k = gamma.vertex_count

    nb = c.base.vertex_count
    nc = c.num_colors
    base_edges = [(u + i * nb, v + i * nb) for i in range(k)
                  for u, v in map(tuple, c.base.edge_array())]
    cover_edges = [(a + i * nc, b + i * nc) for i in range(k)
                   for a, b in map(tuple, c.cover.edge_array())]

    # per-copy queues of deficient colors, smallest id first, with remaining
    # capacity; aux edges processed in lexicographic order
    deficient = np.nonzero(deficiency > 0)[0]
    remaining = [dict((int(col), int(deficiency[col])) for col in deficient)
                 for _ in range(k)]
    queues = [sorted(deficient.tolist()) for _ in range(k)]

    def take(copy: int) -> int:
        q = queues[copy]
        col = q[0]
        rem = remaining[copy]
        rem[col] -= 1
        if rem[col] == 0:
            q.pop(0)
        return col

    for i, j in map(tuple, gamma.edge_array()):
        ci = take(int(i))
        cj = take(int(j))
        cover_edges.append((ci + int(i) * nc, cj + int(j) * nc))
        base_edges.append((int(c.owner[ci]) + int(i) * nb,
                           int(c.owner[cj]) + int(j) * nb))

    if any(q for q in queues):
        raise GenerationError("regularization left unconsumed deficiencies")

    new_base = Graph.from_edges(nb * k, base_edges)
    new_cover = Graph.from_edges(nc * k, cover_edges)
    new_lists = [c.lists(v % nb) + (v // nb) * nc for v in range(nb * k)]
    out = DpCover(new_base, new_cover, new_lists)
    if max_degree(out.cover) != d or int(out.cover.degrees().min()) != d:
        raise GenerationError("regularization failed to reach exact regularity")
    return out


# ---------------------------------------------------------------------------
# cover file format: one JSON document
# ---------------------------------------------------------------------------


def cover_to_json(c: DpCover) -> str:
    doc = {
        "base": {
            "vertex_count": c.base.vertex_count,
            "edges": c.base.edge_array().tolist(),
        },
        "lists": [lst.tolist() for lst in c.all_lists()],
        "cover_edges": c.cover.edge_array().tolist(),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def cover_from_json(text: str) -> DpCover:
    """Parse and validate a cover document; refuses invalid covers."""
    doc = json.loads(text)
    base_edges = np.asarray(doc["base"]["edges"], dtype=np.int64).reshape(-1, 2)
    base = Graph.from_edges(int(doc["base"]["vertex_count"]), base_edges)
    lists = [np.asarray(lst, dtype=np.int64) for lst in doc["lists"]]
    num_colors = int(sum(len(lst) for lst in lists))
    cover_edges = np.asarray(doc["cover_edges"], dtype=np.int64).reshape(-1, 2)
    cover_graph = Graph.from_edges(num_colors, cover_edges)
    cov = DpCover(base, cover_graph, lists)
    return require_valid(cov)
