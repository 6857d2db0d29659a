"""Verification and empirical measurement utilities.

Four jobs: certify proper colorings, classify the two-step neighborhood of
an anchor color into concentration-friendly and problematic parts, estimate
per-round statistics by seeded Monte Carlo, and compute the same quantities
exactly by brute-force enumeration on micro instances (the oracle grounding
the closed forms and the Monte Carlo).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._rng import normalize_seed
from .cover import DpCover, PartialColoring
from .errors import BudgetExceededError
from .graph import Graph
from .nibble import RoundParams, keep_fn, uncolor_fn


# ---------------------------------------------------------------------------
# proper-coloring verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConflictWitness:
    vertex_u: int
    vertex_v: int
    color_u: int
    color_v: int


def verify_proper(c: DpCover, phi: PartialColoring) -> tuple[bool, ConflictWitness | None]:
    """True iff no cover edge joins two assigned colors.

    Raises ``ValueError`` if the coloring uses a color outside its vertex's
    list; returns a witness pair on failure.
    """
    a = phi.assignment
    if a.size != c.base.vertex_count:
        raise ValueError("coloring length does not match the base graph")
    assigned = a >= 0
    if np.any(assigned):
        owners_ok = c.owner[a[assigned]] == np.nonzero(assigned)[0]
        if not np.all(owners_ok):
            v = int(np.nonzero(assigned)[0][np.argmin(owners_ok)])
            raise ValueError(f"vertex {v} is assigned color {int(a[v])} outside its list")
    if c.cover.indices.size == 0:
        return True, None
    chosen = np.zeros(c.num_colors, dtype=bool)
    chosen[a[assigned]] = True
    e = c.cover.edge_array()
    bad = chosen[e[:, 0]] & chosen[e[:, 1]]
    if not np.any(bad):
        return True, None
    c1, c2 = map(int, e[int(np.argmax(bad))])
    return False, ConflictWitness(int(c.owner[c1]), int(c.owner[c2]), c1, c2)


# ---------------------------------------------------------------------------
# anchor-color structure classifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StructureReport:
    """Classification of the distance-<=2 colors around an anchor.

    A second-neighborhood color is *crowded* ("bad") when it has at least
    ``d^(1-delta)`` neighbors inside the anchor's neighborhood; an anchor
    neighbor is "sad" when at least ``d^(1-delta)`` of its neighbors are
    crowded.  ``sad_bound`` is the reference cap ``d^(1-beta2)`` the count is
    compared against (reported, not asserted: it only binds for large d).
    """

    anchor: int
    d: int
    t: int
    delta: float
    beta1: float
    beta2: float
    delta2: float
    tau: float
    bad: tuple[int, ...]
    good: tuple[int, ...]
    sad: tuple[int, ...]
    happy: tuple[int, ...]
    sad_bound: float

    @property
    def sad_within_bound(self) -> bool:
        return len(self.sad) <= self.sad_bound


def classify_structure(cover: Graph, anchor: int, d: int, t: int) -> StructureReport:
    """Exact bad/good/sad/happy partition around ``anchor`` in ``cover``."""
    if cover.degree(anchor) > d:
        raise ValueError(f"anchor degree {cover.degree(anchor)} exceeds d={d}")
    delta = 1.0 / (3.0 * t)
    threshold = d ** (1.0 - delta)
    nbrs = cover.neighbors(anchor)
    nbr_set = set(nbrs.tolist())
    common = {}
    for w in nbrs:
        for x in cover.neighbors(int(w)):
            x = int(x)
            if x != anchor:
                common[x] = common.get(x, 0) + 1
    second = sorted(common)
    bad = tuple(x for x in second if common[x] >= threshold)
    good = tuple(x for x in second if common[x] < threshold)
    bad_set = set(bad)
    sad, happy = [], []
    for cp in sorted(nbr_set):
        bad_deg = sum(1 for y in cover.neighbors(cp) if int(y) in bad_set)
        (sad if bad_deg >= threshold else happy).append(cp)
    beta2 = 1.0 / (15.0 * t)
    return StructureReport(
        anchor=anchor, d=d, t=t, delta=delta,
        beta1=1.0 / (20.0 * t), beta2=beta2, delta2=1.0 / (10.0 * t),
        tau=4.0 / (9.0 * t),
        bad=bad, good=good, sad=tuple(sad), happy=tuple(happy),
        sad_bound=d ** (1.0 - beta2),
    )


# ---------------------------------------------------------------------------
# Monte-Carlo round statistics
# ---------------------------------------------------------------------------


@dataclass
class RoundStats:
    """Accumulated statistics over seeded independent rounds."""

    trials: int
    params: RoundParams
    kept_mean: np.ndarray
    kept_var: np.ndarray
    res_mean: np.ndarray
    res_var: np.ndarray
    kept_tail_freq: np.ndarray  # freq of |kept(v) - keep*ell| > ell^(1-beta)
    res_tail_freq: np.ndarray   # freq of resdeg(c) > keep*uncolor*d + d^(1-beta)
    anchor: int | None = None
    anchor_u: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    anchor_u_minus_k: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    anchor_res: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))

    @property
    def anchor_u_mean(self) -> float:
        return float(self.anchor_u.mean()) if self.anchor_u.size else math.nan

    @property
    def anchor_u_minus_k_mean(self) -> float:
        return float(self.anchor_u_minus_k.mean()) if self.anchor_u_minus_k.size else math.nan


def round_stats(c: DpCover, p: RoundParams, trials: int, seed: int,
                anchor: int | None = None) -> RoundStats:
    """Seeded Monte Carlo over ``trials`` rounds (seeds seed..seed+trials-1).

    Tail thresholds use the closed forms at the supplied params; they are
    meaningful when the cover is regular with uniform list size and merely
    recorded otherwise.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if anchor is not None and not 0 <= int(anchor) < c.num_colors:
        raise ValueError(f"anchor {anchor} is not a color id of this cover")
    keep = keep_fn(p.d, p.ell, p.eta)
    keep_ell = keep * p.ell
    ell_tail = p.ell ** (1.0 - p.beta)
    res_thresh = keep * uncolor_fn(p.d, p.ell, p.eta) * p.d + p.d ** (1.0 - p.beta)
    a = -1 if anchor is None else int(anchor)
    (kept_sum, kept_sumsq, res_sum, res_sumsq, kept_tail, res_tail,
     anchor_u, anchor_umk, anchor_res) = _kernels.round_stats_dispatch(
        normalize_seed(seed), trials, p.eta,
        c.lptr, c.lcolors, c.owner, c.cover.indptr, c.cover.indices,
        keep_ell, ell_tail, res_thresh, a)
    n = float(trials)
    kept_mean = kept_sum / n
    res_mean = res_sum / n
    return RoundStats(
        trials=trials, params=p,
        kept_mean=kept_mean,
        kept_var=np.maximum(kept_sumsq / n - kept_mean ** 2, 0.0),
        res_mean=res_mean,
        res_var=np.maximum(res_sumsq / n - res_mean ** 2, 0.0),
        kept_tail_freq=kept_tail / n,
        res_tail_freq=res_tail / n,
        anchor=anchor,
        anchor_u=anchor_u, anchor_u_minus_k=anchor_umk, anchor_res=anchor_res,
    )


# ---------------------------------------------------------------------------
# exact enumeration oracle
# ---------------------------------------------------------------------------


def exact_round_expectation(c: DpCover, p: RoundParams,
                            budget: int = 10 ** 6,
                            chunk: int = 1 << 15) -> tuple[np.ndarray, np.ndarray]:
    """Exact per-vertex expected kept-list size and per-color expected
    residual degree, by full enumeration of the activation/color outcome
    space weighted by probability.

    Independent of the closed forms and of the round kernels: this is the
    ground truth they are tested against.  Refuses when the outcome space
    (product over vertices of 1 + list size) exceeds ``budget``.
    """
    n = c.base.vertex_count
    num_colors = c.num_colors
    sizes = c.list_sizes()
    total = 1
    for sz in sizes:
        total *= int(sz) + 1
        if total > budget:
            raise BudgetExceededError(
                f"outcome space exceeds budget: > {budget}")

    # per-vertex outcome probabilities: slot 0 = inactive, slot j = color j-1
    tables = [np.concatenate([[1.0 - p.eta], np.full(int(sz), p.eta / int(sz))])
              for sz in sizes]
    radix = (sizes + 1).astype(np.int64)

    # per-color lookup: owner and position within the owner's list
    within = np.zeros(num_colors, dtype=np.int64)
    for v in range(n):
        within[c.lists(v)] = np.arange(int(sizes[v]))

    cov_ptr, cov_idx = c.cover.indptr, c.cover.indices
    exp_kept = np.zeros(n, dtype=np.float64)
    exp_res = np.zeros(num_colors, dtype=np.float64)

    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        idx = np.arange(start, stop, dtype=np.int64)
        m = idx.size
        digits = np.empty((n, m), dtype=np.int64)
        rem = idx
        for v in range(n - 1, -1, -1):
            digits[v] = rem % radix[v]
            rem = rem // radix[v]
        w = np.ones(m, dtype=np.float64)
        for v in range(n):
            w *= tables[v][digits[v]]

        # assigned[c] per outcome: owner activated and picked exactly c
        assigned = np.empty((num_colors, m), dtype=bool)
        for col in range(num_colors):
            assigned[col] = digits[c.owner[col]] == within[col] + 1
        kept = np.empty((num_colors, m), dtype=bool)
        for col in range(num_colors):
            row = np.ones(m, dtype=bool)
            for k in range(cov_ptr[col], cov_ptr[col + 1]):
                row &= ~assigned[cov_idx[k]]
            kept[col] = row

        # vertex colored iff active and its own pick was kept
        blank = np.empty((n, m), dtype=bool)
        for v in range(n):
            lst = c.lists(v)
            if lst.size == 0:
                blank[v] = True
                continue
            active = digits[v] > 0
            picked = lst[np.maximum(digits[v] - 1, 0)]
            blank[v] = ~(active & kept[picked, np.arange(m)])

        for v in range(n):
            lst = c.lists(v)
            exp_kept[v] += float(np.sum(w * kept[lst].sum(axis=0)))
        in_res = kept & blank[c.owner]
        for col in range(num_colors):
            acc = np.zeros(m, dtype=np.int64)
            for k in range(cov_ptr[col], cov_ptr[col + 1]):
                acc += in_res[cov_idx[k]]
            exp_res[col] += float(np.sum(w * acc))

    return exp_kept, exp_res


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def stats_to_csv(stats: RoundStats, config: dict) -> str:
    """One row per vertex and per color; config echoed in comment lines."""
    lines = [f"# {json.dumps(config, sort_keys=True)}"]
    lines.append("kind,id,mean,variance,tail_freq")
    for v in range(stats.kept_mean.size):
        lines.append(f"vertex,{v},{float(stats.kept_mean[v])!r},"
                     f"{float(stats.kept_var[v])!r},"
                     f"{float(stats.kept_tail_freq[v])!r}")
    for col in range(stats.res_mean.size):
        lines.append(f"color,{col},{float(stats.res_mean[col])!r},"
                     f"{float(stats.res_var[col])!r},"
                     f"{float(stats.res_tail_freq[col])!r}")
    if stats.anchor is not None:
        lines.append("# anchor samples: trial,u,u_minus_k,residual_degree")
        for i in range(stats.anchor_u.size):
            lines.append(f"anchor,{i},{stats.anchor_u[i]},{stats.anchor_u_minus_k[i]},"
                         f"{stats.anchor_res[i]}")
    return "\n".join(lines) + "\n"


def stats_summary_json(stats: RoundStats, config: dict) -> str:
    keep = keep_fn(stats.params.d, stats.params.ell, stats.params.eta)
    # per-vertex comparison of the sample mean against keep*ell at 3 standard
    # errors; meaningful when the cover is regular with uniform lists
    se = np.sqrt(np.maximum(stats.kept_var, 0.0) / stats.trials)
    expected = keep * stats.params.ell
    within = np.abs(stats.kept_mean - expected) <= 3 * se + 1e-12
    doc = {
        "config": config,
        "trials": stats.trials,
        "keep_closed_form": keep,
        "expected_kept_size": expected,
        "kept_mean_overall": float(stats.kept_mean.mean()),
        "kept_mean_within_3se": bool(np.all(within)),
        "res_mean_overall": float(stats.res_mean.mean()),
        "kept_tail_freq_max": float(stats.kept_tail_freq.max()),
        "res_tail_freq_max": float(stats.res_tail_freq.max()),
    }
    if stats.anchor is not None:
        doc["anchor"] = {
            "id": stats.anchor,
            "u_mean": stats.anchor_u_mean,
            "u_minus_k_mean": stats.anchor_u_minus_k_mean,
            "identity_holds": bool(np.all(
                stats.anchor_res == stats.anchor_u - stats.anchor_u_minus_k)),
        }
    return json.dumps(doc, sort_keys=True) + "\n"
