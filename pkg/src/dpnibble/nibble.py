"""One round of the randomized activate/assign/prune coloring procedure.

A round activates each vertex independently with probability ``eta``, assigns
every activated vertex a uniform color from its list, keeps exactly the
colors with no assigned cover-neighbor, and colors an activated vertex iff
its own pick survived.  The closed forms below predict the per-round list
shrinkage and residual cover degree on regular covers:

    keep(d, l, eta)    = (1 - eta/l)^d
    uncolor(d, l, eta) = 1 - eta*keep
    ell_next           = keep*l - l^(1-beta)
    d_next             = keep*uncolor*d + d^(1-beta)

A round is *good* when no vertex's kept list fell to the ``ell`` target and
no residual color's degree reached the ``d`` target; the engine simply
re-rolls (seed+1, seed+2, ...) until a good round appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from ._rng import normalize_seed
from .cover import DpCover, PartialColoring, subcover
from .errors import RetriesExhaustedError


def keep_fn(d: float, ell: float, eta: float) -> float:
    """Probability that a fixed color survives a round: (1 - eta/ell)^d."""
    if d == 0:
        return 1.0
    x = eta / ell
    if x >= 1.0:
        return 0.0
    # exp/log1p form keeps the relative error near machine epsilon for the
    # large exponents the schedule uses; plain pow loses ~d ulps
    return math.exp(d * math.log1p(-x))


def uncolor_fn(d: float, ell: float, eta: float) -> float:
    """Probability proxy that a vertex stays uncolored: 1 - eta*keep."""
    return 1.0 - eta * keep_fn(d, ell, eta)


def ell_next(d: float, ell: float, eta: float, beta: float) -> float:
    """Guaranteed list size after a good round (real-valued)."""
    return keep_fn(d, ell, eta) * ell - ell ** (1.0 - beta)


def d_next(d: float, ell: float, eta: float, beta: float) -> float:
    """Guaranteed residual degree bound after a good round (real-valued)."""
    k = keep_fn(d, ell, eta)
    return k * uncolor_fn(d, ell, eta) * d + d ** (1.0 - beta)


def good_round_targets(d: float, ell: float, eta: float, beta: float,
                       slack: float = 1.0) -> tuple[float, float]:
    """Acceptance thresholds with the deviation allowances scaled by ``slack``.

    ``slack=1`` is the exact closed form; larger values widen both allowances,
    which can only make acceptance easier.
    """
    k = keep_fn(d, ell, eta)
    ell_target = k * ell - slack * ell ** (1.0 - beta)
    d_target = k * uncolor_fn(d, ell, eta) * d + slack * d ** (1.0 - beta)
    return ell_target, d_target


@dataclass(frozen=True)
class RoundParams:
    """Parameters of one round."""

    eta: float
    d: int
    ell: int
    beta: float

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if self.d < 1 or self.ell < 1:
            raise ValueError("d and ell must be >= 1")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")


class RoundOutcome:
    """Result of one round, backed by the kernel arrays.

    ``activated_mask``/``col``/``kept_mask``/``phi`` are the raw arrays;
    the mapping-style views and the residual cover are built on demand.
    """

    def __init__(self, cover: DpCover, params: RoundParams, seed: int,
                 activated_mask: np.ndarray, col: np.ndarray,
                 kept_mask: np.ndarray, phi: np.ndarray):
        self.cover = cover
        self.params = params
        self.seed = seed
        self.activated_mask = activated_mask
        self.col = col
        self.kept_mask = kept_mask
        self.phi = phi

    @property
    def activated(self) -> np.ndarray:
        return np.nonzero(self.activated_mask)[0]

    @property
    def assigned(self) -> dict[int, int]:
        return {int(v): int(self.col[v]) for v in self.activated}

    def kept(self, v: int) -> np.ndarray:
        lst = self.cover.lists(v)
        return lst[self.kept_mask[lst]]

    def kept_sizes(self) -> np.ndarray:
        hit = self.kept_mask[self.cover.lcolors].astype(np.int64)
        cs = np.concatenate([[0], np.cumsum(hit)])
        return cs[self.cover.lptr[1:]] - cs[self.cover.lptr[:-1]]

    @property
    def coloring(self) -> PartialColoring:
        return PartialColoring(self.phi.copy())

    def residual_degrees(self) -> np.ndarray:
        """Residual degree of every color of the input cover."""
        return _kernels.residual_degrees_dispatch(
            self.kept_mask, self.phi, self.cover.owner,
            self.cover.cover.indptr, self.cover.cover.indices)

    @cached_property
    def residual(self) -> DpCover:
        """Induced cover on blank vertices with their kept lists."""
        blanks = np.nonzero(self.phi < 0)[0]
        return subcover(self.cover, blanks, [self.kept(int(v)) for v in blanks])


def run_round(cover: DpCover, params: RoundParams, seed: int) -> RoundOutcome:
    """Execute one round; a pure function of (cover, params, seed)."""
    if np.any(cover.list_sizes() < 1):
        raise ValueError("every vertex needs a nonempty list")
    s = normalize_seed(seed)
    activated, col, kept, phi = _kernels.round_dispatch(
        s, params.eta, cover.lptr, cover.lcolors, cover.owner,
        cover.cover.indptr, cover.cover.indices)
    return RoundOutcome(cover, params, seed, activated, col, kept, phi)


def round_is_good(outcome: RoundOutcome, ell_target: float, d_target: float) -> bool:
    """No kept list at or below ``ell_target``; no residual color at or above ``d_target``."""
    bad_v, bad_c = count_violations(outcome, ell_target, d_target)
    return bad_v == 0 and bad_c == 0


def count_violations(outcome: RoundOutcome, ell_target: float, d_target: float) -> tuple[int, int]:
    """(#vertices with kept size <= ell_target, #residual colors with degree >= d_target)."""
    kept_sizes = outcome.kept_sizes()
    bad_v = int(np.count_nonzero(kept_sizes <= ell_target))
    resdeg = outcome.residual_degrees()
    in_res = outcome.kept_mask & (outcome.phi[outcome.cover.owner] < 0)
    bad_c = int(np.count_nonzero(in_res & (resdeg >= d_target)))
    return bad_v, bad_c


def run_round_until_good(cover: DpCover, params: RoundParams,
                         ell_target: float, d_target: float,
                         max_retries: int, seed: int) -> RoundOutcome:
    """First good round among seeds ``seed, seed+1, ...``.

    Raises :class:`RetriesExhaustedError` carrying the best attempt (fewest
    violated events) and the per-seed violation counts.
    """
    if max_retries < 1:
        raise ValueError("max_retries must be >= 1")
    best: RoundOutcome | None = None
    best_score = None
    violations: dict[int, tuple[int, int]] = {}
    for k in range(max_retries):
        outcome = run_round(cover, params, seed + k)
        bad_v, bad_c = count_violations(outcome, ell_target, d_target)
        if bad_v == 0 and bad_c == 0:
            return outcome
        violations[seed + k] = (bad_v, bad_c)
        score = bad_v + bad_c
        if best_score is None or score < best_score:
            best, best_score = outcome, score
    raise RetriesExhaustedError(
        f"no good round in {max_retries} tries from seed {seed} "
        f"(targets: ell<={ell_target:.4g}, d>={d_target:.4g}); "
        f"best attempt violated {best_score} events",
        best_outcome=best, violations=violations)
