"""End-to-end coloring: iterated good rounds, then resampling completion.

Round-to-round the engine tracks the *observed* state of the residual cover:
the uniform list bound for the next round is the smallest surviving kept
list, and the degree bound is the largest residual cover degree (never worse
than the closed-form prediction after a good round).  Nibbling stops as soon
as every list is at least eight times the residual cover degree, at which
point repeated resampling of conflicting edges completes the coloring.  The
returned coloring is verified against the original cover before it leaves
this module.

The closed-form schedule keyed by the same inputs is the reference for the
round targets; its integer sequences are not used to truncate lists (at
moderate degree their deviation allowances dwarf the actual shrinkage, and
trimming to them would destroy viable instances).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._rng import derive_seed, normalize_seed
from .analysis import verify_proper
from .cover import DpCover, PartialColoring, regularize, require_valid
from .errors import PipelineError, ResampleBudgetError, RetriesExhaustedError
from .graph import max_degree
from .nibble import RoundParams, good_round_targets, run_round_until_good
from .schedule import ScheduleError, ScheduleInput, derive_constants


@dataclass(frozen=True)
class PipelineConfig:
    schedule_input: ScheduleInput
    seed: int
    slack: float = 1.0
    max_round_retries: int = 50
    max_finish_resamples: int = 100000
    max_rounds: int = 5000
    regularize_first: bool = False
    verify_rounds: bool = False

    def __post_init__(self):
        if self.slack < 1.0:
            raise ValueError("slack must be >= 1")
        if min(self.max_round_retries, self.max_finish_resamples, self.max_rounds) < 1:
            raise ValueError("budgets must be >= 1")

    def echo(self) -> dict:
        si = self.schedule_input
        return {
            "schedule_input": {"d": si.d, "epsilon": si.epsilon, "s": si.s, "t": si.t},
            "seed": self.seed, "slack": self.slack,
            "max_round_retries": self.max_round_retries,
            "max_finish_resamples": self.max_finish_resamples,
            "max_rounds": self.max_rounds,
            "regularize_first": self.regularize_first,
        }


@dataclass(frozen=True)
class RoundTelemetry:
    iteration: int
    retries_used: int
    ell: int
    d: int
    min_kept: int
    max_residual_degree: int
    colored: int
    remaining: int


@dataclass
class ColoringResult:
    coloring: PartialColoring
    rounds: list[RoundTelemetry]
    finish_resamples: int
    verified: bool = True


def finish(c: DpCover, max_resamples: int, seed: int) -> PartialColoring:
    """Total proper coloring by iterated resampling of conflicted edges.

    Requires every list to be at least eight times the cover's max degree.
    Assigns every vertex a uniform color, then repeatedly picks the first
    violated cover edge (lexicographic order) and redraws both endpoint
    vertices, until no violation remains or the budget runs out.
    """
    coloring, resamples, _ = finish_with_stats(c, max_resamples, seed)
    return coloring


def finish_with_stats(c: DpCover, max_resamples: int, seed: int):
    d = max_degree(c.cover)
    sizes = c.list_sizes()
    n = c.base.vertex_count
    if n == 0:
        return PartialColoring.blank(0), 0, []
    if sizes.min() < max(8 * d, 1):
        raise ValueError(
            f"resampling completion needs lists >= 8*max cover degree "
            f"({8 * d}); smallest list has {int(sizes.min())}")
    rng = np.random.default_rng(normalize_seed(seed))

    def draw(v: int) -> int:
        lst = c.lists(v)
        j = min(int(rng.random() * lst.size), lst.size - 1)
        return int(lst[j])

    chosen = np.array([draw(v) for v in range(n)], dtype=np.int64)
    edges = c.cover.edge_array()
    if edges.size == 0:
        return PartialColoring(chosen), 0, []
    o1 = c.owner[edges[:, 0]]
    o2 = c.owner[edges[:, 1]]
    trajectory: list[int] = []
    resamples = 0
    while True:
        violated = (chosen[o1] == edges[:, 0]) & (chosen[o2] == edges[:, 1])
        count = int(np.count_nonzero(violated))
        trajectory.append(count)
        if count == 0:
            return PartialColoring(chosen), resamples, trajectory
        if resamples >= max_resamples:
            raise ResampleBudgetError(
                f"{count} conflicts remain after {resamples} resamples",
                conflict_trajectory=trajectory)
        first = int(np.argmax(violated))
        u, v = int(o1[first]), int(o2[first])
        for w in sorted((u, v)):
            chosen[w] = draw(w)
        resamples += 1


def color_graph(c: DpCover, cfg: PipelineConfig) -> ColoringResult:
    """Color every vertex of the cover's base graph, verified proper."""
    require_valid(c)
    original = c
    base_seed = normalize_seed(cfg.seed)
    if cfg.regularize_first:
        si = cfg.schedule_input
        # tag far outside the per-round range so streams never coincide
        c = regularize(c, max(max_degree(c.cover), 1), si.s, si.t,
                       derive_seed(base_seed, 10 ** 9))

    n_orig = original.base.vertex_count
    phi_total = np.full(c.base.vertex_count, -1, dtype=np.int64)
    current = c
    telemetry: list[RoundTelemetry] = []
    consts = None

    for i in range(1, cfg.max_rounds + 1):
        if current.base.vertex_count == 0:
            break
        d_cur = max_degree(current.cover)
        sizes = current.list_sizes()
        ell_cur = int(sizes.min())
        if ell_cur >= 8 * d_cur:
            break
        if ell_cur == 0:
            raise PipelineError(
                f"round {i}: a vertex has an empty list; instance cannot be "
                f"completed", telemetry=telemetry)
        if consts is None:
            try:
                consts = derive_constants(cfg.schedule_input)
            except ScheduleError as exc:
                raise PipelineError(
                    f"cover needs nibble rounds but the schedule is "
                    f"undefined: {exc}", telemetry=telemetry) from exc
            if ell_cur < consts[3]:
                raise PipelineError(
                    f"smallest list ({ell_cur}) is below the schedule's "
                    f"initial list size ({consts[3]})", telemetry=telemetry)
        _, eta, beta, _ = consts
        params = RoundParams(eta=eta, d=d_cur, ell=ell_cur, beta=beta)
        ell_t, d_t = good_round_targets(d_cur, ell_cur, eta, beta, cfg.slack)
        round_seed = derive_seed(base_seed, i)
        try:
            outcome = run_round_until_good(
                current, params, ell_t, d_t, cfg.max_round_retries, round_seed)
        except RetriesExhaustedError as exc:
            raise PipelineError(
                f"round {i}: {exc}", telemetry=telemetry) from exc

        colored_ids = np.nonzero(outcome.phi >= 0)[0]
        phi_total[current.vertex_labels[colored_ids]] = \
            current.color_labels[outcome.phi[colored_ids]]
        residual = outcome.residual
        if cfg.verify_rounds:
            _assert_composition_sound(c, phi_total, residual)
        res_sizes = residual.list_sizes()
        telemetry.append(RoundTelemetry(
            iteration=i,
            retries_used=outcome.seed - round_seed,
            ell=ell_cur, d=d_cur,
            min_kept=int(res_sizes.min()) if res_sizes.size else ell_cur,
            max_residual_degree=max_degree(residual.cover),
            colored=int(colored_ids.size),
            remaining=residual.base.vertex_count,
        ))
        current = residual
    else:
        raise PipelineError(
            f"round budget ({cfg.max_rounds}) exhausted before lists cleared "
            f"8x the residual degree", telemetry=telemetry)

    finish_resamples = 0
    if current.base.vertex_count > 0:
        try:
            fin, finish_resamples, _ = finish_with_stats(
                current, cfg.max_finish_resamples, derive_seed(base_seed, 0))
        except (ValueError, ResampleBudgetError) as exc:
            raise PipelineError(f"completion failed: {exc}",
                                telemetry=telemetry) from exc
        done = np.nonzero(fin.assignment >= 0)[0]
        phi_total[current.vertex_labels[done]] = \
            current.color_labels[fin.assignment[done]]

    result = PartialColoring(phi_total[:n_orig] if cfg.regularize_first else phi_total)
    ok, witness = verify_proper(original, result)
    if not ok or not result.is_total():
        raise PipelineError(
            f"internal verification failed (witness: {witness})",
            telemetry=telemetry)
    return ColoringResult(coloring=result, rounds=telemetry,
                          finish_resamples=finish_resamples)


def _assert_composition_sound(root: DpCover, phi_total: np.ndarray,
                              residual: DpCover) -> None:
    """Every surviving color must avoid all colors assigned so far (full scan)."""
    assigned = np.zeros(root.num_colors, dtype=bool)
    assigned[phi_total[phi_total >= 0]] = True
    surviving = residual.color_labels
    for col in surviving:
        for nb in root.cover.neighbors(int(col)):
            if assigned[int(nb)]:
                raise AssertionError(
                    f"surviving color {int(col)} conflicts with assigned {int(nb)}")


def result_to_json(result: ColoringResult | None, cfg: PipelineConfig,
                   error: str | None = None,
                   telemetry: list[RoundTelemetry] | None = None) -> str:
    doc = {
        "config": cfg.echo(),
        "ok": error is None,
    }
    if error is not None:
        doc["error"] = error
    if result is not None:
        doc["coloring"] = result.coloring.assignment.tolist()
        doc["finish_resamples"] = result.finish_resamples
        doc["verified"] = result.verified
    rounds = result.rounds if result is not None else (telemetry or [])
    doc["rounds"] = [
        {"iteration": r.iteration, "retries_used": r.retries_used,
         "ell": r.ell, "d": r.d, "min_kept": r.min_kept,
         "max_residual_degree": r.max_residual_degree,
         "colored": r.colored, "remaining": r.remaining}
        for r in rounds
    ]
    return json.dumps(doc, sort_keys=True) + "\n"
