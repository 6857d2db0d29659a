"""Batch command-line front end.

Subcommands: ``generate`` (instances), ``schedule`` (parameter CSV),
``color`` (end-to-end run), ``stats`` (Monte-Carlo round statistics).
Every randomized command requires an explicit ``--seed``; repeated runs with
the same inputs produce byte-identical outputs.

Exit codes: 0 success, 1 verification/feasibility failure, 2 usage or
validation error, 3 budget exhaustion.
"""

from __future__ import annotations

import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import analysis, generators, pipeline
from .cover import DpCover, cover_from_json, cover_to_json, from_list_assignment
from .errors import (CoverValidationError, GenerationError, PipelineError,
                     ResampleBudgetError, RetriesExhaustedError)
from .graph import graph_to_text, max_degree
from .nibble import RoundParams
from .schedule import ScheduleError, ScheduleInput, compute_schedule, schedule_to_csv

EXIT_FEASIBILITY = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


def _write_output(data: str, out: str | None, label: str):
    raw = data.encode()
    if out:
        with open(out, "wb") as fh:
            fh.write(raw)
        click.echo(f"{label} {out} sha256:{_digest(raw)}")
    else:
        sys.stdout.write(data)
        sys.stdout.flush()
        click.echo(f"{label} <stdout> sha256:{_digest(raw)}", err=True)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _resolve(flag_value, config: dict, key: str, default=None):
    """Flags take precedence over the config file, which beats the default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


@click.group()
def main():
    """DP-coloring engine: generators, schedules, coloring runs, statistics."""


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


@main.command("generate")
@click.option("--kind", type=click.Choice(
    ["regular", "girth5_regular", "dp_cover", "list_cover", "kst_free_bipartite"]),
    required=False)
@click.option("--n", type=int, default=None)
@click.option("--d", type=int, default=None)
@click.option("--ell", type=int, default=None)
@click.option("--rho", type=float, default=None)
@click.option("--m", type=int, default=None)
@click.option("--s", type=int, default=None)
@click.option("--t", type=int, default=None)
@click.option("--girth5/--no-girth5", "girth5_base", default=False,
              help="Use a girth>=5 base graph for cover kinds.")
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
def cmd_generate(kind, n, d, ell, rho, m, s, t, girth5_base, seed, config_path, out):
    """Generate a graph or cover file and print its content digest."""
    cfg = _load_config(config_path)
    kind = _resolve(kind, cfg, "kind")
    n = _resolve(n, cfg, "n")
    d = _resolve(d, cfg, "d")
    ell = _resolve(ell, cfg, "ell")
    rho = _resolve(rho, cfg, "rho", 1.0)
    m = _resolve(m, cfg, "m")
    s = _resolve(s, cfg, "s")
    t = _resolve(t, cfg, "t")
    seed = _resolve(seed, cfg, "seed")
    girth5_base = girth5_base or cfg.get("girth5", False)
    if kind is None:
        _fail(EXIT_USAGE, "missing --kind")
    if seed is None:
        _fail(EXIT_USAGE, "a --seed is mandatory for every randomized command")
    try:
        if kind == "regular":
            g = generators.random_regular(n, d, seed)
            _write_output(graph_to_text(g), out, "graph")
        elif kind == "girth5_regular":
            g = generators.random_girth5_regular(n, d, seed)
            _write_output(graph_to_text(g), out, "graph")
        elif kind in ("dp_cover", "list_cover"):
            base = (generators.random_girth5_regular(n, d, seed + 1)
                    if girth5_base else generators.random_regular(n, d, seed + 1))
            if ell is None:
                _fail(EXIT_USAGE, "--ell is required for cover kinds")
            if kind == "dp_cover":
                cov = generators.random_dp_cover(base, ell, rho, seed)
            else:
                cov = from_list_assignment(base, [range(ell)] * base.vertex_count)
            _write_output(cover_to_json(cov), out, "cover")
        elif kind == "kst_free_bipartite":
            g = generators.kst_free_bipartite(m, n, s, t, seed)
            _write_output(graph_to_text(g), out, "graph")
    except (ValueError, TypeError) as exc:
        _fail(EXIT_USAGE, str(exc))
    except GenerationError as exc:
        _fail(EXIT_BUDGET, str(exc))


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------


@main.command("schedule")
@click.option("--d", type=int, required=True)
@click.option("--epsilon", type=float, required=True)
@click.option("--s", type=int, default=2, show_default=True)
@click.option("--t", type=int, default=2, show_default=True)
@click.option("--max-iters", type=int, default=10000, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def cmd_schedule(d, epsilon, s, t, max_iters, out):
    """Compute the parameter iteration and emit it as CSV."""
    try:
        sched = compute_schedule(ScheduleInput(d=d, epsilon=epsilon, s=s, t=t),
                                 max_iters=max_iters)
    except ScheduleError as exc:
        _fail(EXIT_USAGE, str(exc))
    _write_output(schedule_to_csv(sched), out, "schedule")


# ---------------------------------------------------------------------------
# color
# ---------------------------------------------------------------------------


@main.command("color")
@click.argument("cover_file", type=click.Path(exists=True))
@click.option("--seed", type=int, required=True)
@click.option("--epsilon", type=float, default=None,
              help="Margin for the schedule; default matches the cover's lists.")
@click.option("--s", type=int, default=2, show_default=True)
@click.option("--t", type=int, default=2, show_default=True)
@click.option("--slack", type=float, default=1.0, show_default=True)
@click.option("--max-retries", type=int, default=50, show_default=True)
@click.option("--max-resamples", type=int, default=100000, show_default=True)
@click.option("--max-rounds", type=int, default=5000, show_default=True)
@click.option("--regularize-first", is_flag=True, default=False)
@click.option("--out", type=click.Path(), default=None)
def cmd_color(cover_file, seed, epsilon, s, t, slack, max_retries,
              max_resamples, max_rounds, regularize_first, out):
    """Run the full coloring pipeline on a cover file."""
    try:
        with open(cover_file) as fh:
            cov = cover_from_json(fh.read())
    except (CoverValidationError, ValueError, KeyError) as exc:
        _fail(EXIT_USAGE, f"cannot load cover: {exc}")
    d = max(max_degree(cov.cover), 1)
    if epsilon is None:
        # choose the margin so the schedule's initial list size matches the
        # cover's smallest list
        import math
        ell_min = int(cov.list_sizes().min())
        epsilon = max(ell_min * math.log(max(d, 3)) / max(d, 3) - 1.0, 0.01)
    try:
        cfg = pipeline.PipelineConfig(
            schedule_input=ScheduleInput(d=d, epsilon=epsilon, s=s, t=t),
            seed=seed, slack=slack, max_round_retries=max_retries,
            max_finish_resamples=max_resamples, max_rounds=max_rounds,
            regularize_first=regularize_first)
    except (ScheduleError, ValueError) as exc:
        _fail(EXIT_USAGE, str(exc))
    result = None
    error = None
    telemetry = None
    code = 0
    try:
        result = pipeline.color_graph(cov, cfg)
    except PipelineError as exc:
        error = str(exc)
        telemetry = exc.telemetry
        cause = exc.__cause__
        budget = isinstance(cause, (RetriesExhaustedError, ResampleBudgetError))
        code = EXIT_BUDGET if budget else EXIT_FEASIBILITY
    except CoverValidationError as exc:
        error, code = str(exc), EXIT_USAGE
    doc = pipeline.result_to_json(result, cfg, error=error, telemetry=telemetry)
    _write_output(doc, out, "result")
    if code:
        _fail(code, error)


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------


@main.command("stats")
@click.argument("cover_file", type=click.Path(exists=True))
@click.option("--seed", type=int, required=True)
@click.option("--trials", type=int, required=True)
@click.option("--eta", type=float, required=True)
@click.option("--t", type=int, default=2, show_default=True,
              help="Sets the tail exponent beta = 1/(25t).")
@click.option("--anchor", type=int, default=None,
              help="Track one color's uncolored/kept overlap per trial.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--summary", "summary_path", type=click.Path(), default=None)
def cmd_stats(cover_file, seed, trials, eta, t, anchor, jobs, out, summary_path):
    """Seeded Monte-Carlo statistics for one round on a cover."""
    try:
        with open(cover_file) as fh:
            cov = cover_from_json(fh.read())
    except (CoverValidationError, ValueError, KeyError) as exc:
        _fail(EXIT_USAGE, f"cannot load cover: {exc}")
    d = max(max_degree(cov.cover), 1)
    ell = int(cov.list_sizes().min())
    try:
        params = RoundParams(eta=eta, d=d, ell=ell, beta=1.0 / (25.0 * t))
    except ValueError as exc:
        _fail(EXIT_USAGE, str(exc))
    stats = _run_stats(cov, params, trials, seed, anchor, jobs)
    config = {"cover_file": cover_file, "seed": seed, "trials": trials,
              "eta": eta, "t": t, "anchor": anchor,
              "d": d, "ell": ell}
    _write_output(analysis.stats_to_csv(stats, config), out, "stats")
    if summary_path:
        with open(summary_path, "w") as fh:
            fh.write(analysis.stats_summary_json(stats, config))
        click.echo(f"summary {summary_path}")


def _run_stats(cov: DpCover, params: RoundParams, trials: int, seed: int,
               anchor: int | None, jobs: int) -> analysis.RoundStats:
    """Split trials into contiguous chunks; merge deterministically by index."""
    if jobs <= 1 or trials < 2 * jobs:
        return analysis.round_stats(cov, params, trials, seed, anchor=anchor)
    bounds = np.linspace(0, trials, jobs + 1).astype(int)
    chunks = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(
            lambda c: analysis.round_stats(cov, params, c[1] - c[0],
                                           seed + c[0], anchor=anchor),
            chunks))
    return _merge_stats(parts, params, anchor)


def _merge_stats(parts, params, anchor):
    total = sum(p.trials for p in parts)
    w = np.array([p.trials for p in parts], dtype=np.float64)

    def mean_merge(attr):
        return sum(getattr(p, attr) * p.trials for p in parts) / total

    kept_mean = mean_merge("kept_mean")
    res_mean = mean_merge("res_mean")
    kept_sq = sum((p.kept_var + p.kept_mean ** 2) * p.trials for p in parts) / total
    res_sq = sum((p.res_var + p.res_mean ** 2) * p.trials for p in parts) / total
    return analysis.RoundStats(
        trials=total, params=params,
        kept_mean=kept_mean,
        kept_var=np.maximum(kept_sq - kept_mean ** 2, 0.0),
        res_mean=res_mean,
        res_var=np.maximum(res_sq - res_mean ** 2, 0.0),
        kept_tail_freq=mean_merge("kept_tail_freq"),
        res_tail_freq=mean_merge("res_tail_freq"),
        anchor=anchor,
        anchor_u=np.concatenate([p.anchor_u for p in parts]),
        anchor_u_minus_k=np.concatenate([p.anchor_u_minus_k for p in parts]),
        anchor_res=np.concatenate([p.anchor_res for p in parts]),
    )


if __name__ == "__main__":
    main()
