"""Benchmark harness: run solver/problem/noise matrices and build profiles.

A run records the oracle-call count ``n`` a solver spent to reach the
gradient tolerance; failed runs carry an infinite sentinel. Performance
profiles compare solvers through the per-problem ratios
``r = n / min_over_solvers(n)``: the curve value at ``tau`` is the fraction
of problems a solver handled within factor ``tau`` of the best solver.

Runs are embarrassingly parallel. Every (problem, solver, seed) triple gets
its own oracle whose noise seed is derived deterministically from the
problem name and the user seed, so results are identical whatever the
worker count; records are sorted canonically before use. Wall-clock times
are the one genuinely nondeterministic column.
"""

from __future__ import annotations

import csv
import math
import time
import warnings
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .noise import NoiseModel, default_eps_f
from .problems import get_problem
from .solver import IterationRecord, SolveResult, SolverConfig, VARIANTS, solve

INF = math.inf

RUNS_HEADER = [
    "problem", "solver", "seed", "status", "oracle_calls",
    "f_calls", "g_calls", "iters", "final_f_bar", "final_g_inf", "wall_ms",
]
TRACE_HEADER = ["k", "f_bar", "g_inf", "g_two", "mu", "alpha", "delta", "set", "rejections", "f_calls", "g_calls"]
PROFILE_HEADER = ["solver", "tau", "rho"]


@dataclass
class RunRecord:
    problem: str
    solver: str
    seed: int
    status: str
    oracle_calls: float  # math.inf when the run did not converge
    f_calls: int
    g_calls: int
    iters: int
    final_f_bar: float
    final_g_inf: float
    wall_ms: float


@dataclass
class ProfileCurve:
    """Step curve of one solver: fraction of problems within ratio tau."""

    solver: str
    points: list[tuple[float, float]]  # (tau, rho), tau ascending, rho nondecreasing

    def rho_at(self, tau: float) -> float:
        rho = 0.0
        for t, r in self.points:
            if t <= tau:
                rho = r
            else:
                break
        return rho


def derive_oracle_seed(problem_name: str, seed: int) -> int:
    """Stable 63-bit seed from (problem, user seed); independent of solver."""
    h = zlib.crc32(problem_name.encode("utf-8"))
    return (seed * 0x9E3779B97F4A7C15 + h) & (2**63 - 1)


def _execute(task):
    name, variant, seed, model, cfg, keep_trace = task
    problem = get_problem(name)
    t0 = time.perf_counter()
    res = solve(problem, model, cfg)
    wall_ms = (time.perf_counter() - t0) * 1e3
    record = record_from_result(name, variant, seed, res, wall_ms)
    return record, (res.trace if keep_trace else None)


def record_from_result(
    problem: str, solver: str, seed: int, res: SolveResult, wall_ms: float, metric: str = "both"
) -> RunRecord:
    if res.status == "converged":
        n = res.f_calls + res.g_calls if metric == "both" else res.f_calls
    else:
        n = INF
    return RunRecord(
        problem=problem,
        solver=solver,
        seed=seed,
        status=res.status,
        oracle_calls=float(n),
        f_calls=res.f_calls,
        g_calls=res.g_calls,
        iters=res.iterations,
        final_f_bar=res.final_f_bar,
        final_g_inf=res.final_g_inf,
        wall_ms=wall_ms,
    )


def run_matrix(
    suite: Sequence[str],
    solvers: Sequence[str],
    noise: NoiseModel,
    eps_gtol: float,
    seeds: Iterable[int],
    parallelism: int = 1,
    *,
    eps_f: float | str = "auto",
    base_cfg: Optional[SolverConfig] = None,
    metric: str = "both",
    keep_traces: bool = False,
    trace_dir: Optional[str] = None,
):
    """Execute every (problem, solver, seed) triple of the matrix.

    Returns the canonically sorted list of :class:`RunRecord`; with
    ``keep_traces`` a dict mapping (problem, solver, seed) to the iteration
    trace is returned alongside. ``eps_f="auto"`` resolves to the model's
    default error rate. Unknown problem or solver names fail before any run.
    """
    seeds = list(seeds)
    for solver_name in solvers:
        if solver_name not in VARIANTS:
            raise ValueError(f"unknown solver {solver_name!r}")
    for name in suite:
        get_problem(name)
    if metric not in ("both", "f_only"):
        raise ValueError("metric must be 'both' or 'f_only'")
    eps_f_val = default_eps_f(noise) if eps_f == "auto" else float(eps_f)
    cfg0 = base_cfg if base_cfg is not None else SolverConfig()

    tasks = []
    for name in suite:
        for solver_name in solvers:
            for seed in seeds:
                model = replace(noise, seed=derive_oracle_seed(name, seed))
                cfg = replace(cfg0, variant=solver_name, eps_gtol=eps_gtol, eps_f=eps_f_val)
                tasks.append((name, solver_name, seed, model, cfg, keep_traces or trace_dir is not None))

    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(_execute, tasks))
    else:
        outcomes = [_execute(t) for t in tasks]

    if metric == "f_only":
        for record, _ in outcomes:
            if record.status == "converged":
                record.oracle_calls = float(record.f_calls)

    outcomes.sort(key=lambda rt: (rt[0].problem, rt[0].solver, rt[0].seed))
    records = [r for r, _ in outcomes]

    if trace_dir is not None:
        out = Path(trace_dir)
        out.mkdir(parents=True, exist_ok=True)
        for record, trace in outcomes:
            write_trace_csv(trace, out / f"{record.problem}__{record.solver}__seed{record.seed}.csv")

    if keep_traces:
        traces = {(r.problem, r.solver, r.seed): t for r, t in outcomes}
        return records, traces
    return records


def aggregate_seeds(records: Sequence[RunRecord]) -> dict[tuple[str, str], float]:
    """Collapse seeds: median oracle calls of the successful seeds per
    (problem, solver); infinite when more than half the seeds failed."""
    groups: dict[tuple[str, str], list[float]] = {}
    for r in records:
        groups.setdefault((r.problem, r.solver), []).append(r.oracle_calls)
    agg: dict[tuple[str, str], float] = {}
    for key, vals in groups.items():
        finite = sorted(v for v in vals if math.isfinite(v))
        if 2 * (len(vals) - len(finite)) > len(vals):
            agg[key] = INF
        elif not finite:
            agg[key] = INF
        else:
            mid = len(finite) // 2
            agg[key] = finite[mid] if len(finite) % 2 else 0.5 * (finite[mid - 1] + finite[mid])
    return agg


def performance_ratios(
    records: Sequence[RunRecord], solvers: Optional[Sequence[str]] = None
) -> tuple[dict[tuple[str, str], float], list[str], list[str]]:
    """Per-problem performance ratios after seed aggregation.

    Returns (ratios keyed by (problem, solver), counted problems, dropped
    problems). Problems where every solver failed are dropped from the
    profile population.
    """
    if solvers is None:
        seen = []
        for r in records:
            if r.solver not in seen:
                seen.append(r.solver)
        solvers = seen
    agg = aggregate_seeds(records)
    problems = sorted({p for p, _ in agg})
    kept, dropped = [], []
    for p in problems:
        best = min(agg.get((p, s), INF) for s in solvers)
        if math.isfinite(best):
            kept.append(p)
        else:
            dropped.append(p)
    ratios = {}
    for p in kept:
        best = min(agg.get((p, s), INF) for s in solvers)
        for s in solvers:
            ratios[(p, s)] = agg.get((p, s), INF) / best
    return ratios, kept, dropped


def performance_profile(
    records: Sequence[RunRecord], solvers: Optional[Sequence[str]] = None
) -> list[ProfileCurve]:
    """Profile curves over the problems where at least one solver succeeded.

    Curves are sampled at tau = 1 and at every distinct finite ratio; failed
    runs have infinite ratio and never enter any curve value.
    """
    if solvers is None:
        seen = []
        for r in records:
            if r.solver not in seen:
                seen.append(r.solver)
        solvers = seen
    ratios, kept, dropped = performance_ratios(records, solvers)
    if dropped:
        warnings.warn(f"{len(dropped)} problem(s) failed for every solver and were dropped")
    taus = sorted({1.0} | {v for v in ratios.values() if math.isfinite(v)})
    curves = []
    for s in solvers:
        mine = [ratios[(p, s)] for p in kept]
        pts = []
        for tau in taus:
            rho = sum(1 for v in mine if v <= tau) / len(kept) if kept else 0.0
            pts.append((tau, rho))
        curves.append(ProfileCurve(solver=s, points=pts))
    return curves


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(items: Sequence, path) -> None:
    """Write run records or profile curves; floats keep full precision so a
    read round-trips exactly."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        if items and isinstance(items[0], ProfileCurve):
            writer.writerow(PROFILE_HEADER)
            for curve in items:
                for tau, rho in curve.points:
                    writer.writerow([curve.solver, _fmt(tau), _fmt(rho)])
        else:
            writer.writerow(RUNS_HEADER)
            for r in items:
                writer.writerow(
                    [
                        r.problem, r.solver, r.seed, r.status, _fmt(r.oracle_calls),
                        r.f_calls, r.g_calls, r.iters, _fmt(r.final_f_bar),
                        _fmt(r.final_g_inf), _fmt(r.wall_ms),
                    ]
                )


def read_runs_csv(path) -> list[RunRecord]:
    records = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RUNS_HEADER:
            raise ValueError(f"unexpected runs header: {reader.fieldnames}")
        for row in reader:
            records.append(
                RunRecord(
                    problem=row["problem"],
                    solver=row["solver"],
                    seed=int(row["seed"]),
                    status=row["status"],
                    oracle_calls=float(row["oracle_calls"]),
                    f_calls=int(row["f_calls"]),
                    g_calls=int(row["g_calls"]),
                    iters=int(row["iters"]),
                    final_f_bar=float(row["final_f_bar"]),
                    final_g_inf=float(row["final_g_inf"]),
                    wall_ms=float(row["wall_ms"]),
                )
            )
    return records


def write_trace_csv(trace: Sequence[IterationRecord], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for rec in trace:
            writer.writerow(
                [
                    rec.k, _fmt(rec.f_bar), _fmt(rec.g_inf), _fmt(rec.g_two), _fmt(rec.mu),
                    _fmt(rec.alpha), _fmt(rec.delta), rec.set_label, rec.rejections,
                    rec.f_calls, rec.g_calls,
                ]
            )


def read_trace_csv(path) -> list[IterationRecord]:
    trace = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRACE_HEADER:
            raise ValueError(f"unexpected trace header: {reader.fieldnames}")
        for row in reader:
            trace.append(
                IterationRecord(
                    k=int(row["k"]),
                    f_bar=float(row["f_bar"]),
                    g_inf=float(row["g_inf"]),
                    g_two=float(row["g_two"]),
                    mu=float(row["mu"]),
                    alpha=float(row["alpha"]),
                    delta=float(row["delta"]),
                    set_label=row["set"],
                    rejections=int(row["rejections"]),
                    f_calls=int(row["f_calls"]),
                    g_calls=int(row["g_calls"]),
                )
            )
    return trace


_SVG_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def emit_svg(curves: Sequence[ProfileCurve], path, title: str = "Performance profile") -> None:
    """Self-contained log-x step plot with exactly one polyline per solver."""
    width, height = 760, 480
    ml, mr, mt, mb = 60, 170, 40, 50
    plot_w, plot_h = width - ml - mr, height - mt - mb

    tau_max = 10.0
    for c in curves:
        for tau, _ in c.points:
            if math.isfinite(tau):
                tau_max = max(tau_max, tau)
    log_max = math.log10(tau_max) if tau_max > 1.0 else 1.0

    def px(tau: float) -> float:
        return ml + (math.log10(max(tau, 1.0)) / log_max) * plot_w

    def py(rho: float) -> float:
        return mt + (1.0 - rho) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{ml}" y="{mt - 15}" font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{ml}" y1="{mt + plot_h}" x2="{ml + plot_w}" y2="{mt + plot_h}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + plot_h}" stroke="black"/>',
    ]
    decade = 1.0
    while decade <= tau_max:
        x = px(decade)
        parts.append(f'<line x1="{x:.1f}" y1="{mt + plot_h}" x2="{x:.1f}" y2="{mt + plot_h + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{x:.1f}" y="{mt + plot_h + 20}" font-family="sans-serif" font-size="12" '
            f'text-anchor="middle">{decade:g}</text>'
        )
        decade *= 10.0
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = py(frac)
        parts.append(f'<line x1="{ml - 5}" y1="{y:.1f}" x2="{ml}" y2="{y:.1f}" stroke="black"/>')
        parts.append(
            f'<text x="{ml - 9}" y="{y + 4:.1f}" font-family="sans-serif" font-size="12" '
            f'text-anchor="end">{frac:g}</text>'
        )

    for i, curve in enumerate(curves):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        pts: list[tuple[float, float]] = []
        prev_rho = 0.0
        finite_pts = [(t, r) for t, r in curve.points if math.isfinite(t)]
        if not finite_pts:
            finite_pts = [(1.0, 0.0)]
        for j, (tau, rho) in enumerate(finite_pts):
            if j == 0:
                pts.append((px(tau), py(rho)))
            else:
                pts.append((px(tau), py(prev_rho)))
                pts.append((px(tau), py(rho)))
            prev_rho = rho
        pts.append((ml + plot_w, py(prev_rho)))
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = mt + 16 + 20 * i
        parts.append(
            f'<text x="{ml + plot_w + 14}" y="{ly}" font-family="sans-serif" font-size="13" '
            f'fill="{color}">{curve.solver}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))
