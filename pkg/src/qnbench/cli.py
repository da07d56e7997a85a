"""Command-line benchmark harness.

``qnbench run`` executes a solver/problem/noise matrix and writes one CSV
row per run; ``qnbench profile`` turns such a CSV into performance-profile
curves (CSV and optional SVG). Outputs are plain files; nothing here is
interactive.
"""

from __future__ import annotations

import math

import click

from .bench import (
    emit_csv,
    emit_svg,
    performance_profile,
    performance_ratios,
    read_runs_csv,
    run_matrix,
)
from .noise import NoiseModel
from .problems import suite_names
from .solver import SolverConfig


def parse_seeds(spec: str) -> list[int]:
    """Accept ``7``, ``0,3,5`` or an inclusive range ``0..19``."""
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in spec.split(",") if tok.strip()]


def parse_noise(spec: str, grad_mode: str) -> NoiseModel:
    """Accept ``exact``, ``uniform:LEVEL`` or ``cast:BITS``."""
    spec = spec.strip()
    if spec == "exact":
        return NoiseModel(kind="exact", grad_mode=grad_mode)
    if spec.startswith("uniform:"):
        return NoiseModel(kind="additive_uniform", level=float(spec.split(":", 1)[1]), grad_mode=grad_mode)
    if spec.startswith("cast:"):
        return NoiseModel(kind="precision_cast", bits=int(spec.split(":", 1)[1]), grad_mode=grad_mode)
    raise click.BadParameter(f"unknown noise spec {spec!r}")


@click.group()
def main():
    """Benchmark harness for noise-tolerant quasi-Newton solvers."""


@main.command("run")
@click.option("--suite", default="desk", show_default=True, help="Suite name (desk|all) or comma-separated problem names.")
@click.option("--solver", "solvers", default="ours,baseline_line", show_default=True, help="Comma-separated solver variants.")
@click.option("--noise", default="exact", show_default=True, help="exact | uniform:LEVEL | cast:BITS")
@click.option("--eps-f", default="auto", show_default=True, help="Objective error rate, or 'auto' for the model default.")
@click.option("--gtol", type=float, default=1e-2, show_default=True, help="Gradient tolerance (infinity norm).")
@click.option("--kmax", type=int, default=15000, show_default=True, help="Iteration cap.")
@click.option("--seeds", default="0", show_default=True, help="Seed list: N, a,b,c or lo..hi.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Parallel workers.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Output runs CSV.")
@click.option("--trace-dir", type=click.Path(file_okay=False), default=None, help="Write one per-iteration trace CSV per run.")
@click.option("--fresh-fk", is_flag=True, help="Re-evaluate the objective at each iterate instead of reusing the accepted trial value.")
@click.option("--noise-grad-mode", type=click.Choice(["percomp", "rank1"]), default="percomp", show_default=True,
              help="Uniform gradient noise per component or one shared draw.")
@click.option("--metric", type=click.Choice(["both", "f_only"]), default="both", show_default=True,
              help="Oracle-call metric: objective+gradient calls or objective calls only.")
@click.option("--time-budget", type=float, default=600.0, show_default=True, help="Wall-clock budget per run, seconds.")
def run_command(suite, solvers, noise, eps_f, gtol, kmax, seeds, jobs, out_path, trace_dir,
                fresh_fk, noise_grad_mode, metric, time_budget):
    """Run the benchmark matrix and write one CSV row per run."""
    problem_names = suite_names(suite)
    solver_list = [s.strip() for s in solvers.split(",") if s.strip()]
    model = parse_noise(noise, noise_grad_mode)
    seed_list = parse_seeds(seeds)
    cfg = SolverConfig(k_max=kmax, time_budget=time_budget, fresh_fk=fresh_fk)
    records = run_matrix(
        problem_names,
        solver_list,
        model,
        gtol,
        seed_list,
        parallelism=jobs,
        eps_f=eps_f if eps_f == "auto" else float(eps_f),
        base_cfg=cfg,
        metric=metric,
        trace_dir=trace_dir,
    )
    emit_csv(records, out_path)
    total = len(records)
    for s in solver_list:
        ok = sum(1 for r in records if r.solver == s and r.status == "converged")
        runs = sum(1 for r in records if r.solver == s)
        click.echo(f"{s}: {ok}/{runs} runs converged")
    click.echo(f"wrote {total} records to {out_path}")


@main.command("profile")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Runs CSV from 'qnbench run'.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Output profile CSV.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), default=None, help="Optional SVG plot.")
def profile_command(in_path, out_path, svg_path):
    """Compute performance-profile curves from a runs CSV."""
    records = read_runs_csv(in_path)
    curves = performance_profile(records)
    emit_csv(curves, out_path)
    _, kept, dropped = performance_ratios(records)
    click.echo(f"profiled {len(kept)} problems ({len(dropped)} dropped: failed for every solver)")
    for c in curves:
        share = c.rho_at(math.inf)
        click.echo(f"{c.solver}: solves {share:.0%} of counted problems")
    if svg_path is not None:
        emit_svg(curves, svg_path)
        click.echo(f"wrote {svg_path}")


if __name__ == "__main__":
    main()
