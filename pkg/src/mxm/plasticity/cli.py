"""
mxm-plasticity command line.

Usage examples:
    mxm-plasticity install-config
    mxm-plasticity run --config experiments/baseline.cfg --seed 3
    mxm-plasticity run --config experiments/baseline.cfg --profile smoke --env dev
    mxm-plasticity sweep --config experiments/baseline.cfg \\
        --kinds spectral,l2 --lambdas 0.01,0.001,0.0001
    mxm-plasticity demo-a1 --c 1,10,100 --alpha 0.01,0.1
    mxm-plasticity demo-s32 --a 0.5,0.1,0.02
    mxm-plasticity analyze --checkpoint runs/<run_id>/checkpoints/task_010.plab

Experiment settings are layered: built-in defaults, then the installed
mxm-config package (when --env/--machine/--profile is given), then the
flat config file, then --seed/--out. Errors are printed and turn into a
non-zero exit status.
"""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Callable, Sequence, TypeVar

from mxm.config import DefaultsMode, install_config, load_config
from rich.console import Console
from rich.table import Table

from mxm.plasticity.config.config import (
    APP_ID,
    SHIPPED_PACKAGE,
    ConfigError,
    ExperimentConfig,
    experiment_from_file,
    installed_overrides,
)
from mxm.plasticity.diagnostics.trajectory import spectral_trajectory
from mxm.plasticity.harness.demos import (
    DEFAULT_ALPHAS,
    DEFAULT_AS,
    DEFAULT_CS,
    DEFAULT_COND_ALPHA,
    MAX_STEPS,
    ClosedFormMismatch,
    ConditioningReport,
    IllustrativeReport,
    illustrative_demo,
    section32_demo,
)
from mxm.plasticity.harness.experiment import RunResult, run_experiment
from mxm.plasticity.harness.sweep import SweepResult, run_sweep, sweep_grid
from mxm.plasticity.models.checkpoint import load_checkpoint
from mxm.plasticity.regularizers.config import RegKind

console = Console()

T = TypeVar("T")


def _split(raw: str, convert: Callable[[str], T], what: str) -> list[T]:
    items = [p.strip() for p in raw.split(",") if p.strip()]
    if not items:
        raise argparse.ArgumentTypeError(f"empty {what} list")
    try:
        return [convert(p) for p in items]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad {what} list {raw!r}: {e}") from e


def _floats(raw: str) -> list[float]:
    return _split(raw, float, "number")


def _ints(raw: str) -> list[int]:
    return _split(raw, int, "integer")


def _kinds(raw: str) -> list[RegKind]:
    return _split(raw, RegKind, "kind")


def _fmt(x: float) -> str:
    return f"{x:.4g}"


# ---------- configuration ----------


def _load_experiment(args: argparse.Namespace) -> ExperimentConfig:
    base: dict[str, str] = {}
    if args.env or args.machine or args.profile:
        where: dict[str, str] = {
            "env": args.env or "dev",
            "profile": args.profile or "default",
        }
        if args.machine:
            where["machine"] = args.machine
        cfg = load_config(package=APP_ID, **where)
        base = installed_overrides(cfg)
    overrides: dict[str, str] = {}
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.out is not None:
        overrides["out"] = str(args.out)
    return experiment_from_file(args.config, base=base, overrides=overrides)


# ---------- renderers ----------


def show_run(result: RunResult) -> None:
    table = Table(title=f"Run {result.run_id}")
    table.add_column("Task", justify="right")
    table.add_column("Step", justify="right")
    table.add_column("Train acc", justify="right", style="cyan")
    table.add_column("Test acc", justify="right")
    table.add_column("Loss", justify="right")
    table.add_column("Mean σ₁", justify="right", style="magenta")
    for tr, te in zip(result.boundary("train"), result.boundary("test")):
        table.add_row(
            str(tr.task),
            str(tr.step),
            _fmt(tr.accuracy),
            _fmt(te.accuracy),
            _fmt(tr.loss),
            _fmt(tr.mean_sigma_max),
        )
    console.print(table)
    console.print(f"[green]metrics:[/green] {result.metrics_path}")
    console.print(f"[green]manifest:[/green] {result.manifest_path}")


def show_sweep(result: SweepResult) -> None:
    table = Table(title=f"Sweep {result.sweep_id}")
    for name in ("Cell", "Status", "Task 1", "Final", "Mean"):
        table.add_column(name, justify="left" if name == "Cell" else "right")
    for row in result.rows:
        style = "green" if row.status == "ok" else "red"
        table.add_row(
            row.cell.cell_id,
            f"[{style}]{row.status}[/{style}]",
            _fmt(row.task1_accuracy),
            _fmt(row.final_accuracy),
            _fmt(row.mean_accuracy),
        )
    console.print(table)
    console.print(f"[green]summary:[/green] {result.summary_path}")


def show_illustrative(report: IllustrativeReport) -> None:
    grads = Table(title="Gradients after the target switch")
    for name in ("c", "σ₁(w₁)", "‖∇w₁‖", "‖∇w₂‖", "‖∇w₁‖²", "‖∇w₂‖²", "ratio"):
        grads.add_column(name, justify="right")
    for case in report.cases:
        grads.add_row(
            _fmt(case.c),
            _fmt(case.sigma_w1),
            _fmt(case.norm_w1),
            _fmt(case.norm_w2),
            _fmt(case.norm_w1**2),
            _fmt(case.norm_w2**2),
            _fmt(case.norm_ratio),
        )
    console.print(grads)

    runs = Table(title="Steps to loss < 0.1")
    runs.add_column("c", justify="right")
    for alpha in report.alphas:
        runs.add_column(f"α={alpha:g}", justify="right")
    for case in report.cases:
        cells: list[str] = []
        for alpha in report.alphas:
            out = case.outcome(alpha)
            cells.append(str(out.steps) if out.status == "converged" else out.status)
        runs.add_row(_fmt(case.c), *cells)
    console.print(runs)


def show_conditioning(report: ConditioningReport) -> None:
    table = Table(title=f"Conditioning example (α={report.alpha:g})")
    for name in ("a", "κ(θ₁)", "a²−1", "f(old x)", "status", "steps"):
        table.add_column(name, justify="right")
    for case in report.cases:
        table.add_row(
            _fmt(case.a),
            _fmt(case.condition),
            _fmt(case.residual),
            _fmt(case.task1_output),
            case.outcome.status,
            str(case.outcome.steps),
        )
    console.print(table)
    if report.increasing_as_a_shrinks:
        console.print("[green]steps increase as a shrinks[/green]")
    else:
        console.print("[yellow]steps do not increase strictly as a shrinks[/yellow]")


# ---------- commands ----------


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_experiment(args)
    show_run(run_experiment(config, run_id=args.run_id))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_experiment(args)
    cells = sweep_grid(args.kinds, args.lambdas, args.ks, args.seeds)
    result = run_sweep(config, cells, sweep_id=args.run_id)
    show_sweep(result)
    return 0 if all(r.status == "ok" for r in result.rows) else 1


def cmd_demo_a1(args: argparse.Namespace) -> int:
    show_illustrative(illustrative_demo(args.c, args.alpha, max_steps=args.max_steps))
    return 0


def cmd_demo_s32(args: argparse.Namespace) -> int:
    report = section32_demo(args.a, args.alpha, max_steps=args.max_steps)
    show_conditioning(report)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    params = load_checkpoint(Path(args.checkpoint))
    table = Table(title=f"Spectra of {Path(args.checkpoint).name}")
    for name in ("Layer", "Shape", "σ₁", "σ_min", "erank", "κ", "stable rank"):
        table.add_column(name, justify="right")
    for i, (layer, s) in enumerate(zip(params.layers, spectral_trajectory(params))):
        table.add_row(
            str(i),
            f"{layer.d_out}×{layer.d_in}",
            _fmt(s.sigma_max),
            _fmt(s.sigma_min),
            _fmt(s.erank),
            _fmt(s.condition),
            _fmt(s.stable_rank),
        )
    console.print(table)
    return 0


def cmd_install_config(args: argparse.Namespace) -> int:
    install_config(
        app_id=APP_ID,
        mode=DefaultsMode.shipped,
        shipped_package=SHIPPED_PACKAGE,
    )
    console.print(f"[green]installed config for[/green] {APP_ID}")
    return 0


# ---------- parser ----------


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="Flat key = value experiment file.")
    p.add_argument("--out", type=Path, help="Output root (overrides `out`).")
    p.add_argument("--seed", type=int, help="Master seed (overrides `seed`).")
    p.add_argument("--run-id", dest="run_id", help="Run directory name.")
    p.add_argument("--env", help="mxm-config environment, e.g. dev or prod.")
    p.add_argument("--machine", help="mxm-config machine name.")
    p.add_argument("--profile", help="mxm-config profile, e.g. smoke.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mxm-plasticity",
        description="Continual-learning trainability experiments and diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="Train one network through a task stream.")
    _add_experiment_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="Run a grid of mitigator settings.")
    _add_experiment_args(p)
    p.add_argument("--kinds", type=_kinds, required=True)
    p.add_argument("--lambdas", type=_floats, required=True)
    p.add_argument("--ks", type=_ints, default=[2])
    p.add_argument("--seeds", type=_ints, default=[0])
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "demo-a1",
        aliases=["demo-scale"],
        help="Weight-scale example with two ReLU units.",
    )
    p.add_argument("--c", type=_floats, default=list(DEFAULT_CS))
    p.add_argument("--alpha", type=_floats, default=list(DEFAULT_ALPHAS))
    p.add_argument("--max-steps", dest="max_steps", type=int, default=MAX_STEPS)
    p.set_defaults(func=cmd_demo_a1)

    p = sub.add_parser(
        "demo-s32",
        aliases=["demo-conditioning"],
        help="Ill-conditioned two-task example.",
    )
    p.add_argument("--a", type=_floats, default=list(DEFAULT_AS))
    p.add_argument("--alpha", type=float, default=DEFAULT_COND_ALPHA)
    p.add_argument("--max-steps", dest="max_steps", type=int, default=MAX_STEPS)
    p.set_defaults(func=cmd_demo_s32)

    p = sub.add_parser("analyze", help="Per-layer spectra of a checkpoint.")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("install-config", help="Install shipped config seeds.")
    p.set_defaults(func=cmd_install_config)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except ClosedFormMismatch as e:
        console.print(f"[red]closed-form check failed:[/red] {e}")
    except (ConfigError, ValueError, OSError) as e:
        console.print(f"[red]error:[/red] {e}")
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
