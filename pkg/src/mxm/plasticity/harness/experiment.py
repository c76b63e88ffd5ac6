"""
Seeded continual-learning runs.

`run_experiment(config)` trains one MLP through the task stream:

  1) build base splits, the task stream, the network and the optimizer
  2) per task τ = 1..N: T epochs of minibatch steps on J^λ = J + λR
     (warm power iteration → task gradient → penalty → composite gradient
     → optimizer step), scheduled ReDO resets, optional intermediate
     evaluations
  3) boundary evaluation at t = τT (with representation change since the
     previous boundary, before any shrink-and-perturb), optional checkpoint,
     then shrink-and-perturb
  4) write metrics.csv and manifest.json, move the `latest` pointer

The run is single-threaded and deterministic: every random draw comes from a
counter derived from the master seed, so equal configs give equal files.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.common.latest_run import update_latest_run
from mxm.plasticity.common.seeding import SeedStream, derive_rng
from mxm.plasticity.config.config import ExperimentConfig
from mxm.plasticity.diagnostics.diversity import diversity_report
from mxm.plasticity.diagnostics.representation import (
    RepChangeRecord,
    representation_change,
)
from mxm.plasticity.diagnostics.trajectory import spectral_trajectory
from mxm.plasticity.harness.manifest import build_manifest, write_manifest
from mxm.plasticity.harness.metrics import (
    LayerMetrics,
    MetricsRecord,
    write_metrics_csv,
)
from mxm.plasticity.harness.runlog import RunLog, unique_run_id, utc_now_iso
from mxm.plasticity.models.checkpoint import save_checkpoint
from mxm.plasticity.models.mlp import evaluate, forward, loss_and_gradients
from mxm.plasticity.models.params import MLPSpec, ParamSet, init_params
from mxm.plasticity.optim.optimizers import OptimState, optimizer_step
from mxm.plasticity.regularizers.config import RegKind, RegularizerConfig
from mxm.plasticity.regularizers.penalties import (
    composite_gradient,
    penalty_for,
    refresh_power_states,
    solve_power_states,
)
from mxm.plasticity.regularizers.resets import redo_reset, shrink_perturb_step
from mxm.plasticity.tasks.dataset import Dataset
from mxm.plasticity.tasks.idx import load_idx
from mxm.plasticity.tasks.stream import (
    TaskStream,
    TaskView,
    minibatch_order,
    task_view,
)
from mxm.plasticity.tasks.synthetic import synth_splits

# PROBE sub-stream keys
_PROBE_REP = 0
_PROBE_DIVERSITY = 1


@dataclass(frozen=True)
class RunResult:
    run_id: str
    run_dir: Path
    metrics_path: Path
    manifest_path: Path
    records: tuple[MetricsRecord, ...]
    checkpoints: tuple[Path, ...]

    def boundary(self, split: str = "train") -> list[MetricsRecord]:
        """Last record of every task for `split`."""
        last: dict[int, MetricsRecord] = {}
        for rec in self.records:
            if rec.split == split:
                last[rec.task] = rec
        return [last[t] for t in sorted(last)]


# ---------- setup ----------


def load_base_data(config: ExperimentConfig) -> tuple[Dataset, Dataset]:
    """Base (train, test) splits before any task transformation."""
    d = config.data
    if d.source == "synthetic":
        train, test = synth_splits(config.seed, d.n_train, d.n_test, d.dim, d.classes)
        if d.limit > 0:
            train = train.head(d.limit)
        return train, test
    train = load_idx(
        Path(d.images), Path(d.labels), limit=d.limit, num_classes=d.classes
    )
    if d.test_images and d.test_labels:
        test = load_idx(
            Path(d.test_images), Path(d.test_labels), num_classes=d.classes
        )
    else:
        test = train
    return train, test


def build_stream(config: ExperimentConfig, train: Dataset, test: Dataset) -> TaskStream:
    s = config.stream
    return TaskStream(
        train=train,
        test=test,
        kind=s.kind,
        master_seed=config.seed,
        epochs_per_task=s.epochs,
        num_tasks=s.tasks,
        class_step=s.class_step,
        identity_first=s.identity_first,
    )


def build_spec(config: ExperimentConfig, train: Dataset) -> MLPSpec:
    m = config.model
    return MLPSpec(
        input_dim=train.dim,
        hidden=m.hidden,
        output_dim=train.num_classes,
        layer_norm=m.layer_norm,
        init=m.init,
    )


def probe_rows(seed: int, n: int, size: int, *keys: int) -> NDArray[np.intp]:
    """A fixed seeded subset of ``range(n)`` of at most `size` rows, sorted."""
    order = derive_rng(seed, SeedStream.PROBE, *keys).permutation(n)
    return np.sort(order[: min(size, n)])


# ---------- evaluation ----------


def _penalty_value(reg: RegularizerConfig, params: ParamSet) -> float:
    report = penalty_for(reg, params)
    return 0.0 if report is None else report.value


def _layer_metrics(
    params: ParamSet,
    view: TaskView,
    config: ExperimentConfig,
    rep: RepChangeRecord | None,
) -> tuple[LayerMetrics, ...]:
    summaries = spectral_trajectory(params)
    depth = len(summaries)
    grad_erank = [math.nan] * depth
    grad_cond = [math.nan] * depth
    if config.eval.diagnostics:
        rows = probe_rows(
            config.seed,
            view.train.n,
            config.eval.diversity_batch,
            _PROBE_DIVERSITY,
            view.task,
        )
        if rows.size >= 2:
            report = diversity_report(
                params, view.train.inputs[rows], view.train.labels[rows]
            )
            grad_erank = [e.erank for e in report.layers]
            grad_cond = [e.condition for e in report.layers]
    changes = rep.per_layer if rep is not None else (math.nan,) * depth
    return tuple(
        LayerMetrics(
            sigma_max=s.sigma_max,
            sigma_min=s.sigma_min,
            erank=s.erank,
            stable_rank=s.stable_rank,
            grad_erank=grad_erank[i],
            grad_cond=grad_cond[i],
            rep_change=changes[i],
        )
        for i, s in enumerate(summaries)
    )


def evaluate_point(
    params: ParamSet,
    view: TaskView,
    step: int,
    config: ExperimentConfig,
    rep: RepChangeRecord | None = None,
) -> list[MetricsRecord]:
    """Train and test rows for the current parameters on task `view.task`."""
    layers = _layer_metrics(params, view, config, rep)
    penalty = _penalty_value(config.reg, params)
    out: list[MetricsRecord] = []
    for split, data in (("train", view.train), ("test", view.test)):
        loss, acc = evaluate(params, data.inputs, data.labels)
        out.append(
            MetricsRecord(
                task=view.task,
                step=step,
                split=split,
                accuracy=acc,
                loss=loss,
                penalty=penalty,
                layers=layers,
            )
        )
    return out


# ---------- training ----------


def _track_sigma(
    params: ParamSet, reg: RegularizerConfig, step: int, seed: int
) -> None:
    if reg.resolve_every and step % reg.resolve_every == 0:
        solve_power_states(params, seed=seed)
    else:
        refresh_power_states(params, max_iters=reg.power_iters, seed=seed)


def run_experiment(
    config: ExperimentConfig,
    *,
    run_id: str | None = None,
    out: Path | None = None,
) -> RunResult:
    """Run the configured task stream; returns the written artifacts."""
    started_clock = time.perf_counter()
    started = utc_now_iso()
    root = out if out is not None else config.out
    root.mkdir(parents=True, exist_ok=True)
    rid = unique_run_id(root, run_id)
    log = RunLog(root, rid)

    train, test = load_base_data(config)
    stream = build_stream(config, train, test)
    spec = build_spec(config, train)
    params = init_params(spec, config.seed)
    state = OptimState.zeros_like(params)
    reg, hyper, batch = config.reg, config.optim, config.data.batch
    tracks_sigma = reg.effective_kind is RegKind.SPECTRAL
    probe = train.inputs[
        probe_rows(config.seed, train.n, config.eval.probe_batch, _PROBE_REP)
    ]

    log.log(
        "run_start",
        seed=config.seed,
        stream=stream.kind.value,
        tasks=stream.num_tasks,
        epochs=stream.epochs_per_task,
        reg=reg.kind.value,
        strength=reg.strength,
        widths=list(spec.widths),
    )

    records: list[MetricsRecord] = []
    checkpoints: list[Path] = []
    step = 0
    start_params = params.copy()
    for task in range(1, stream.num_tasks + 1):
        view = task_view(stream, task)
        log.log("task_start", task=task, step=step, n_train=view.train.n)

        n = view.train.n
        for epoch in range(stream.epochs_per_task):
            order = minibatch_order(stream, task, epoch, n)
            for lo in range(0, n, batch):
                idx = order[lo : lo + batch]
                if tracks_sigma:
                    _track_sigma(params, reg, step, config.seed)
                res = loss_and_gradients(
                    params, view.train.inputs[idx], view.train.labels[idx]
                )
                grads = composite_gradient(
                    res.grads, penalty_for(reg, params), reg.strength
                )
                state = optimizer_step(params, grads, state, hyper)
                step += 1

                if reg.kind is RegKind.REDO and step % reg.check_every == 0:
                    acts = forward(params, probe).activations
                    masks = redo_reset(
                        params, acts, reg.tau_dormant, config.seed, key=step
                    )
                    log.log(
                        "mitigator",
                        kind="redo",
                        task=task,
                        step=step,
                        reset=[int(m.sum()) for m in masks],
                    )

                last_step = epoch == stream.epochs_per_task - 1 and lo + batch >= n
                every = config.eval.every
                if every > 0 and step % every == 0 and not last_step:
                    rows = evaluate_point(params, view, step, config)
                    records.extend(rows)
                    log.log(
                        "evaluation",
                        task=task,
                        step=step,
                        accuracy=rows[0].accuracy,
                    )

        rep = representation_change(start_params, params, probe)
        start_params = params.copy()
        rows = evaluate_point(params, view, step, config, rep)
        records.extend(rows)
        train_row, test_row = rows
        log.log(
            "evaluation",
            task=task,
            step=step,
            boundary=True,
            accuracy=train_row.accuracy,
        )

        if config.eval.checkpoints:
            path = log.run_dir / "checkpoints" / f"task_{task:03d}.plab"
            checkpoints.append(save_checkpoint(path, params))

        log.log(
            "task_end",
            task=task,
            step=step,
            train_accuracy=train_row.accuracy,
            test_accuracy=test_row.accuracy,
            loss=train_row.loss,
            mean_sigma_max=train_row.mean_sigma_max,
        )

        if reg.kind is RegKind.SHRINK_PERTURB and task < stream.num_tasks:
            shrink_perturb_step(
                params, reg.shrink, reg.perturb, config.seed, key=task
            )
            log.log("mitigator", kind="shrink_perturb", task=task, step=step)

    metrics_path = write_metrics_csv(
        log.run_dir / "metrics.csv", records, spec.depth
    )
    manifest = build_manifest(
        config,
        run_id=rid,
        started=started,
        finished=utc_now_iso(),
        wall_clock_seconds=round(time.perf_counter() - started_clock, 3),
    )
    manifest_path = write_manifest(log.run_dir / "manifest.json", manifest)
    update_latest_run(root, rid)
    log.log("run_end", steps=step, records=len(records))

    return RunResult(
        run_id=rid,
        run_dir=log.run_dir,
        metrics_path=metrics_path,
        manifest_path=manifest_path,
        records=tuple(records),
        checkpoints=tuple(checkpoints),
    )


__all__ = [
    "RunResult",
    "load_base_data",
    "build_stream",
    "build_spec",
    "probe_rows",
    "evaluate_point",
    "run_experiment",
]
