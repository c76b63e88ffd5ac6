from __future__ import annotations

from mxm.plasticity.harness.demos import (
    ConditioningReport,
    DescentOutcome,
    IllustrativeReport,
    conditioning_demo,
    descend,
    illustrative_demo,
    section32_demo,
    two_layer_gradients,
)
from mxm.plasticity.harness.experiment import RunResult, evaluate_point, run_experiment
from mxm.plasticity.harness.manifest import RunManifest, build_manifest, read_manifest
from mxm.plasticity.harness.metrics import (
    LayerMetrics,
    MetricsRecord,
    boundary_rows,
    read_metrics_csv,
    write_metrics_csv,
)
from mxm.plasticity.harness.runlog import RunLog
from mxm.plasticity.harness.sweep import (
    SweepCell,
    SweepResult,
    SweepRow,
    run_sweep,
    sweep_grid,
)

__all__ = [
    "ConditioningReport",
    "DescentOutcome",
    "IllustrativeReport",
    "descend",
    "illustrative_demo",
    "conditioning_demo",
    "section32_demo",
    "two_layer_gradients",
    "RunResult",
    "evaluate_point",
    "run_experiment",
    "RunManifest",
    "build_manifest",
    "read_manifest",
    "LayerMetrics",
    "MetricsRecord",
    "boundary_rows",
    "read_metrics_csv",
    "write_metrics_csv",
    "RunLog",
    "SweepCell",
    "SweepResult",
    "SweepRow",
    "run_sweep",
    "sweep_grid",
]
