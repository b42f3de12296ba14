from .feasible import Ball, Box, FeasibleSet, Unconstrained
from .losses import LossSpec, PredictionTargetLoss, QuadraticTrackingLoss
from .runner import (
    Method,
    RunTrace,
    detect_stable,
    resolve_workers,
    run_dynamics,
    write_trace_csv,
    WORKERS_ENV_VAR,
)
from .schedules import (
    AggregationSchedule,
    Snapshot,
    SnapshotHistory,
    all_history,
    explicit,
    half_history,
    window,
)
from .solver import SolverSettings, inner_gradient_solver
from .steps import EmpiricalMode, ExactMode, Mode, arm_step, rgd_step, rrm_step

__all__ = [
    "AggregationSchedule",
    "Ball",
    "Box",
    "EmpiricalMode",
    "ExactMode",
    "FeasibleSet",
    "LossSpec",
    "Method",
    "Mode",
    "PredictionTargetLoss",
    "QuadraticTrackingLoss",
    "RunTrace",
    "Snapshot",
    "SnapshotHistory",
    "SolverSettings",
    "Unconstrained",
    "WORKERS_ENV_VAR",
    "all_history",
    "arm_step",
    "detect_stable",
    "explicit",
    "half_history",
    "inner_gradient_solver",
    "resolve_workers",
    "rgd_step",
    "rrm_step",
    "run_dynamics",
    "window",
    "write_trace_csv",
]
