"""Multi-run driver for the retraining dynamics.

Each run owns its RNG streams (derived from the root seed, the run index and
the iteration) and its trace buffer; runs never share mutable state, so a
worker pool changes wall time but not output. The data stream for iteration
t does not depend on the method, which gives common random numbers across
methods for a given run.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core.rng import spawn
from ..errors import InvalidInputError, PerfdynError
from .schedules import AggregationSchedule, SnapshotHistory, window
from .steps import EmpiricalMode, ExactMode, Mode, arm_step, rgd_step
from .solver import SolverSettings

WORKERS_ENV_VAR = "PERFDYN_WORKERS"


def resolve_workers(workers: Optional[int] = None) -> int:
    """Explicit argument wins, then the environment override, then the
    available parallelism."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV_VAR)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Method:
    """A dynamics choice: rrm, rgd (with step size eta), or arm with an
    aggregation schedule."""

    kind: str
    schedule: Optional[AggregationSchedule] = None
    eta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("rrm", "rgd", "arm"):
            raise InvalidInputError(f"unknown method kind {self.kind!r}")
        if self.kind == "arm" and self.schedule is None:
            raise InvalidInputError("arm needs an aggregation schedule")
        if self.kind == "rgd" and (self.eta is None or self.eta <= 0):
            raise InvalidInputError("rgd needs a positive eta")

    @property
    def label(self) -> str:
        if self.kind == "arm":
            return f"arm_{self.schedule.label}"
        return self.kind


@dataclass
class RunTrace:
    """Per-iteration record of one run: parameters, distance to the stable
    point when known, loss shift, performative risk and wall time."""

    method: str
    run: int
    thetas: np.ndarray          # (T+1, d)
    dist_to_ps: np.ndarray      # (T+1,), nan when no stable point is exposed
    loss_shift: np.ndarray      # (T+1,), nan at t=0
    perf_risk: np.ndarray       # (T+1,)
    wall_time: np.ndarray       # (T+1,), not serialized

    @property
    def iterations(self) -> np.ndarray:
        return np.arange(len(self.thetas))


def detect_stable(trace: RunTrace, tol: float) -> Optional[int]:
    """First t with ||theta^{t+1} - theta^t|| <= tol, or None."""
    if tol <= 0:
        raise InvalidInputError("tolerance must be positive")
    diffs = np.linalg.norm(np.diff(trace.thetas, axis=0), axis=1)
    hits = np.nonzero(diffs <= tol)[0]
    return int(hits[0]) if len(hits) else None


def _run_single(instance, method: Method, T: int, seed: int, run: int,
                mode: Mode, n_eval: int, settings: Optional[SolverSettings]) -> RunTrace:
    empirical = isinstance(mode, EmpiricalMode)
    schedule = method.schedule if method.kind == "arm" else window(1)
    theta = np.atleast_1d(np.asarray(instance.theta0, dtype=float)).copy()
    theta_ps = instance.stable_point()
    loss, feasible = instance.loss, instance.feasible

    d = len(theta)
    thetas = np.full((T + 1, d), np.nan)
    dist_col = np.full(T + 1, np.nan)
    shift_col = np.full(T + 1, np.nan)
    risk_col = np.full(T + 1, np.nan)
    wall = np.zeros(T + 1)

    history = SnapshotHistory()
    eval_prev = None  # evaluation draws from the previous induced distribution
    dist_prev = None
    t0 = time.perf_counter()
    for t in range(T + 1):
        thetas[t] = theta
        dist_t = instance.induced(theta)
        if theta_ps is not None:
            dist_col[t] = float(np.linalg.norm(theta - theta_ps))
        if empirical:
            eval_t = dist_t.sample(spawn(seed, run, t, 1), n_eval)
            risk_col[t] = loss.sample_loss(theta, eval_t)
            if eval_prev is not None:
                shift_col[t] = abs(risk_col[t] - loss.sample_loss(theta, eval_prev))
            eval_prev = eval_t
        else:
            risk_col[t] = loss.expected_loss(theta, dist_t)
            if dist_prev is not None:
                shift_col[t] = abs(risk_col[t] - loss.expected_loss(theta, dist_prev))
            dist_prev = dist_t
        wall[t] = time.perf_counter() - t0
        if t == T:
            break

        data_rng = spawn(seed, run, t, 0)
        try:
            if method.kind == "rgd":
                # the gradient step consumes the iteration's single dataset
                history.append(t, theta, None)
                theta = rgd_step(theta, instance, loss, method.eta, feasible,
                                 mode=mode, rng=data_rng)
            else:
                payload = dist_t.sample(data_rng, mode.n_samples) if empirical else dist_t
                history.append(t, theta, payload)
                theta = arm_step(history, schedule, instance, loss, feasible,
                                 mode=mode, settings=settings, rng=data_rng)
        except PerfdynError as exc:
            raise type(exc)(f"run {run}, iteration {t}: {exc}") from exc
    return RunTrace(method=method.label, run=run, thetas=thetas,
                    dist_to_ps=dist_col, loss_shift=shift_col,
                    perf_risk=risk_col, wall_time=wall)


def run_dynamics(instance, method: Method, T: int, runs: int, seed: int,
                 mode: Mode = ExactMode(), *, n_eval: int = 10_000,
                 settings: Optional[SolverSettings] = None,
                 workers: Optional[int] = None) -> list[RunTrace]:
    """R seeded runs of T iterations each; traces ordered by run index and
    bit-reproducible from (seed, run)."""
    if T < 0 or runs < 1:
        raise InvalidInputError("need T >= 0 and runs >= 1")
    args = [(instance, method, T, seed, r, mode, n_eval, settings) for r in range(runs)]
    n_workers = resolve_workers(workers)
    if n_workers <= 1 or runs == 1:
        return [_run_single(*a) for a in args]
    with ProcessPoolExecutor(max_workers=min(n_workers, runs)) as pool:
        return list(pool.map(_run_single, *zip(*args)))


def write_trace_csv(traces: Sequence[RunTrace], path) -> None:
    """One CSV per (method, instance): columns t, run, dist_to_ps,
    loss_shift, perf_risk; floats at 17 significant digits; absent metrics
    are empty fields."""

    def fmt(x: float) -> str:
        return "" if np.isnan(x) else f"{x:.17g}"

    with open(path, "w", newline="") as fh:
        fh.write("t,run,dist_to_ps,loss_shift,perf_risk\n")
        for trace in traces:
            for t in range(len(trace.thetas)):
                fh.write(f"{t},{trace.run},{fmt(trace.dist_to_ps[t])},"
                         f"{fmt(trace.loss_shift[t])},{fmt(trace.perf_risk[t])}\n")
