"""Single retraining steps: repeated risk minimization, repeated gradient
descent, and the snapshot-aggregating affine risk minimizer step.

Exact mode works on closed-form moments of the induced distributions;
empirical mode works on drawn datasets. An affine step in empirical mode
pools sample sets per snapshot: stored datasets are reused in full
(equal-sized, weighted by the schedule), while distribution handles are
sampled fresh at ceil(n/k) draws per snapshot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import InvalidInputError, ScheduleModeError
from .feasible import FeasibleSet, Unconstrained
from .losses import LossSpec
from .schedules import AggregationSchedule, SnapshotHistory
from .solver import SolverSettings, inner_gradient_solver


@dataclass(frozen=True)
class ExactMode:
    """Minimize expected risk from closed-form moments."""


@dataclass(frozen=True)
class EmpiricalMode:
    """Minimize the sample-average risk over n_samples draws."""

    n_samples: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise InvalidInputError("n_samples must be >= 1")


Mode = ExactMode | EmpiricalMode


def _argmin(loss: LossSpec, feasible, dists=None, weights=None, samples=None,
            sample_weights=None, start=None, solver="closed_form",
            settings: Optional[SolverSettings] = None):
    if solver == "closed_form" and loss.has_closed_form:
        if dists is not None:
            return loss.argmin_exact(dists, weights, feasible)
        return loss.argmin_samples(samples, sample_weights, feasible)
    settings = settings or SolverSettings()
    if dists is not None:
        grad = lambda th: loss.grad_exact(th, dists, weights)
    else:
        grad = lambda th: loss.grad_samples(th, samples, sample_weights)
    return inner_gradient_solver(grad, start, feasible,
                                 lr=settings.lr, max_iters=settings.max_iters,
                                 grad_tol=settings.grad_tol)


def rrm_step(current: np.ndarray, dist_map, loss: LossSpec,
             feasible: FeasibleSet = Unconstrained(), *,
             mode: Mode = ExactMode(), solver: str = "closed_form",
             settings: Optional[SolverSettings] = None,
             rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """argmin over the feasible set of expected loss under D(f_current)."""
    dist = dist_map.induced(current)
    if isinstance(mode, ExactMode):
        return _argmin(loss, feasible, dists=[dist], weights=np.array([1.0]),
                       start=current, solver=solver, settings=settings)
    if rng is None:
        raise InvalidInputError("empirical mode needs an explicit rng")
    samples = dist.sample(rng, mode.n_samples)
    return _argmin(loss, feasible, samples=samples, start=current,
                   solver=solver, settings=settings)


def rgd_step(current: np.ndarray, dist_map, loss: LossSpec, eta: float,
             feasible: FeasibleSet = Unconstrained(), *,
             mode: Mode = ExactMode(),
             rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """One projected gradient step on the risk under D(f_current)."""
    if eta < 0:
        raise InvalidInputError("eta must be nonnegative")
    current = np.asarray(current, dtype=float)
    dist = dist_map.induced(current)
    if isinstance(mode, ExactMode):
        grad = loss.grad_exact(current, [dist], np.array([1.0]))
    else:
        if rng is None:
            raise InvalidInputError("empirical mode needs an explicit rng")
        grad = loss.grad_samples(current, dist.sample(rng, mode.n_samples))
    return feasible.project(current - eta * grad)


def arm_step(history: SnapshotHistory, schedule: AggregationSchedule,
             dist_map, loss: LossSpec, feasible: FeasibleSet = Unconstrained(), *,
             mode: Mode = ExactMode(), solver: str = "closed_form",
             settings: Optional[SolverSettings] = None,
             rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """argmin of expected loss under the schedule's mixture of past induced
    distributions (exact) or the pooled snapshot datasets (empirical)."""
    if len(history) < 1:
        raise InvalidInputError("affine step needs at least one snapshot")
    weights = schedule.weights_for(len(history))
    snaps = history.last(len(weights))
    start = snaps[-1].theta

    if isinstance(mode, ExactMode):
        dists = [s.payload if s.payload is not None and hasattr(s.payload, "mean")
                 else dist_map.induced(s.theta) for s in snaps]
        return _argmin(loss, feasible, dists=dists, weights=weights,
                       start=start, solver=solver, settings=settings)

    if np.any(weights < 0):
        raise ScheduleModeError("signed schedules are legal only in exact-moment mode")
    sample_sets = []
    for snap in snaps:
        payload = snap.payload
        if payload is not None and isinstance(payload, np.ndarray):
            sample_sets.append(payload)  # reuse the dataset collected at deployment
        else:
            if rng is None:
                raise InvalidInputError("fresh mixture sampling needs an explicit rng")
            dist = payload if payload is not None else dist_map.induced(snap.theta)
            per = math.ceil(mode.n_samples / len(snaps))
            sample_sets.append(dist.sample(rng, per))
    samples = np.concatenate(sample_sets, axis=0)
    sample_weights = np.concatenate(
        [np.full(len(s), w / len(s)) for s, w in zip(sample_sets, weights)])
    return _argmin(loss, feasible, samples=samples, sample_weights=sample_weights,
                   start=start, solver=solver, settings=settings)
