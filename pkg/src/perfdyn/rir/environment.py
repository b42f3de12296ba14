"""Desk-scale credit-scoring retraining environment.

Each retraining step deploys the current model, realizes the shifted
distribution it induces, collects a dataset from it, and retrains on the
union of the datasets kept by the aggregation schedule (training-set size
grows linearly with the window, as does memory). On a discrete base the
loss shift and performative risk are computed exactly from the shifted
densities, so the only randomness is the sampling of the collected datasets.

Model initialization is shared by every run and method; the data stream for
iteration t of run r does not depend on the method (common random numbers).
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core.rng import spawn
from ..errors import InvalidInputError, UnsupportedModeError
from ..minimizers.runner import RunTrace, resolve_workers
from ..minimizers.schedules import AggregationSchedule
from .base import DiscreteBase
from .mechanism import RejectionRule, rir_density_table
from .model import CreditModel, adam_train


@dataclass(frozen=True)
class InnerSettings:
    """Retraining budget per step: full-batch Adam steps and learning rate."""

    steps: int = 100
    lr: float = 3e-4


@dataclass(frozen=True)
class CreditDataset:
    """Counts of draws per support cell and how many of them carried y = 1."""

    counts: np.ndarray  # (S, F)
    y1: np.ndarray      # (S, F)
    n: int


def draw_dataset(density: np.ndarray, label_p1: np.ndarray, n: int,
                 rng: np.random.Generator) -> CreditDataset:
    """n draws from a discrete shifted distribution, as cell counts with
    binomial label counts (distributionally identical to n sequential
    resample-if-rejected draws)."""
    counts = rng.multinomial(n, density.ravel()).reshape(density.shape)
    y1 = rng.binomial(counts, label_p1)
    return CreditDataset(counts=counts.astype(float), y1=y1.astype(float), n=n)


def pooled_atom_targets(datasets: Sequence[CreditDataset], weights: np.ndarray):
    """Atom weights and mean labels of the schedule-weighted dataset union."""
    u = sum(w * ds.counts / ds.n for w, ds in zip(weights, datasets))
    y = sum(w * ds.y1 / ds.n for w, ds in zip(weights, datasets))
    m = np.divide(y, u, out=np.zeros_like(u), where=u > 0)
    return u.ravel(), m.ravel()


def cell_expected_loss(values: np.ndarray, label_p1: np.ndarray) -> np.ndarray:
    """E_y[(yhat - y)^2] per cell for binary labels."""
    return values**2 - 2.0 * values * label_p1 + label_p1


def exact_risk(density: np.ndarray, values: np.ndarray, label_p1: np.ndarray) -> float:
    return float(np.sum(density * cell_expected_loss(values, label_p1)))


def credit_environment_step(model: CreditModel, base: DiscreteBase, rule: RejectionRule,
                            n_samples: int, inner: InnerSettings, rng: np.random.Generator,
                            past: Optional[Sequence[CreditDataset]] = None,
                            weights=None):
    """Collect a dataset from the model's shifted distribution and retrain.

    Returns (new_model, dataset). `past` extends the training set with
    earlier snapshot datasets (weights over [*past, new]); without it the
    step trains on the fresh draw alone.
    """
    if n_samples < 1:
        raise InvalidInputError("n_samples must be >= 1")
    if not getattr(base, "is_discrete", False):
        raise UnsupportedModeError("the retraining environment needs a discrete base")
    density = rir_density_table(model, rule, base)
    dataset = draw_dataset(density, base.label_p1, n_samples, rng)
    pool = [*past, dataset] if past else [dataset]
    w = np.full(len(pool), 1.0 / len(pool)) if weights is None else np.asarray(weights, float)
    u, m = pooled_atom_targets(pool, w)
    new_model = adam_train(model, base.support(), u, m, steps=inner.steps, lr=inner.lr)
    return new_model, dataset


def _run_one(base: DiscreteBase, rule: RejectionRule, schedule: AggregationSchedule,
             label: str, T: int, seed: int, run: int, n_samples: int,
             inner: InnerSettings, hidden: int) -> RunTrace:
    support = base.support()
    model = CreditModel.init(spawn(seed, 0), n_features=base.schema.n_features,
                             hidden=hidden, delta=rule.delta)
    preds = np.full((T + 1, support.shape[0]), np.nan)
    shift = np.full(T + 1, np.nan)
    risk = np.full(T + 1, np.nan)
    wall = np.zeros(T + 1)
    datasets: list[CreditDataset] = []
    dens_prev = None
    t0 = time.perf_counter()
    for t in range(T + 1):
        vals = model.predict(support).reshape(base.joint.shape)
        dens = rir_density_table(model, rule, base)
        preds[t] = vals.ravel()
        cell_loss = cell_expected_loss(vals, base.label_p1)
        risk[t] = float(np.sum(dens * cell_loss))
        if dens_prev is not None:
            shift[t] = abs(float(np.sum((dens - dens_prev) * cell_loss)))
        dens_prev = dens
        wall[t] = time.perf_counter() - t0
        if t == T:
            break
        datasets.append(draw_dataset(dens, base.label_p1, n_samples, spawn(seed, run, t)))
        w = schedule.weights_for(len(datasets))
        u, m = pooled_atom_targets(datasets[-len(w):], w)
        model = adam_train(model, support, u, m, steps=inner.steps, lr=inner.lr)
    return RunTrace(method=label, run=run, thetas=preds, dist_to_ps=np.full(T + 1, np.nan),
                    loss_shift=shift, perf_risk=risk, wall_time=wall)


def run_credit_experiment(base: DiscreteBase, rule: RejectionRule,
                          schedules: dict, T: int, runs: int, seed: int,
                          n_samples: int = 500, inner: InnerSettings = InnerSettings(),
                          hidden: int = 16, workers: Optional[int] = None
                          ) -> dict[str, list[RunTrace]]:
    """Traces per schedule label, each a list of `runs` seeded runs."""
    jobs = [(base, rule, sched, label, T, seed, r, n_samples, inner, hidden)
            for label, sched in schedules.items() for r in range(runs)]
    n_workers = resolve_workers(workers)
    if n_workers <= 1 or len(jobs) == 1:
        results = [_run_one(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(jobs))) as pool:
            results = list(pool.map(_run_one, *zip(*jobs)))
    out: dict[str, list[RunTrace]] = {label: [] for label in schedules}
    for trace in results:
        out[trace.method].append(trace)
    for label in out:
        out[label].sort(key=lambda tr: tr.run)
    return out
