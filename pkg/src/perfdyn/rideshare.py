"""Two-firm pricing game with linear demand.

Each firm i observes demand z_i = A_own x_i + A_cross x_opp + xi with
xi ~ N(z_base, I) over the city's locations, and best-responds by minimizing
E[-z_i . x_i + (lambda/2)||x_i||^2] over the price box: the separable
quadratic makes clip(mean demand / lambda) the exact constrained argmin.
Snapshot aggregation reuses the demand datasets collected at past prices.

Loss shift and performative risk for player 1 are computed from exact demand
means, so run noise enters only through the sampled demand driving the
price path.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core.rng import spawn
from .errors import InvalidInputError
from .minimizers.runner import RunTrace, resolve_workers
from .minimizers.schedules import AggregationSchedule

PRICE_LO, PRICE_HI = -30.0, 30.0


@dataclass(frozen=True)
class MarketSpec:
    """Elasticities and base demand for one firm's observed demand."""

    a_own: np.ndarray     # (L, L), entrywise <= 0
    a_cross: np.ndarray   # (L, L), entrywise >= 0
    z_base: np.ndarray    # (L,), nonnegative mean demand per location

    def __post_init__(self):
        own = np.asarray(self.a_own, dtype=float)
        cross = np.asarray(self.a_cross, dtype=float)
        base = np.asarray(self.z_base, dtype=float)
        L = len(base)
        if own.shape != (L, L) or cross.shape != (L, L):
            raise InvalidInputError("elasticity matrices must be square and match z_base")
        if np.any(own > 0):
            raise InvalidInputError("own-price elasticities must be <= 0")
        if np.any(cross < 0):
            raise InvalidInputError("cross-price elasticities must be >= 0")
        off = ~np.eye(L, dtype=bool)
        if not (np.any(own[off] != 0) or np.any(cross[off] != 0)):
            raise InvalidInputError("elasticity matrices must couple locations (non-diagonal)")
        if np.any(base < 0):
            raise InvalidInputError("base demand must be nonnegative")
        object.__setattr__(self, "a_own", own)
        object.__setattr__(self, "a_cross", cross)
        object.__setattr__(self, "z_base", base)

    @property
    def locations(self) -> int:
        return len(self.z_base)

    def mean_demand(self, x_own: np.ndarray, x_opp: np.ndarray) -> np.ndarray:
        return self.a_own @ x_own + self.a_cross @ x_opp + self.z_base


def synthetic_market(seed: int, locations: int = 11, lam: float = 70.0,
                     off_diag_density: float = 0.2) -> MarketSpec:
    """Seeded market: A_own = -(D + 0.1 O), A_cross = 0.5 (D' + 0.1 O') with
    diagonal entries uniform in [0.5, 1.5] and sparse nonnegative off-diagonal
    coupling; z_base uniform in [50, 150]. Magnitudes keep ||A_own|| < lam so
    the noise-free best-response map contracts."""
    rng = spawn(seed, 71)

    def block(sign: float, factor: float) -> np.ndarray:
        d = np.diag(rng.uniform(0.5, 1.5, size=locations))
        mask = rng.random((locations, locations)) < off_diag_density
        np.fill_diagonal(mask, False)
        off = rng.uniform(0.0, 1.0, size=(locations, locations)) * mask
        return sign * factor * (d + 0.1 * off)

    spec = MarketSpec(a_own=block(-1.0, 1.0), a_cross=block(1.0, 0.5),
                      z_base=rng.uniform(50.0, 150.0, size=locations))
    if np.linalg.norm(spec.a_own, 2) >= lam:
        raise InvalidInputError("own elasticity too strong for the contraction regime")
    return spec


def demand_draw(spec: MarketSpec, x_own: np.ndarray, x_opp: np.ndarray,
                n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. demand samples (n, locations) at the given prices."""
    if n < 1:
        raise InvalidInputError("need n >= 1")
    mean = spec.mean_demand(np.asarray(x_own, float), np.asarray(x_opp, float))
    return mean + rng.standard_normal((n, spec.locations))


def best_response(demand_samples: np.ndarray, lam: float) -> np.ndarray:
    """clip(mean demand / lambda) onto the price box: the exact minimizer of
    E[-z.x + (lambda/2)||x||^2] (separable quadratic, so clipping is the
    exact projection)."""
    if lam <= 0:
        raise InvalidInputError("lambda must be positive")
    zbar = np.atleast_2d(np.asarray(demand_samples, dtype=float)).mean(axis=0)
    return np.clip(zbar / lam, PRICE_LO, PRICE_HI)


def revenue_loss(mean_demand: np.ndarray, price: np.ndarray, lam: float) -> float:
    """E[-z.x + (lambda/2)||x||^2] from the exact demand mean."""
    return float(-mean_demand @ price + 0.5 * lam * price @ price)


@dataclass(frozen=True)
class GameConfig:
    lam: float = 70.0
    n_demand: int = 25
    update_order: str = "simultaneous"  # or "alternating"

    def __post_init__(self):
        if self.update_order not in ("simultaneous", "alternating"):
            raise InvalidInputError(f"unknown update order {self.update_order!r}")


def _play_one(spec1: MarketSpec, spec2: MarketSpec, schedule: AggregationSchedule,
              label: str, cfg: GameConfig, T: int, seed: int, run: int) -> RunTrace:
    init_rng = spawn(seed, run, 0, 7)
    x1 = init_rng.uniform(0.0, 1.0, size=spec1.locations)
    x2 = init_rng.uniform(0.0, 1.0, size=spec2.locations)

    prices = np.full((T + 1, spec1.locations), np.nan)
    shift = np.full(T + 1, np.nan)
    risk = np.full(T + 1, np.nan)
    wall = np.zeros(T + 1)
    mean_prev = None
    data1: list[np.ndarray] = []
    data2: list[np.ndarray] = []
    t0 = time.perf_counter()
    for t in range(T + 1):
        prices[t] = x1
        mean1 = spec1.mean_demand(x1, x2)
        risk[t] = revenue_loss(mean1, x1, cfg.lam)
        if mean_prev is not None:
            shift[t] = abs(float((mean1 - mean_prev) @ x1))
        mean_prev = mean1
        wall[t] = time.perf_counter() - t0
        if t == T:
            break

        rng1 = spawn(seed, run, t, 1)
        rng2 = spawn(seed, run, t, 2)
        if cfg.update_order == "simultaneous":
            data1.append(demand_draw(spec1, x1, x2, cfg.n_demand, rng1))
            data2.append(demand_draw(spec2, x2, x1, cfg.n_demand, rng2))
            w = schedule.weights_for(len(data1))
            x1_new = best_response(_pool(data1, w), cfg.lam)
            x2_new = best_response(_pool(data2, w), cfg.lam)
            x1, x2 = x1_new, x2_new
        else:
            data1.append(demand_draw(spec1, x1, x2, cfg.n_demand, rng1))
            w = schedule.weights_for(len(data1))
            x1 = best_response(_pool(data1, w), cfg.lam)
            data2.append(demand_draw(spec2, x2, x1, cfg.n_demand, rng2))
            w2 = schedule.weights_for(len(data2))
            x2 = best_response(_pool(data2, w2), cfg.lam)
    return RunTrace(method=label, run=run, thetas=prices,
                    dist_to_ps=np.full(T + 1, np.nan), loss_shift=shift,
                    perf_risk=risk, wall_time=wall)


def _pool(datasets: list[np.ndarray], weights: np.ndarray) -> np.ndarray:
    """Schedule-weighted mixture of snapshot demand datasets, reduced to the
    weighted mean row (equal-sized sets, so weighting per-snapshot means
    equals weighting the pooled samples)."""
    used = datasets[-len(weights):]
    means = np.stack([s.mean(axis=0) for s in used])
    return (np.asarray(weights, dtype=float) @ means)[None, :]


def game_loop(spec1: MarketSpec, spec2: MarketSpec, schedules: dict, T: int = 40,
              runs: int = 200, seed: int = 0, cfg: GameConfig = GameConfig(),
              workers: Optional[int] = None) -> dict[str, list[RunTrace]]:
    """Player-1 traces per schedule label over seeded runs. Both firms use
    the same aggregation schedule; price initialization and demand noise for
    a given run do not depend on the schedule."""
    jobs = [(spec1, spec2, sched, label, cfg, T, seed, r)
            for label, sched in schedules.items() for r in range(runs)]
    n_workers = resolve_workers(workers)
    if n_workers <= 1 or len(jobs) == 1:
        results = [_play_one(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(jobs))) as pool:
            results = list(pool.map(_play_one, *zip(*jobs), chunksize=8))
    out: dict[str, list[RunTrace]] = {label: [] for label in schedules}
    for trace in results:
        out[trace.method].append(trace)
    for label in out:
        out[label].sort(key=lambda tr: tr.run)
    return out
