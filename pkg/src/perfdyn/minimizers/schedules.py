"""Snapshot aggregation: which past deployments contribute to the training
distribution, and with what weights.

A schedule produces weights over the most recent snapshots. Early iterations
with fewer snapshots than the window fall back to uniform weights over all
available snapshots (larger-window methods follow the smaller-window update
rule until enough history exists).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import math

import numpy as np

from ..errors import InvalidInputError

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class AggregationSchedule:
    """Weights over past snapshots.

    mode:
      window   -- uniform 1/tau over the last tau snapshots
      half     -- uniform over the last ceil(t/2) snapshots (t = iterations run)
      all      -- uniform over every snapshot so far
      explicit -- fixed weight vector over the most recent len(weights)
                  snapshots, oldest first; must sum to 1 and may be signed
                  (signed mixtures are legal only with closed-form moments)
    """

    mode: str
    tau: Optional[int] = None
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.mode not in ("window", "half", "all", "explicit"):
            raise InvalidInputError(f"unknown schedule mode {self.mode!r}")
        if self.mode == "window":
            if self.tau is None or int(self.tau) < 1:
                raise InvalidInputError("window schedule needs tau >= 1")
            object.__setattr__(self, "tau", int(self.tau))
        if self.mode == "explicit":
            w = np.asarray(self.weights, dtype=float)
            if w.ndim != 1 or len(w) < 1:
                raise InvalidInputError("explicit schedule needs a weight vector")
            if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
                raise InvalidInputError(f"weights sum to {w.sum()!r}, expected 1")
            object.__setattr__(self, "weights", w)

    def weights_for(self, available: int) -> np.ndarray:
        """Weights over the last k snapshots, oldest first, given how many
        snapshots exist."""
        if available < 1:
            raise InvalidInputError("no snapshots available")
        if self.mode == "window":
            k = min(self.tau, available)
        elif self.mode == "half":
            k = max(1, min(available, math.ceil((available - 1) / 2)))
        elif self.mode == "all":
            k = available
        else:
            if available < len(self.weights):
                k = available  # fall back to uniform during warm-up
                return np.full(k, 1.0 / k)
            return self.weights.copy()
        return np.full(k, 1.0 / k)

    @property
    def label(self) -> str:
        if self.mode == "window":
            return f"w{self.tau}"
        return self.mode


def window(tau: int) -> AggregationSchedule:
    return AggregationSchedule(mode="window", tau=tau)


def half_history() -> AggregationSchedule:
    return AggregationSchedule(mode="half")


def all_history() -> AggregationSchedule:
    return AggregationSchedule(mode="all")


def explicit(weights) -> AggregationSchedule:
    return AggregationSchedule(mode="explicit", weights=np.asarray(weights, dtype=float))


@dataclass(frozen=True)
class Snapshot:
    """One deployment record: iteration, parameters, and either the induced
    distribution handle (exact mode) or the dataset drawn under it."""

    t: int
    theta: np.ndarray
    payload: Any = None


@dataclass
class SnapshotHistory:
    """Ordered deployment records with an optional keep-last-k policy."""

    capacity: Optional[int] = None
    entries: list = field(default_factory=list)

    def append(self, t: int, theta: np.ndarray, payload=None) -> None:
        if self.entries and t <= self.entries[-1].t:
            raise InvalidInputError("snapshot iterations must strictly increase")
        self.entries.append(Snapshot(t=t, theta=np.asarray(theta, dtype=float), payload=payload))
        if self.capacity is not None and len(self.entries) > self.capacity:
            del self.entries[: len(self.entries) - self.capacity]

    def __len__(self) -> int:
        return len(self.entries)

    def last(self, k: int) -> list:
        if k > len(self.entries):
            raise InvalidInputError(f"requested {k} snapshots, only {len(self.entries)} kept")
        return self.entries[-k:]
