"""Evaluation quantities computed on models and traces: the loss shift due
to performativity, the performative risk, and lower/upper rate-curve overlay
checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .minimizers.losses import LossSpec


@dataclass(frozen=True)
class MetricRow:
    t: int
    delta_r: float
    perf_risk: float
    dist_to_ps: Optional[float] = None

    def __post_init__(self):
        if self.delta_r < 0 or (self.dist_to_ps is not None and self.dist_to_ps < 0):
            raise InvalidInputError("loss shift and distances are nonnegative")


def loss_shift(loss: LossSpec, theta, dist_t, dist_prev, *,
               n: Optional[int] = None, rng=None) -> float:
    """|E_{z ~ dist_t}[l(z, theta)] - E_{z ~ dist_prev}[l(z, theta)]| with the
    model held fixed at theta. Exact from closed-form moments, or from n
    fresh evaluation draws per distribution."""
    if n is None:
        return abs(loss.expected_loss(theta, dist_t) - loss.expected_loss(theta, dist_prev))
    if rng is None:
        raise InvalidInputError("sampled evaluation needs an explicit rng")
    a = loss.sample_loss(theta, dist_t.sample(rng, n))
    b = loss.sample_loss(theta, dist_prev.sample(rng, n))
    return abs(a - b)


def performative_risk(loss: LossSpec, theta, dist, *,
                      n: Optional[int] = None, rng=None) -> float:
    """Expected loss of theta on the distribution theta itself induces."""
    if n is None:
        return loss.expected_loss(theta, dist)
    if rng is None:
        raise InvalidInputError("sampled evaluation needs an explicit rng")
    return loss.sample_loss(theta, dist.sample(rng, n))


@dataclass(frozen=True)
class OverlayReport:
    direction: str
    slack: float
    passed: bool
    worst_ratio: float
    worst_iteration: int


def overlay_check(distances, curve, direction: str, slack: float) -> OverlayReport:
    """Compare measured distances against a theoretical curve.

    lower: min_t distance_t / curve_t >= slack (trace never decays below the
    curve, up to slack); upper: max_t distance_t / curve_t <= 1/slack.
    """
    d = np.asarray(distances, dtype=float)
    c = np.asarray(curve, dtype=float)
    if d.shape != c.shape:
        raise InvalidInputError(f"length mismatch: {d.shape} vs {c.shape}")
    if direction not in ("lower", "upper"):
        raise InvalidInputError(f"direction must be lower or upper, got {direction!r}")
    if not 0 < slack <= 1:
        raise InvalidInputError("slack must lie in (0, 1]")
    ratios = d / c
    if direction == "lower":
        worst = int(np.argmin(ratios))
        passed = bool(ratios[worst] >= slack)
    else:
        worst = int(np.argmax(ratios))
        passed = bool(ratios[worst] <= 1.0 / slack)
    return OverlayReport(direction=direction, slack=slack, passed=passed,
                         worst_ratio=float(ratios[worst]), worst_iteration=worst)
