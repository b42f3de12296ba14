"""Negative-feedback instance: the regime where two-snapshot averaging
converges but last-iterate retraining effectively does not.

The map pushes the data mean opposite to the deployed parameter,
D(theta) = N(-sqrt(2 eps) sigma theta, sigma^2), and the loss tracks a
clipped-linear bounded target:

    l(theta; x) = (1/2 gamma) (gamma theta - M (1-delta) clip(x, -w, w)/w)^2

With sigma = w = 1 the exact update is U(theta) = (M(1-delta)/gamma) *
h(-k theta) with h the censored-Gaussian mean and k = sqrt(2 eps). Its
steepest slope sits at the origin:

    sup |U'| = (1-delta) * sqrt(2) sigma (2 Phi(1) - 1) * sqrt(eps) M / gamma
             = 0.96547 (1-delta) * sqrt(eps) M / gamma,

which stays below the two-snapshot per-step constant 0.96593 *
sqrt(eps) M / gamma for any delta, so the per-step bound provably holds on
every averaged step, while plain retraining contracts so slowly for
sqrt(eps) M / gamma slightly above 1 that no stability is detected within
hundreds of iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from ..core.types import GaussianSpec
from ..errors import InvalidInputError
from ..minimizers.feasible import Ball
from ..minimizers.losses import PredictionTargetLoss
from .certificates import CertificateReport, chi2_certificate


def _phi(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def _cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def censored_gaussian_mean(mu: float, sigma: float, w: float) -> float:
    """E[clip(x, -w, w)] for x ~ N(mu, sigma^2)."""
    alpha = (-w - mu) / sigma
    beta = (w - mu) / sigma
    inside = _cdf(beta) - _cdf(alpha)
    return (-w * _cdf(alpha) + w * (1.0 - _cdf(beta))
            + mu * inside - sigma * (_phi(beta) - _phi(alpha)))


def censored_gaussian_sq_mean(mu: float, sigma: float, w: float) -> float:
    """E[clip(x, -w, w)^2] for x ~ N(mu, sigma^2)."""
    alpha = (-w - mu) / sigma
    beta = (w - mu) / sigma
    inside = _cdf(beta) - _cdf(alpha)
    ex_sq_inside = (mu**2 * inside
                    + 2.0 * mu * sigma * (_phi(alpha) - _phi(beta))
                    + sigma**2 * (inside + alpha * _phi(alpha) - beta * _phi(beta)))
    return w**2 * _cdf(alpha) + w**2 * (1.0 - _cdf(beta)) + ex_sq_inside


@dataclass(frozen=True)
class NegativeFeedbackInstance:
    epsilon: float
    M: float = 1.0
    gamma: float = 1.0
    delta: float = 0.02
    sigma: float = 1.0
    clip_width: float = 1.0
    theta0: Optional[np.ndarray] = None

    def __post_init__(self):
        if min(self.epsilon, self.M, self.gamma, self.sigma, self.clip_width) <= 0:
            raise InvalidInputError("parameters must be positive")
        if not 0 < self.delta < 1:
            raise InvalidInputError("delta must lie in (0, 1)")
        t0 = np.atleast_1d(np.asarray(
            self.radius if self.theta0 is None else self.theta0, dtype=float))
        if len(t0) != 1:
            raise InvalidInputError("this construction is scalar (d = 1)")
        object.__setattr__(self, "theta0", t0)

    @property
    def rate(self) -> float:
        return math.sqrt(self.epsilon) * self.M / self.gamma

    @property
    def radius(self) -> float:
        return self.delta * self.M / self.gamma

    @property
    def scale(self) -> float:
        return self.M * (1.0 - self.delta)

    @property
    def shift_gain(self) -> float:
        return self.sigma * math.sqrt(2.0 * self.epsilon)

    @property
    def step_slope(self) -> float:
        """sup |U'|: the one-step Lipschitz constant of the exact update."""
        w, s = self.clip_width, self.sigma
        h_slope = (2.0 * _cdf(w / s) - 1.0) / w
        return (self.scale / self.gamma) * self.shift_gain * h_slope

    @property
    def feasible(self) -> Ball:
        return Ball(self.radius)

    def _target_fn(self, points) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        return np.clip(x, -self.clip_width, self.clip_width) / self.clip_width

    def _target_mean(self, dist: GaussianSpec) -> np.ndarray:
        mu, sig = float(dist.mean[0]), math.sqrt(float(dist.cov))
        return np.array([censored_gaussian_mean(mu, sig, self.clip_width) / self.clip_width])

    def _target_sq_mean(self, dist: GaussianSpec) -> float:
        mu, sig = float(dist.mean[0]), math.sqrt(float(dist.cov))
        return censored_gaussian_sq_mean(mu, sig, self.clip_width) / self.clip_width**2

    @cached_property
    def loss(self) -> PredictionTargetLoss:
        return PredictionTargetLoss(gamma=self.gamma, scale=self.scale,
                                    target_fn=self._target_fn,
                                    target_mean=self._target_mean,
                                    target_sq_mean=self._target_sq_mean)

    def induced(self, theta) -> GaussianSpec:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if len(theta) != 1:
            raise InvalidInputError("this construction is scalar (d = 1)")
        return GaussianSpec(-self.shift_gain * theta, self.sigma**2)

    def update(self, theta) -> np.ndarray:
        return self.loss.argmin_exact([self.induced(theta)], np.array([1.0]), self.feasible)

    def stable_point(self) -> np.ndarray:
        return np.zeros(1)

    def sensitivity_certificate(self, rng, n_pairs: int = 100) -> CertificateReport:
        return chi2_certificate(self, rng, n_pairs, scale=self.radius)
