"""Loss specifications.

Every loss knows how to minimize (and differentiate) the expected risk under
a weighted mixture of induced distributions, both from closed-form moments
and from samples. Both concrete losses are isotropic quadratics in the
decision variable, so the constrained argmin is exactly the projection of
the unconstrained one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, Sequence, runtime_checkable

import numpy as np

from ..core.types import GaussianSpec
from .feasible import FeasibleSet, Unconstrained


@runtime_checkable
class LossSpec(Protocol):
    gamma: float
    has_closed_form: bool

    def argmin_exact(self, dists: Sequence, weights, feasible: FeasibleSet) -> np.ndarray: ...

    def argmin_samples(self, samples: np.ndarray, weights, feasible: FeasibleSet) -> np.ndarray: ...

    def grad_exact(self, theta: np.ndarray, dists: Sequence, weights) -> np.ndarray: ...

    def grad_samples(self, theta: np.ndarray, samples: np.ndarray, weights=None) -> np.ndarray: ...

    def expected_loss(self, theta: np.ndarray, dist) -> float: ...

    def sample_loss(self, theta: np.ndarray, samples: np.ndarray, weights=None) -> float: ...


def _weighted_mean(rows: np.ndarray, weights) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if weights is None:
        return rows.mean(axis=0)
    w = np.asarray(weights, dtype=float)
    return w @ rows / w.sum()


@dataclass(frozen=True)
class QuadraticTrackingLoss:
    """l(z, theta) = gamma/2 ||theta - (beta/gamma) z||^2.

    Strongly convex in theta with modulus gamma; the gradient in z is
    beta-Lipschitz. The expected-risk argmin under any mixture is
    (beta/gamma) times the mixture mean.
    """

    gamma: float
    beta: float
    has_closed_form: bool = True

    def _mixture_mean(self, dists, weights) -> np.ndarray:
        means = np.stack([d.mean for d in dists])
        return np.asarray(weights, dtype=float) @ means

    def argmin_exact(self, dists, weights, feasible=Unconstrained()):
        return feasible.project((self.beta / self.gamma) * self._mixture_mean(dists, weights))

    def argmin_samples(self, samples, weights=None, feasible=Unconstrained()):
        return feasible.project((self.beta / self.gamma) * _weighted_mean(samples, weights))

    def grad_exact(self, theta, dists, weights):
        return self.gamma * np.asarray(theta, dtype=float) - self.beta * self._mixture_mean(dists, weights)

    def grad_samples(self, theta, samples, weights=None):
        return self.gamma * np.asarray(theta, dtype=float) - self.beta * _weighted_mean(samples, weights)

    def expected_loss(self, theta, dist: GaussianSpec) -> float:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        ratio = self.beta / self.gamma
        gap = theta - ratio * dist.mean
        trace = dist.dim * float(dist.cov) if dist.isotropic else float(np.trace(dist.cov))
        return 0.5 * self.gamma * (float(gap @ gap) + ratio**2 * trace)

    def sample_loss(self, theta, samples, weights=None) -> float:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        z = np.atleast_2d(np.asarray(samples, dtype=float))
        gaps = theta[None, :] - (self.beta / self.gamma) * z
        per = 0.5 * self.gamma * np.sum(gaps**2, axis=1)
        if weights is None:
            return float(per.mean())
        w = np.asarray(weights, dtype=float)
        return float(w @ per / w.sum())


@dataclass(frozen=True)
class PredictionTargetLoss:
    """l(theta; x) = (1/2 gamma) ||gamma theta - scale * T(x)||^2 for a
    constant predictor f_theta(x) = theta and a bounded target transform T.

    Strongly convex in the prediction with modulus gamma; the prediction
    gradient is gamma*theta - scale*T(x), bounded by gamma*||theta|| +
    scale*sup||T||. The instance supplies T and its first/second moments
    under an induced distribution:

      target_fn(points)    -- T row-wise, for empirical mode
      target_mean(dist)    -- E[T(x)] under dist (vector)
      target_sq_mean(dist) -- E[||T(x)||^2] under dist (scalar)
    """

    gamma: float
    scale: float
    target_fn: Callable[[np.ndarray], np.ndarray]
    target_mean: Callable[[object], np.ndarray]
    target_sq_mean: Callable[[object], float]
    has_closed_form: bool = True

    def _mixture_target_mean(self, dists, weights) -> np.ndarray:
        means = np.stack([np.atleast_1d(np.asarray(self.target_mean(d), dtype=float)) for d in dists])
        return np.asarray(weights, dtype=float) @ means

    def argmin_exact(self, dists, weights, feasible=Unconstrained()):
        return feasible.project((self.scale / self.gamma) * self._mixture_target_mean(dists, weights))

    def argmin_samples(self, samples, weights=None, feasible=Unconstrained()):
        targets = np.atleast_2d(np.asarray(self.target_fn(samples), dtype=float).reshape(len(samples), -1))
        return feasible.project((self.scale / self.gamma) * _weighted_mean(targets, weights))

    def grad_exact(self, theta, dists, weights):
        return self.gamma * np.asarray(theta, dtype=float) - self.scale * self._mixture_target_mean(dists, weights)

    def grad_samples(self, theta, samples, weights=None):
        targets = np.atleast_2d(np.asarray(self.target_fn(samples), dtype=float).reshape(len(samples), -1))
        return self.gamma * np.asarray(theta, dtype=float) - self.scale * _weighted_mean(targets, weights)

    def expected_loss(self, theta, dist) -> float:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        m = np.atleast_1d(np.asarray(self.target_mean(dist), dtype=float))
        q = float(self.target_sq_mean(dist))
        return (self.gamma**2 * float(theta @ theta)
                - 2.0 * self.gamma * self.scale * float(theta @ m)
                + self.scale**2 * q) / (2.0 * self.gamma)

    def sample_loss(self, theta, samples, weights=None) -> float:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        targets = np.atleast_2d(np.asarray(self.target_fn(samples), dtype=float).reshape(len(samples), -1))
        gaps = self.gamma * theta[None, :] - self.scale * targets
        per = np.sum(gaps**2, axis=1) / (2.0 * self.gamma)
        if weights is None:
            return float(per.mean())
        w = np.asarray(weights, dtype=float)
        return float(w @ per / w.sum())
