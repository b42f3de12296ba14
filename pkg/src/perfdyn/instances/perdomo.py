"""Analytic instances in the parameter-sensitivity (Wasserstein) framework:
a quadratic tracking loss l(z, theta) = gamma/2 ||theta - (beta/gamma) z||^2
with a Gaussian mean shift driven by the deployed parameters.

The tightness instance shifts the mean linearly, z ~ N(eps * theta, sigma^2),
making exact repeated risk minimization literally multiplication by
eps*beta/gamma. The lower-bound instance routes the shift through the chain
matrix, z ~ N((eps/2) A theta + e_1, sigma^2), so each retraining step can
discover at most one new coordinate of the stable point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from ..core.closed_forms import (
    geometric_triangular_inverse_apply,
    jordan_chain_matrix,
)
from ..core.types import GaussianSpec
from ..errors import InvalidInputError, RegimeViolationError
from ..minimizers.feasible import Unconstrained
from ..minimizers.losses import QuadraticTrackingLoss
from .certificates import CertificateReport, w1_certificate


@dataclass(frozen=True)
class PerdomoTightnessInstance:
    """z ~ N(eps * theta, sigma^2); exact RRM update (eps*beta/gamma) * theta;
    the stable point is the origin and the parameter-framework rate is met
    with equality."""

    epsilon: float
    beta: float
    gamma: float
    sigma_sq: float = 1.0
    theta0: np.ndarray = field(default_factory=lambda: np.array([1.0]))

    def __post_init__(self):
        if min(self.epsilon, self.beta, self.gamma, self.sigma_sq) <= 0:
            raise InvalidInputError("all parameters must be positive")
        object.__setattr__(self, "theta0", np.atleast_1d(np.asarray(self.theta0, dtype=float)))

    @property
    def feasible(self):
        return Unconstrained()

    @cached_property
    def loss(self) -> QuadraticTrackingLoss:
        return QuadraticTrackingLoss(gamma=self.gamma, beta=self.beta)

    @property
    def rate(self) -> float:
        return self.epsilon * self.beta / self.gamma

    def induced(self, theta) -> GaussianSpec:
        return GaussianSpec(self.epsilon * np.atleast_1d(np.asarray(theta, dtype=float)),
                            self.sigma_sq)

    def update(self, theta) -> np.ndarray:
        return self.loss.argmin_exact([self.induced(theta)], np.array([1.0]), self.feasible)

    def stable_point(self) -> np.ndarray:
        return np.zeros_like(self.theta0)

    def sensitivity_certificate(self, rng, n_pairs: int = 100) -> CertificateReport:
        return w1_certificate(self, rng, n_pairs, scale=float(np.linalg.norm(self.theta0)) + 1.0)


@dataclass(frozen=True)
class PerdomoLowerBoundInstance:
    """z ~ N((eps/2) A theta + e_1, sigma^2 I) with A the chain matrix;
    affine exact update (beta/gamma)((eps/2) A theta + e_1), stable point
    ((gamma/beta) I - (eps/2) A)^-1 e_1 with geometric entries."""

    epsilon: float
    beta: float
    gamma: float
    sigma_sq: float = 1.0
    horizon: int = 20

    def __post_init__(self):
        if min(self.epsilon, self.beta, self.gamma, self.sigma_sq) <= 0:
            raise InvalidInputError("all parameters must be positive")
        if self.horizon < 1:
            raise InvalidInputError("horizon must be >= 1")

    @property
    def d(self) -> int:
        return 2 * self.horizon

    @cached_property
    def chain(self) -> np.ndarray:
        return jordan_chain_matrix(self.d)

    @cached_property
    def theta0(self) -> np.ndarray:
        e1 = np.zeros(self.d)
        e1[0] = 1.0
        return e1

    @property
    def feasible(self):
        return Unconstrained()

    @cached_property
    def loss(self) -> QuadraticTrackingLoss:
        return QuadraticTrackingLoss(gamma=self.gamma, beta=self.beta)

    @property
    def rate_upper(self) -> float:
        return self.epsilon * self.beta / self.gamma

    @property
    def rate_lower(self) -> float:
        return self.epsilon * self.beta / (2.0 * self.gamma)

    def induced(self, theta) -> GaussianSpec:
        mean = 0.5 * self.epsilon * (self.chain @ np.asarray(theta, dtype=float))
        mean[0] += 1.0
        return GaussianSpec(mean, self.sigma_sq)

    def update(self, theta) -> np.ndarray:
        return self.loss.argmin_exact([self.induced(theta)], np.array([1.0]), self.feasible)

    def stable_point_closed_form(self) -> np.ndarray:
        """Geometric closed form; RegimeViolationError outside eps*beta/(2 gamma) <= 1/2."""
        return geometric_triangular_inverse_apply(self.gamma / self.beta, 0.5 * self.epsilon, self.d)

    def stable_point(self) -> np.ndarray:
        try:
            return self.stable_point_closed_form()
        except RegimeViolationError:
            m = (self.gamma / self.beta) * np.eye(self.d) - 0.5 * self.epsilon * self.chain
            return np.linalg.solve(m, self.theta0)

    def lower_bound_constant(self, T: Optional[int] = None) -> float:
        """K such that ||theta^t - theta_ps|| >= K * rate_lower^t for t <= T,
        from the stable point's tail norms (coordinates undiscovered at t)."""
        T = self.horizon if T is None else T
        v = self.stable_point()
        ratios = [float(np.linalg.norm(v[t + 1:])) / self.rate_lower**t for t in range(T + 1)]
        return min(ratios)

    def sensitivity_certificate(self, rng, n_pairs: int = 100) -> CertificateReport:
        return w1_certificate(self, rng, n_pairs, scale=1.0)


def perdomo_tightness_update(inst: PerdomoTightnessInstance, theta) -> np.ndarray:
    return inst.update(theta)


def perdomo_lowerbound_update(inst: PerdomoLowerBoundInstance, theta) -> np.ndarray:
    return inst.update(theta)
