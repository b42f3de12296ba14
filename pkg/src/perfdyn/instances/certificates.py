"""Sensitivity certificates: numerically check that an instance's
distribution map moves no faster than its declared epsilon.

Parameter-framework instances are checked against the Gaussian Wasserstein
bound, prediction-framework instances against the quadratic chi-square bound
channel (the only channel the constructions consume).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.divergences import chi2_gaussian_shared_cov, w1_gaussian_bound

CERT_TOL = 1e-9


@dataclass(frozen=True)
class CertificateReport:
    framework: str        # "perdomo" (Wasserstein) | "mofakhami" (chi-square)
    epsilon: float
    n_pairs: int
    max_ratio: float      # worst measured divergence / allowance
    holds: bool


def _random_pairs(rng, d: int, n_pairs: int, scale: float):
    for _ in range(n_pairs):
        yield scale * rng.standard_normal(d), scale * rng.standard_normal(d)


def w1_certificate(instance, rng, n_pairs: int, scale: float) -> CertificateReport:
    """Wasserstein bound between induced distributions <= eps * ||dtheta||."""
    d = len(instance.theta0)
    worst = 0.0
    for t1, t2 in _random_pairs(rng, d, n_pairs, scale):
        lhs = w1_gaussian_bound(instance.induced(t1), instance.induced(t2))
        allowance = instance.epsilon * float(np.linalg.norm(t1 - t2))
        worst = max(worst, lhs / allowance)
    return CertificateReport("perdomo", instance.epsilon, n_pairs, worst,
                             worst <= 1.0 + CERT_TOL)


def chi2_certificate(instance, rng, n_pairs: int, scale: float) -> CertificateReport:
    """Quadratic chi-square bound channel <= eps * ||dtheta||^2 (constant
    predictors, so the prediction norm equals the parameter norm)."""
    d = len(instance.theta0)
    worst = 0.0
    for t1, t2 in _random_pairs(rng, d, n_pairs, scale):
        d1, d2 = instance.induced(t1), instance.induced(t2)
        lhs = chi2_gaussian_shared_cov(d1.mean, d2.mean, d1.cov).bound
        allowance = instance.epsilon * float(np.sum((t1 - t2) ** 2))
        worst = max(worst, lhs / allowance)
    return CertificateReport("mofakhami", instance.epsilon, n_pairs, worst,
                             worst <= 1.0 + CERT_TOL)
