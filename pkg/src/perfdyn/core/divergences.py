"""Divergences and weighted function norms.

The chi-square sensitivity machinery works with three channels for
shared-covariance Gaussians:

* value channel:   1 - exp(-1/2 d^T Sigma^-1 d)          (closed form as used
                   by the analytic constructions; see the validation note)
* bound channel:   1/2 d^T Sigma^-1 d                    (quadratic upper
                   bound; the only channel downstream constructions consume)
* oracle channel:  exp(d^T Sigma^-1 d) - 1               (textbook chi-square
                   between N(mu1, S) and N(mu2, S); matches Monte Carlo)

where d = mu1 - mu2. The value channel is <= the bound channel because
1 - e^-x <= x; the oracle channel is >= both. The discrepancy between the
value and oracle channels is reported informationally by the validation
suite rather than silently resolved.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg

from ..errors import DegenerateSupportError, InvalidInputError, UnsupportedModeError
from .types import DiscreteDistribution, GaussianSpec, WeightedNormSpec


def _function_gap_sq(f_a: Callable, f_b: Callable, points: np.ndarray) -> np.ndarray:
    """Row-wise ||f_a(x) - f_b(x)||^2 over an (n, d) array of points."""
    va = np.asarray(f_a(points), dtype=float)
    vb = np.asarray(f_b(points), dtype=float)
    gap = va - vb
    if gap.ndim == 1:
        return gap**2
    return np.sum(gap**2, axis=tuple(range(1, gap.ndim)))


def weighted_norm_sq(f_a: Callable, f_b: Callable, spec: WeightedNormSpec,
                     rng: np.random.Generator | None = None) -> float:
    """Squared weighted norm  integral ||f_a(x) - f_b(x)||^2 p(x) dx.

    ``f_a`` and ``f_b`` map an (n, d) array of points to predictions
    (vectorized). In exact mode the reference must be a declared discrete
    support and the integral is the exact weighted sum; in Monte Carlo mode
    an unbiased estimate from ``spec.n_samples`` reference draws is returned.
    """
    if spec.mode == "exact":
        if not isinstance(spec.reference, DiscreteDistribution):
            raise UnsupportedModeError(
                "exact weighted norm requires a declared discrete support"
            )
        ref = spec.reference
        return float(np.dot(ref.probs, _function_gap_sq(f_a, f_b, ref.atoms)))
    if rng is None:
        raise InvalidInputError("Monte Carlo mode needs an explicit rng")
    points = spec.reference.sample(rng, spec.n_samples)
    return float(np.mean(_function_gap_sq(f_a, f_b, points)))


class SharedCovChi2(NamedTuple):
    value: float  # 1 - exp(-1/2 d^T Sigma^-1 d)
    bound: float  # 1/2 d^T Sigma^-1 d


def chi2_gaussian_shared_cov(mu1, mu2, cov) -> SharedCovChi2:
    """Shared-covariance Gaussian chi-square channels.

    Returns the closed-form value ``1 - exp(-q/2)`` and the quadratic bound
    ``q/2`` where q is the Mahalanobis form of mu1 - mu2 under ``cov``.
    The bound dominates the value for every input (1 - e^-x <= x).
    """
    spec = cov if isinstance(cov, GaussianSpec) else GaussianSpec(mu1, cov)
    q = GaussianSpec(mu1, spec.cov).mahalanobis_sq(mu2)
    return SharedCovChi2(value=float(-np.expm1(-0.5 * q)), bound=0.5 * q)


def chi2_gaussian_textbook(mu1, mu2, cov) -> float:
    """Textbook chi-square between N(mu1, Sigma) and N(mu2, Sigma):
    exp(d^T Sigma^-1 d) - 1. Oracle channel for Monte Carlo checks."""
    q = GaussianSpec(mu1, cov).mahalanobis_sq(mu2)
    return float(np.expm1(q))


def chi2_exact_discrete(p_probs, q_probs) -> float:
    """Exact chi-square sum((p - q)^2 / q) over a shared finite support."""
    p = np.asarray(p_probs, dtype=float)
    q = np.asarray(q_probs, dtype=float)
    if p.shape != q.shape:
        raise InvalidInputError("supports must align")
    dead = q <= 0.0
    if np.any(dead & (p > 0.0)):
        raise DegenerateSupportError("reference density vanishes where p > 0")
    keep = ~dead
    return float(np.sum((p[keep] - q[keep]) ** 2 / q[keep]))


def chi2_monte_carlo(p_sampler: Callable, p_density: Callable, q_density: Callable,
                     n: int, rng: np.random.Generator) -> float:
    """Monte Carlo estimate of chi^2(P, Q) = integral (p - q)^2 / q.

    Uses the identity chi^2 = E_{z~P}[p(z)/q(z)] - 1, an unbiased estimator
    from n draws of ``p_sampler``. For finite supports prefer
    :func:`chi2_exact_discrete`, which replaces sampling by the exact sum.
    """
    if n < 1:
        raise InvalidInputError("sample count must be >= 1")
    z = p_sampler(rng, n)
    q = np.asarray(q_density(z), dtype=float)
    if np.any(q <= 0.0):
        raise DegenerateSupportError("q vanished at a sampled point")
    p = np.asarray(p_density(z), dtype=float)
    return float(np.mean(p / q) - 1.0)


def w1_gaussian_bound(a: GaussianSpec, b: GaussianSpec) -> float:
    """Gaussian 1-Wasserstein upper bound:

        sqrt(||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_a S_b)^{1/2}))

    For equal covariances the trace term vanishes and the bound reduces to
    the mean gap.
    """
    if a.dim != b.dim:
        raise InvalidInputError("dimension mismatch")
    gap_sq = float(np.sum((a.mean - b.mean) ** 2))
    if a.isotropic and b.isotropic:
        sa, sb = np.sqrt(float(a.cov)), np.sqrt(float(b.cov))
        trace = a.dim * (sa - sb) ** 2
    else:
        sa_m, sb_m = a.cov_matrix(), b.cov_matrix()
        cross = scipy.linalg.sqrtm(sa_m @ sb_m)
        trace = float(np.trace(sa_m) + np.trace(sb_m) - 2.0 * np.real(np.trace(cross)))
        trace = max(trace, 0.0)
    return float(np.sqrt(gap_sq + trace))
