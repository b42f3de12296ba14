"""Shared numeric types: Gaussian specifications, finite-support
distributions, weighted-norm evaluation specs and sensitivity parameters.

All types are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import InvalidInputError

Covariance = Union[float, np.ndarray]  # scalar sigma^2 (isotropic) or full SPD matrix


def _as_vector(x) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise InvalidInputError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector has non-finite entries")
    return v


@dataclass(frozen=True)
class GaussianSpec:
    """A normal distribution N(mean, cov).

    ``cov`` is either a positive scalar sigma^2 (meaning sigma^2 * I) or a
    full symmetric positive-definite matrix.
    """

    mean: np.ndarray
    cov: Covariance

    def __post_init__(self):
        object.__setattr__(self, "mean", _as_vector(self.mean))
        if np.isscalar(self.cov) or np.ndim(self.cov) == 0:
            s2 = float(self.cov)
            if not (np.isfinite(s2) and s2 > 0):
                raise InvalidInputError(f"scalar variance must be positive, got {s2}")
            object.__setattr__(self, "cov", s2)
        else:
            m = np.asarray(self.cov, dtype=float)
            if m.shape != (self.dim, self.dim):
                raise InvalidInputError(
                    f"covariance shape {m.shape} does not match dimension {self.dim}"
                )
            if not np.allclose(m, m.T, atol=1e-12):
                raise InvalidInputError("covariance matrix is not symmetric")
            try:
                np.linalg.cholesky(m)
            except np.linalg.LinAlgError:
                raise InvalidInputError("covariance matrix is not positive definite")
            object.__setattr__(self, "cov", m)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def isotropic(self) -> bool:
        return np.isscalar(self.cov)

    def cov_matrix(self) -> np.ndarray:
        if self.isotropic:
            return float(self.cov) * np.eye(self.dim)
        return self.cov

    def mahalanobis_sq(self, other_mean) -> float:
        """(mu - mu')^T Sigma^-1 (mu - mu')."""
        d = self.mean - _as_vector(other_mean)
        if self.isotropic:
            return float(d @ d) / float(self.cov)
        return float(d @ np.linalg.solve(self.cov, d))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n i.i.d. draws, shape (n, dim)."""
        if self.isotropic:
            return self.mean + np.sqrt(float(self.cov)) * rng.standard_normal((n, self.dim))
        return rng.multivariate_normal(self.mean, self.cov, size=n, method="cholesky")


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite-support distribution: ``atoms[i]`` carries probability ``probs[i]``.

    Atoms are rows of an array (scalars become length-1 rows). Declared
    discrete supports unlock exact summation for divergences and weighted
    norms.
    """

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.atoms, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or len(p) != len(a):
            raise InvalidInputError("probs must be one weight per atom")
        if np.any(p < 0) or not np.isclose(p.sum(), 1.0, atol=1e-9):
            raise InvalidInputError("probs must be nonnegative and sum to 1")
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "probs", p)

    @property
    def n_atoms(self) -> int:
        return len(self.probs)

    def sample_indices(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.choice(self.n_atoms, size=n, p=self.probs)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.atoms[self.sample_indices(rng, n)]


@dataclass(frozen=True)
class WeightedNormSpec:
    """How to evaluate a density-weighted function norm.

    ``reference`` supplies the weighting density: a DiscreteDistribution
    (enables exact mode) or any object with ``sample(rng, n)`` (Monte Carlo
    only). Monte Carlo mode returns an unbiased estimate from ``n_samples``
    draws.
    """

    reference: object
    mode: str = "exact"  # "exact" | "monte_carlo"
    n_samples: int = 100_000

    def __post_init__(self):
        if self.mode not in ("exact", "monte_carlo"):
            raise InvalidInputError(f"unknown mode {self.mode!r}")
        if self.mode == "monte_carlo" and self.n_samples < 1:
            raise InvalidInputError("Monte Carlo sample count must be >= 1")


@dataclass(frozen=True)
class SensitivityParams:
    """Problem constants: distribution-map sensitivity and loss structure.

    epsilon -- sensitivity of the distribution map (>= 0)
    M       -- bound on the prediction-gradient norm of the loss (> 0)
    gamma   -- strong-convexity modulus (> 0)
    C, c    -- norm-equivalency constants, C >= 1 and c <= C
    beta    -- smoothness constant of parameter-space losses (> 0 when set)
    """

    epsilon: float
    M: float = 1.0
    gamma: float = 1.0
    C: float = 1.0
    c: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidInputError("epsilon must be >= 0")
        for name in ("M", "gamma", "beta"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be > 0")
        if self.C < 1:
            raise InvalidInputError("C must be >= 1")
        if self.c > self.C:
            raise InvalidInputError("c must be <= C")

    @property
    def prediction_rate(self) -> float:
        """Per-step contraction factor sqrt(epsilon)*M/gamma."""
        return np.sqrt(self.epsilon) * self.M / self.gamma

    @property
    def parameter_rate(self) -> float:
        """Per-step contraction factor epsilon*beta/gamma."""
        return self.epsilon * self.beta / self.gamma
