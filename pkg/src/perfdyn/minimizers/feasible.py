"""Feasible sets with exact Euclidean projections."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from ..errors import InvalidInputError


@runtime_checkable
class FeasibleSet(Protocol):
    def project(self, x: np.ndarray) -> np.ndarray: ...

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool: ...


@dataclass(frozen=True)
class Unconstrained:
    def project(self, x):
        return np.asarray(x, dtype=float)

    def contains(self, x, tol=1e-9):
        return True


@dataclass(frozen=True)
class Ball:
    """L2 ball of given radius centered at the origin."""

    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise InvalidInputError("ball radius must be positive")

    def project(self, x):
        x = np.asarray(x, dtype=float)
        norm = float(np.linalg.norm(x))
        if norm <= self.radius:
            return x
        return x * (self.radius / norm)

    def contains(self, x, tol=1e-9):
        return float(np.linalg.norm(x)) <= self.radius + tol


@dataclass(frozen=True)
class Box:
    """Per-coordinate bounds; scalars broadcast over all coordinates."""

    lower: float | np.ndarray
    upper: float | np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.lower) > np.asarray(self.upper)):
            raise InvalidInputError("box lower bound exceeds upper bound")

    def project(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def contains(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= np.asarray(self.lower) - tol)
                    and np.all(x <= np.asarray(self.upper) + tol))
