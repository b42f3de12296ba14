"""Projected-gradient inner solver for argmin steps without a closed form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import InnerSolverError
from .feasible import FeasibleSet, Unconstrained

DEFAULT_LR = 3e-4
DEFAULT_MAX_ITERS = 2000
DEFAULT_GRAD_TOL = 1e-7


@dataclass(frozen=True)
class SolverSettings:
    lr: float = DEFAULT_LR
    max_iters: int = DEFAULT_MAX_ITERS
    grad_tol: float = DEFAULT_GRAD_TOL


def inner_gradient_solver(grad: Callable[[np.ndarray], np.ndarray],
                          start: np.ndarray,
                          feasible: FeasibleSet = Unconstrained(),
                          lr: float = DEFAULT_LR,
                          max_iters: int = DEFAULT_MAX_ITERS,
                          grad_tol: float = DEFAULT_GRAD_TOL) -> np.ndarray:
    """Projected gradient descent to a stationary point.

    Convergence is declared on the gradient-mapping norm
    ||x - proj(x - lr * grad(x))|| / lr, which also covers constrained
    minima on the boundary. Raises InnerSolverError with the last iterate
    and final norm if max_iters is exhausted.
    """
    if lr <= 0:
        raise InnerSolverError("learning rate must be positive")
    x = np.asarray(start, dtype=float).copy()
    gm_norm = np.inf
    for it in range(max_iters):
        x_next = feasible.project(x - lr * np.asarray(grad(x), dtype=float))
        gm_norm = float(np.linalg.norm(x - x_next)) / lr
        x = x_next
        if gm_norm <= grad_tol:
            return x
    raise InnerSolverError(
        f"no convergence after {max_iters} iterations (gradient mapping norm {gm_norm:.3e})",
        last_iterate=x, grad_norm=gm_norm, iterations=max_iters,
    )
