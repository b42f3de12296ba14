"""The resample-if-rejected shift mechanism.

Sampling: draw x from the base; with probability 1 - g(f(x)) accept it,
otherwise redraw the strategic block once from its marginal and output the
result unconditionally. Labels always come from the base conditional
p(y | x) of the final x. On discrete bases the induced density is exact:

    p'(x_s, x_f) = p(x_s, x_f) (1 - g(f(x_s, x_f)))
                   + p_s(x_s) * sum_s' p(s', x_f) g(f(s', x_f))

which for independent blocks is the familiar p(x)(1 - g(f(x)) + C(x_f)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from ..core.divergences import chi2_exact_discrete
from ..errors import InvalidInputError, UnsupportedModeError
from .base import DiscreteBase, GaussianBlocksBase

ADMISSIBLE_TOL = 1e-9


@dataclass(frozen=True)
class RejectionRule:
    """Rejection probability g(yhat) = yhat + delta for yhat in [0, 1-delta]."""

    delta: float

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise InvalidInputError("delta must lie in (0, 1)")

    def check_admissible(self, values: np.ndarray) -> np.ndarray:
        v = np.asarray(values, dtype=float)
        if np.any(v < -ADMISSIBLE_TOL) or np.any(v > 1.0 - self.delta + ADMISSIBLE_TOL):
            raise InvalidInputError(
                f"predictions must lie in [0, {1.0 - self.delta}] for delta={self.delta}")
        return np.clip(v, 0.0, 1.0 - self.delta)

    def rejection_prob(self, values: np.ndarray) -> np.ndarray:
        return self.check_admissible(values) + self.delta


def model_values_table(model: Callable, base: DiscreteBase) -> np.ndarray:
    """Model predictions over every support cell, shaped (S, F)."""
    vals = np.asarray(model(base.support()), dtype=float).reshape(
        base.n_strategic_atoms, base.n_nonstrategic_atoms)
    return vals


def rir_density_table(model: Callable, rule: RejectionRule, base: DiscreteBase) -> np.ndarray:
    """Exact shifted density over all support cells, shaped (S, F)."""
    if not getattr(base, "is_discrete", False):
        raise UnsupportedModeError("exact shifted density needs a discrete base")
    g = rule.rejection_prob(model_values_table(model, base))
    rejected_mass = (base.joint * g).sum(axis=0)            # per non-strategic atom
    return base.joint * (1.0 - g) + np.outer(base.strategic_probs, rejected_mass)


def rir_density(x, model: Callable, rule: RejectionRule, base: DiscreteBase) -> float:
    """Exact shifted density at one support point."""
    table = rir_density_table(model, rule, base)
    si, fi = base.cell_of(x)
    return float(table[si, fi])


def rir_sample_batch(base, model: Callable, rule: RejectionRule,
                     rng: np.random.Generator, n: int):
    """n draws from the shifted distribution; returns (X, y)."""
    if n < 1:
        raise InvalidInputError("need n >= 1")
    if getattr(base, "is_discrete", False):
        s_idx = rng.choice(base.n_strategic_atoms, size=n, p=base.strategic_probs)
        # conditional non-strategic draw preserves non-product joints
        cond = base.joint / base.strategic_probs[:, None]
        f_idx = np.empty(n, dtype=int)
        for si in np.unique(s_idx):
            mask = s_idx == si
            f_idx[mask] = rng.choice(base.n_nonstrategic_atoms, size=mask.sum(), p=cond[si])
        x = base.assemble(s_idx, f_idx)
        g = rule.rejection_prob(np.asarray(model(x), dtype=float))
        redo = rng.random(n) < g
        if np.any(redo):
            s_idx = s_idx.copy()
            s_idx[redo] = rng.choice(base.n_strategic_atoms, size=int(redo.sum()),
                                     p=base.strategic_probs)
            x = base.assemble(s_idx, f_idx)
        p1 = base.label_p1[s_idx, f_idx]
        y = (rng.random(n) < p1).astype(float)
        return x, y
    if isinstance(base, GaussianBlocksBase):
        xs = base.sample_strategic(rng, n)
        xf = base.sample_nonstrategic(rng, n)
        x = np.empty((n, base.schema.n_features))
        x[:, list(base.schema.strategic)] = xs
        x[:, list(base.schema.non_strategic)] = xf
        g = rule.rejection_prob(np.asarray(model(x), dtype=float))
        redo = rng.random(n) < g
        if np.any(redo):
            x[np.nonzero(redo)[0][:, None], list(base.schema.strategic)] = \
                base.sample_strategic(rng, int(redo.sum()))
        y = (rng.random(n) < base.label_p1_rows(x)).astype(float)
        return x, y
    raise InvalidInputError(f"unknown base type {type(base).__name__}")


def rir_sample(base, model: Callable, rule: RejectionRule, rng: np.random.Generator):
    """One draw from the shifted distribution; returns (x, y)."""
    x, y = rir_sample_batch(base, model, rule, rng, 1)
    return x[0], float(y[0])


class SensitivityCertificate(NamedTuple):
    chi2: float
    bound: float
    constant: float      # (1/delta)(1 + (1-delta)/(2 sqrt(delta)))
    norm_sq: float       # ||f_a - f_b||^2 weighted by the shifted density of a
    holds: bool


def rir_sensitivity_constant(delta: float) -> float:
    """(1/delta)(1 + (1-delta)/(2 sqrt(delta))); always below the older
    1/delta^2 constant on (0, 1)."""
    if not 0 < delta < 1:
        raise InvalidInputError("delta must lie in (0, 1)")
    return (1.0 / delta) * (1.0 + (1.0 - delta) / (2.0 * np.sqrt(delta)))


def rir_sensitivity_certificate(model_a: Callable, model_b: Callable,
                                rule: RejectionRule, base: DiscreteBase) -> SensitivityCertificate:
    """Exact chi-square between the induced distributions of two models
    against the sensitivity allowance constant * ||f_a - f_b||^2 weighted by
    model a's shifted density."""
    p_a = rir_density_table(model_a, rule, base)
    p_b = rir_density_table(model_b, rule, base)
    chi2 = chi2_exact_discrete(p_b.ravel(), p_a.ravel())
    va = rule.check_admissible(model_values_table(model_a, base))
    vb = rule.check_admissible(model_values_table(model_b, base))
    norm_sq = float(np.sum(p_a * (va - vb) ** 2))
    constant = rir_sensitivity_constant(rule.delta)
    bound = constant * norm_sq
    return SensitivityCertificate(chi2=chi2, bound=bound, constant=constant,
                                  norm_sq=norm_sq, holds=chi2 <= bound + 1e-12)
