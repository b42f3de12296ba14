"""Validation suites: every closed form, inequality and sensitivity
certificate checked against an independent oracle, with worst-case
witnesses. The CLI renders these as a pass/fail report."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..core import (
    DiscreteDistribution,
    WeightedNormSpec,
    chi2_exact_discrete,
    chi2_gaussian_shared_cov,
    chi2_gaussian_textbook,
    chi2_monte_carlo,
    gaussian_weighted_exp_mean,
    gaussian_weighted_exp_sq_mean,
    geometric_triangular_inverse_apply,
    mixed_power_bound_check,
    spawn,
    triangular_solve_apply,
    weighted_norm_sq,
)
from ..instances import (
    ARM_TWO_SNAPSHOT_CONSTANT,
    MofakhamiLowerBoundInstance,
    MofakhamiTightnessInstance,
    NegativeFeedbackInstance,
    PerdomoLowerBoundInstance,
    PerdomoTightnessInstance,
)
from ..minimizers import Method, run_dynamics, window
from ..rir import (
    RejectionRule,
    rir_density_table,
    rir_sensitivity_certificate,
    rir_sensitivity_constant,
    synthetic_discrete_base,
)

SEED = 20250810


@dataclass
class SuiteResult:
    name: str
    passed: bool
    runtime_s: float
    worst: str = ""
    notes: list = field(default_factory=list)


def _suite(fn: Callable[[], tuple[bool, str, list]]) -> Callable[[], SuiteResult]:
    def run() -> SuiteResult:
        start = time.perf_counter()
        passed, worst, notes = fn()
        return SuiteResult(name=fn.__name__, passed=passed,
                           runtime_s=time.perf_counter() - start, worst=worst, notes=notes)
    run.__name__ = fn.__name__
    return run


@_suite
def gaussian_weighted_exponential_mean():
    """Closed form of E[x exp(-||x||^2/2e)] vs a 10^6-draw Monte Carlo oracle
    (antithetic pairs, so the worst-case estimator noise stays well inside
    the 1% gate)."""
    rng = spawn(SEED, 1)
    worst = 0.0
    weighted = lambda x: x * np.exp(-np.sum(x**2, axis=1, keepdims=True) / (2.0 * math.e))
    for _ in range(20):
        d = int(rng.integers(1, 4))
        mu = rng.normal(0.0, 1.0, size=d)
        s2 = float(rng.uniform(0.2, 2.0))
        closed = gaussian_weighted_exp_mean(mu, s2)
        z = rng.standard_normal((500_000, d))
        mc = np.mean(0.5 * (weighted(mu + math.sqrt(s2) * z)
                            + weighted(mu - math.sqrt(s2) * z)), axis=0)
        rel = float(np.linalg.norm(closed - mc) / max(np.linalg.norm(mc), 1e-12))
        worst = max(worst, rel)
    notes = ["closed form includes the (sigma^2/e + 1)^(-d/2) normalization of the "
             "merged Gaussian; without it the printed form overshoots Monte Carlo by ~9% "
             "already at d=1, sigma^2=1/2"]
    return worst < 0.01, f"max rel err {worst:.2e}", notes


@_suite
def gaussian_weighted_exponential_sq_mean():
    rng = spawn(SEED, 2)
    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(1, 4))
        mu = rng.normal(0.0, 1.0, size=d)
        s2 = float(rng.uniform(0.2, 2.0))
        closed = gaussian_weighted_exp_sq_mean(mu, s2)
        x = mu + math.sqrt(s2) * rng.standard_normal((1_000_000, d))
        n2 = np.sum(x**2, axis=1)
        mc = float(np.mean(n2 * np.exp(-n2 / math.e)))
        worst = max(worst, abs(closed - mc) / max(abs(mc), 1e-12))
    return worst < 0.02, f"max rel err {worst:.2e}", []


@_suite
def shared_covariance_chi2_channels():
    rng = spawn(SEED, 3)
    worst = -np.inf
    for _ in range(100):
        d = int(rng.integers(1, 4))
        mu1, mu2 = rng.normal(size=d), rng.normal(size=d)
        a = rng.normal(size=(d, d))
        cov = a @ a.T + 0.5 * np.eye(d)
        res = chi2_gaussian_shared_cov(mu1, mu2, cov)
        worst = max(worst, res.value - res.bound)
    sampler = lambda r, n: 0.4 + r.standard_normal((n, 1))
    p_dens = lambda z: np.exp(-0.5 * (z[:, 0] - 0.4) ** 2) / math.sqrt(2 * math.pi)
    q_dens = lambda z: np.exp(-0.5 * z[:, 0] ** 2) / math.sqrt(2 * math.pi)
    mc = chi2_monte_carlo(sampler, p_dens, q_dens, 1_000_000, spawn(SEED, 4))
    oracle = chi2_gaussian_textbook([0.4], [0.0], 1.0)
    mc_ok = abs(mc - oracle) / oracle < 0.02
    value = chi2_gaussian_shared_cov([0.4], [0.0], 1.0).value
    notes = [f"informational: the closed-form value channel 1-exp(-q/2) = {value:.6f} "
             f"differs from the standard Gaussian chi-square exp(q)-1 = {oracle:.6f} "
             "(Monte Carlo matches the latter); downstream constructions consume only "
             "the quadratic bound channel, which dominates both"]
    return (worst <= 1e-12 and mc_ok), f"max value-bound gap {worst:.2e}", notes


@_suite
def triangular_inverse_closed_form():
    rng = spawn(SEED, 5)
    worst = 0.0
    for _ in range(50):
        d = int(rng.integers(1, 65))
        c = float(rng.uniform(0.1, 2.0))
        b = c * float(rng.uniform(2.0, 6.0))
        scale = float(rng.uniform(0.5, 3.0))
        closed = geometric_triangular_inverse_apply(b, c, d, scale)
        direct = triangular_solve_apply(b, c, d, scale)
        worst = max(worst, float(np.max(np.abs(closed - direct))))
    return worst < 1e-10, f"max abs entry gap {worst:.2e}", []


@_suite
def chi2_convex_combination_inequality():
    rng = spawn(SEED, 6)
    worst = -np.inf
    for _ in range(1000):
        k = int(rng.integers(2, 8))
        p1, p2, q = (rng.dirichlet(np.ones(k)) for _ in range(3))
        q = np.maximum(q, 1e-3)
        q /= q.sum()
        alpha = float(rng.uniform())
        a = float(rng.uniform(0.05, 5.0))
        lhs = chi2_exact_discrete(alpha * p1 + (1 - alpha) * p2, q)
        rhs = ((1 + a) * alpha**2 * chi2_exact_discrete(p1, q)
               + (1 + 1 / a) * (1 - alpha) ** 2 * chi2_exact_discrete(p2, q))
        worst = max(worst, lhs - rhs)
    return worst <= 1e-10, f"max lhs-rhs {worst:.2e}", []


@_suite
def chi2_of_averages_inequality():
    rng = spawn(SEED, 7)
    worst = -np.inf
    for _ in range(1000):
        k = int(rng.integers(2, 8))
        a1, a2, b1, b2 = (rng.dirichlet(np.ones(k)) for _ in range(4))
        b1 = np.maximum(b1, 1e-3); b1 /= b1.sum()
        b2 = np.maximum(b2, 1e-3); b2 /= b2.sum()
        lhs = chi2_exact_discrete(0.5 * (a1 + a2), 0.5 * (b1 + b2))
        rhs = chi2_exact_discrete(a1, b1) + chi2_exact_discrete(a2, b2)
        worst = max(worst, lhs - rhs)
    return worst <= 1e-10, f"max lhs-rhs {worst:.2e}", []


@_suite
def mixed_power_inequality():
    rng = spawn(SEED, 8)
    bad = 0
    for _ in range(1000):
        a = float(rng.uniform(0.01, 10.0))
        b = float(rng.uniform(0.0, 4.0)) * a
        if b <= 0:
            b = 0.5 * a
        t = int(rng.integers(0, 60))
        if not mixed_power_bound_check(a, b, t):
            bad += 1
    return bad == 0, f"{bad} violations", []


@_suite
def weighted_norm_properties():
    rng = spawn(SEED, 9)
    atoms = rng.normal(size=(6, 2))
    probs = rng.dirichlet(np.ones(6))
    ref = DiscreteDistribution(atoms, probs)
    spec = WeightedNormSpec(ref, mode="exact")
    worst = 0.0
    for _ in range(100):
        wa, wb = rng.normal(size=2), rng.normal(size=2)
        f_a = lambda x, w=wa: x @ w
        f_b = lambda x, w=wb: x @ w
        ab = weighted_norm_sq(f_a, f_b, spec)
        ba = weighted_norm_sq(f_b, f_a, spec)
        worst = max(worst, abs(ab - ba))
        if ab < 0:
            return False, "negative norm", []
    same = weighted_norm_sq(lambda x: x[:, 0], lambda x: x[:, 0], spec)
    return worst <= 1e-12 and same == 0.0, f"max asymmetry {worst:.2e}", []


class _TableModel:
    """Prediction table over the support, looked up by row order."""

    def __init__(self, table: np.ndarray):
        self.flat = np.asarray(table, dtype=float).ravel()

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.flat[: len(x)]


@_suite
def rir_sensitivity_sweep():
    rng = spawn(SEED, 10)
    base = synthetic_discrete_base(seed=123)
    shape = base.joint.shape
    violations = 0
    worst = 0.0
    for delta in (0.25, 0.55, 0.9):
        rule = RejectionRule(delta)
        for _ in range(500):
            va = rng.uniform(0.0, 1.0 - delta, size=shape)
            vb = rng.uniform(0.0, 1.0 - delta, size=shape)
            model_a = _TableModel(va)
            model_b = _TableModel(vb)
            cert = rir_sensitivity_certificate(model_a, model_b, rule, base)
            if not cert.holds:
                violations += 1
            if cert.bound > 0:
                worst = max(worst, cert.chi2 / cert.bound)
            total = rir_density_table(model_a, rule, base).sum()
            if abs(total - 1.0) > 1e-12:
                return False, f"density sums to {total!r}", []
    grid = np.linspace(0.01, 0.99, 99)
    dominated = all(rir_sensitivity_constant(d) < 1.0 / d**2 for d in grid)
    return violations == 0 and dominated, f"worst chi2/bound {worst:.4f}", []


@_suite
def instance_sensitivity_certificates():
    rng = spawn(SEED, 11)
    instances = [
        PerdomoTightnessInstance(epsilon=2.49, beta=1.0, gamma=5.0),
        PerdomoLowerBoundInstance(epsilon=2.49, beta=1.0, gamma=5.0, horizon=10),
        MofakhamiTightnessInstance(epsilon=0.64, M=1.0, gamma=1.0),
        MofakhamiLowerBoundInstance(epsilon=0.81, M=1.0, gamma=1.0, delta=0.01, horizon=10),
        NegativeFeedbackInstance(epsilon=1.02**2),
    ]
    worst = 0.0
    for inst in instances:
        cert = inst.sensitivity_certificate(rng, 100)
        worst = max(worst, cert.max_ratio)
        if not cert.holds:
            return False, f"{type(inst).__name__} ratio {cert.max_ratio:.4f}", []
    return True, f"max divergence/allowance {worst:.4f}", []


@_suite
def two_snapshot_step_bound():
    notes = []
    worst = 0.0
    for inst in (NegativeFeedbackInstance(epsilon=1.02**2),
                 MofakhamiLowerBoundInstance(epsilon=0.81, M=1.0, gamma=1.0,
                                             delta=0.01, horizon=10)):
        trace = run_dynamics(inst, Method("arm", schedule=window(2)), T=60, runs=1,
                             seed=SEED, workers=1)[0]
        diffs = np.linalg.norm(np.diff(trace.thetas, axis=0), axis=1)
        allowed = ARM_TWO_SNAPSHOT_CONSTANT * inst.rate
        for t in range(2, len(diffs)):
            m_t = max(diffs[t - 1], diffs[t - 2])
            if diffs[t] > allowed * m_t + 1e-9:
                return False, f"{type(inst).__name__} step {t}", notes
            if m_t > 0:
                worst = max(worst, diffs[t] / (allowed * m_t))
    return True, f"max step/bound {worst:.4f}", notes


@_suite
def lower_bound_trajectories():
    lb = PerdomoLowerBoundInstance(epsilon=2.49, beta=1.0, gamma=5.0, horizon=20)
    K = lb.lower_bound_constant()
    curve = K * lb.rate_lower ** np.arange(21)
    worst = np.inf
    for tau in (1, 2, 4):
        trace = run_dynamics(lb, Method("arm", schedule=window(tau)), T=20, runs=1,
                             seed=SEED, workers=1)[0]
        worst = min(worst, float(np.min(trace.dist_to_ps / curve)))
    mlb = MofakhamiLowerBoundInstance(epsilon=0.81, M=1.0, gamma=1.0, delta=0.01, horizon=20)
    g = mlb.fixed_point_tail_ratio()
    trace = run_dynamics(mlb, Method("rrm"), T=20, runs=1, seed=SEED, workers=1)[0]
    ratios = trace.dist_to_ps[1:] / trace.dist_to_ps[:-1]
    ratio_ok = bool(np.min(ratios) >= 0.95 * g)
    notes = [f"informational: the quoted snapshot-averaging floor constant "
             f"{mlb.claimed_arm_lower_constant():.4f} drops the exponential-mean "
             f"normalization; the construction's true per-iteration tail ratio at "
             f"d={mlb.d} is {g:.6f}, which is what trajectories are checked against"]
    return worst >= 0.9 and ratio_ok, f"min distance/curve {worst:.3f}", notes


ALL_SUITES: tuple = (
    gaussian_weighted_exponential_mean,
    gaussian_weighted_exponential_sq_mean,
    shared_covariance_chi2_channels,
    triangular_inverse_closed_form,
    chi2_convex_combination_inequality,
    chi2_of_averages_inequality,
    mixed_power_inequality,
    weighted_norm_properties,
    rir_sensitivity_sweep,
    instance_sensitivity_certificates,
    two_snapshot_step_bound,
    lower_bound_trajectories,
)


def run_all_suites() -> list[SuiteResult]:
    return [suite() for suite in ALL_SUITES]
