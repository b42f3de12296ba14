"""Experiment orchestration: run a parsed config end to end and persist the
result bundle."""

from __future__ import annotations

import time
from pathlib import Path
from typing import Optional

import numpy as np

from ..core.rng import spawn
from ..errors import ConfigError, IngestionError
from ..metrics import overlay_check
from ..minimizers import EmpiricalMode, ExactMode, run_dynamics, window
from ..rideshare import GameConfig, MarketSpec, game_loop, synthetic_market
from ..rir import (
    InnerSettings,
    RejectionRule,
    load_credit_csv,
    run_credit_experiment,
    synthetic_discrete_base,
)
from .bundle import ResultBundle, read_aggregate_csv
from .config import ExperimentConfig

CERT_PAIRS = 100


def _instance_traces(config: ExperimentConfig, workers: Optional[int]):
    mode = ExactMode() if config.mode == "exact" else EmpiricalMode(config.n_samples)
    out = {}
    for method in config.methods:
        out[method.label] = run_dynamics(config.instance, method, config.iterations,
                                         config.runs, config.seed, mode,
                                         n_eval=config.n_eval, workers=workers)
    return out


def _credit_traces(config: ExperimentConfig, workers: Optional[int]):
    cs = config.credit
    if cs.csv is not None:
        base, _ = load_credit_csv(cs.csv, strategic_indices=cs.strategic_indices)
    else:
        base = synthetic_discrete_base(seed=cs.base_seed,
                                       strategic_indices=cs.strategic_indices)
    rule = RejectionRule(cs.delta)
    schedules = {m.label: (m.schedule if m.schedule is not None else window(1))
                 for m in config.methods}
    return run_credit_experiment(base, rule, schedules, T=config.iterations,
                                 runs=config.runs, seed=config.seed,
                                 n_samples=cs.n_samples,
                                 inner=InnerSettings(steps=cs.inner_steps, lr=cs.learning_rate),
                                 hidden=cs.hidden, workers=workers)


def _load_zbase(path) -> np.ndarray:
    import csv as _csv
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = _csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["location", "mean_demand"]:
            raise IngestionError("expected header 'location,mean_demand'")
        vals = []
        for i, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise IngestionError(f"wrong column count at row {i}", row=i)
            try:
                vals.append(float(row[1]))
            except ValueError:
                raise IngestionError(f"non-numeric demand at row {i}", row=i)
    return np.asarray(vals)


def _rideshare_traces(config: ExperimentConfig, workers: Optional[int]):
    rs = config.rideshare
    spec1 = synthetic_market(seed=rs.market_seed_1, locations=rs.locations, lam=rs.lam)
    spec2 = synthetic_market(seed=rs.market_seed_2, locations=rs.locations, lam=rs.lam)
    if rs.zbase_csv is not None:
        zb = _load_zbase(rs.zbase_csv)
        if len(zb) != rs.locations:
            raise ConfigError(f"zbase csv has {len(zb)} rows, expected {rs.locations}")
        spec1 = MarketSpec(a_own=spec1.a_own, a_cross=spec1.a_cross, z_base=zb)
        spec2 = MarketSpec(a_own=spec2.a_own, a_cross=spec2.a_cross, z_base=zb)
    schedules = {m.label: (m.schedule if m.schedule is not None else window(1))
                 for m in config.methods}
    cfg = GameConfig(lam=rs.lam, n_demand=rs.n_demand, update_order=rs.update_order)
    return game_loop(spec1, spec2, schedules, T=config.iterations, runs=config.runs,
                     seed=config.seed, cfg=cfg, workers=workers)


def _instance_report(config: ExperimentConfig) -> dict:
    inst = config.instance
    report: dict = {"instance": type(inst).__name__}
    cert = inst.sensitivity_certificate(spawn(config.seed, 9999), CERT_PAIRS)
    report["sensitivity_certificate"] = {
        "framework": cert.framework, "epsilon": cert.epsilon,
        "max_ratio": cert.max_ratio, "holds": cert.holds,
    }
    if hasattr(inst, "lower_bound_constant"):
        rate = inst.rate_lower if hasattr(inst, "rate_lower") else inst.fixed_point_tail_ratio()
        report["lower_bound"] = {
            "rate": float(rate),
            "constant": float(inst.lower_bound_constant(config.iterations)),
        }
    return report


def run_experiment(config: ExperimentConfig, output_dir=None,
                   workers: Optional[int] = None) -> ResultBundle:
    """Execute the experiment and write the bundle; returns its handle."""
    workers = workers if workers is not None else config.workers
    started = time.perf_counter()
    if config.kind == "instance":
        traces = _instance_traces(config, workers)
    elif config.kind == "credit":
        traces = _credit_traces(config, workers)
    else:
        traces = _rideshare_traces(config, workers)
    elapsed = time.perf_counter() - started

    report = {
        "name": config.name,
        "kind": config.kind,
        "seed": config.seed,
        "iterations": config.iterations,
        "runs": config.runs,
        "methods": [m.label for m in config.methods],
        "runtime_s": elapsed,
    }
    if config.kind == "instance":
        report.update(_instance_report(config))

    bundle = ResultBundle(Path(output_dir) if output_dir is not None else Path(config.output_dir))
    bundle.write(config.raw_bytes, traces, report, medians=config.medians)
    return bundle


def lowerbound_check(bundle_dir, framework: str, slack: float) -> dict:
    """Check every method's mean distance column in a bundle against the
    instance's computed lower-bound curve K * rate^t."""
    from .config import load_config

    bundle = ResultBundle(bundle_dir)
    if not bundle.aggregate_path.exists() or not bundle.config_path.exists():
        raise ConfigError(f"{bundle_dir} is not a result bundle")
    config = load_config(bundle.config_path)
    if config.kind != "instance" or not hasattr(config.instance, "lower_bound_constant"):
        raise ConfigError("bundle was not produced by a lower-bound instance")
    inst = config.instance
    expected = {"perdomo": "PerdomoLowerBoundInstance",
                "mofakhami": "MofakhamiLowerBoundInstance"}.get(framework)
    if expected is None:
        raise ConfigError(f"unknown framework {framework!r}")
    if type(inst).__name__ != expected:
        raise ConfigError(f"bundle instance {type(inst).__name__} does not match "
                          f"framework {framework!r}")
    rate = inst.rate_lower if framework == "perdomo" else inst.fixed_point_tail_ratio()
    K = inst.lower_bound_constant(config.iterations)
    curve = K * rate ** np.arange(config.iterations + 1, dtype=float)

    agg = read_aggregate_csv(bundle.aggregate_path)
    results = {}
    all_pass = True
    for method, cols in agg.items():
        rep = overlay_check(cols["dist_mean"], curve, "lower", slack)
        results[method] = {"passed": rep.passed, "worst_ratio": rep.worst_ratio,
                           "worst_iteration": rep.worst_iteration}
        all_pass &= rep.passed
    return {"framework": framework, "slack": slack, "rate": float(rate),
            "constant": float(K), "passed": all_pass, "methods": results}
