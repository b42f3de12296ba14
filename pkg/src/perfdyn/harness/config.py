"""Experiment configuration: one declarative TOML file per experiment.

Exactly one of [instance], [credit], [rideshare] selects the experiment
family; [[methods]] lists the dynamics to compare; [experiment] carries the
seed (mandatory, no implicit entropy), horizon, run count, mode and output
directory. The original file bytes are echoed into the result bundle.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigError
from ..instances import (
    MofakhamiLowerBoundInstance,
    MofakhamiTightnessInstance,
    NegativeFeedbackInstance,
    PerdomoLowerBoundInstance,
    PerdomoTightnessInstance,
)
from ..minimizers import Method, all_history, half_history, window

INSTANCE_KINDS = {
    "perdomo_tightness": PerdomoTightnessInstance,
    "perdomo_lower_bound": PerdomoLowerBoundInstance,
    "mofakhami_tightness": MofakhamiTightnessInstance,
    "mofakhami_lower_bound": MofakhamiLowerBoundInstance,
    "negative_feedback": NegativeFeedbackInstance,
}


@dataclass(frozen=True)
class CreditSettings:
    delta: float = 0.55
    n_samples: int = 500
    hidden: int = 16
    inner_steps: int = 150
    learning_rate: float = 3e-4
    strategic_indices: tuple = (0, 1)
    base_seed: int = 123
    csv: Optional[str] = None


@dataclass(frozen=True)
class RideshareSettings:
    lam: float = 70.0
    n_demand: int = 25
    locations: int = 11
    market_seed_1: int = 7
    market_seed_2: int = 8
    update_order: str = "simultaneous"
    zbase_csv: Optional[str] = None


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    seed: int
    iterations: int
    runs: int
    mode: str                  # "exact" | "empirical"
    n_samples: Optional[int]
    n_eval: int
    output_dir: str
    workers: Optional[int]
    medians: bool
    kind: str                  # "instance" | "credit" | "rideshare"
    methods: tuple
    instance: Any = None
    credit: Optional[CreditSettings] = None
    rideshare: Optional[RideshareSettings] = None
    raw_bytes: bytes = b""


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"missing key {key!r} in [{where}]")
    return table[key]


def _schedule_from(entry: dict, idx: int):
    w = entry.get("window", 1)
    if w == "all":
        return all_history()
    if w == "half":
        return half_history()
    if isinstance(w, bool) or not isinstance(w, int) or w < 1:
        raise ConfigError(f"methods[{idx}]: window must be a positive integer, 'all' or 'half'")
    return window(w)


def _parse_methods(raw: Any) -> tuple:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("config needs a non-empty [[methods]] list")
    methods = []
    for i, entry in enumerate(raw):
        kind = entry.get("kind")
        if kind == "rrm":
            methods.append(Method("rrm"))
        elif kind == "rgd":
            eta = entry.get("eta")
            if not isinstance(eta, (int, float)) or eta <= 0:
                raise ConfigError(f"methods[{i}]: rgd needs a positive eta")
            methods.append(Method("rgd", eta=float(eta)))
        elif kind == "arm":
            methods.append(Method("arm", schedule=_schedule_from(entry, i)))
        else:
            raise ConfigError(f"methods[{i}]: unknown kind {kind!r}")
    labels = [m.label for m in methods]
    if len(labels) != len(set(labels)):
        raise ConfigError(f"duplicate method labels: {labels}")
    return tuple(methods)


def _build_instance(table: dict):
    kind = _require(table, "kind", "instance")
    if kind not in INSTANCE_KINDS:
        raise ConfigError(f"unknown instance kind {kind!r}; choose from {sorted(INSTANCE_KINDS)}")
    params = {k: v for k, v in table.items() if k != "kind"}
    try:
        return kind, INSTANCE_KINDS[kind](**params)
    except TypeError as exc:
        raise ConfigError(f"[instance] parameters invalid for {kind!r}: {exc}") from exc
    except Exception as exc:
        raise ConfigError(f"[instance] {kind!r}: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    exp = doc.get("experiment")
    if not isinstance(exp, dict):
        raise ConfigError("missing [experiment] table")
    name = str(_require(exp, "name", "experiment"))
    seed = _require(exp, "seed", "experiment")
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("[experiment] seed must be an integer (no implicit entropy)")
    iterations = exp.get("iterations", 20)
    runs = exp.get("runs", 1)
    if not isinstance(iterations, int) or iterations < 0:
        raise ConfigError("[experiment] iterations must be an integer >= 0")
    if not isinstance(runs, int) or runs < 1:
        raise ConfigError("[experiment] runs must be an integer >= 1")
    mode = exp.get("mode", "exact")
    if mode not in ("exact", "empirical"):
        raise ConfigError(f"[experiment] mode must be exact or empirical, got {mode!r}")
    n_samples = exp.get("n_samples")
    if mode == "empirical":
        if not isinstance(n_samples, int) or n_samples < 1:
            raise ConfigError("[experiment] empirical mode needs integer n_samples >= 1")
    n_eval = exp.get("n_eval", 10_000)
    output_dir = exp.get("output_dir", f"results/{name}")
    workers = exp.get("workers")
    medians = bool(exp.get("medians", False))

    present = [k for k in ("instance", "credit", "rideshare") if k in doc]
    if len(present) != 1:
        raise ConfigError(f"config must have exactly one of [instance], [credit], "
                          f"[rideshare]; found {present or 'none'}")
    kind = present[0]
    methods = _parse_methods(doc.get("methods"))

    instance = credit = rideshare = None
    if kind == "instance":
        _, instance = _build_instance(doc["instance"])
    elif kind == "credit":
        try:
            table = dict(doc["credit"])
            if "strategic_indices" in table:
                table["strategic_indices"] = tuple(table["strategic_indices"])
            credit = CreditSettings(**table)
        except TypeError as exc:
            raise ConfigError(f"[credit] invalid: {exc}") from exc
        if any(m.kind == "rgd" for m in methods):
            raise ConfigError("the credit environment supports rrm and arm methods only")
    else:
        try:
            rideshare = RideshareSettings(**doc["rideshare"])
        except TypeError as exc:
            raise ConfigError(f"[rideshare] invalid: {exc}") from exc
        if rideshare.update_order not in ("simultaneous", "alternating"):
            raise ConfigError("[rideshare] update_order must be simultaneous or alternating")
        if any(m.kind == "rgd" for m in methods):
            raise ConfigError("the rideshare game supports rrm and arm methods only")

    return ExperimentConfig(name=name, seed=seed, iterations=iterations, runs=runs,
                            mode=mode, n_samples=n_samples, n_eval=n_eval,
                            output_dir=str(output_dir), workers=workers, medians=medians,
                            kind=kind, methods=methods, instance=instance,
                            credit=credit, rideshare=rideshare, raw_bytes=raw)
