"""Figure emission from result bundles: distance-to-stable-point with the
lower-bound overlay, loss shift per method, and performative risk (log scale
when positive), one vector-graphics file per figure."""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ..errors import ConfigError
from .bundle import ResultBundle, read_aggregate_csv
from .config import load_config

FIGSIZE = (6.0, 4.0)


def _overlay_curve(config):
    inst = config.instance
    if inst is None or not hasattr(inst, "lower_bound_constant"):
        return None, None
    if hasattr(inst, "rate_lower"):
        rate = inst.rate_lower
    else:
        rate = inst.fixed_point_tail_ratio()
    K = inst.lower_bound_constant(config.iterations)
    t = np.arange(config.iterations + 1)
    return K * rate**t, f"lower bound {K:.3g}·{rate:.3g}^t"


def plot_bundle(bundle_dir, out_dir=None) -> list[Path]:
    """Render every figure the bundle supports; returns written paths."""
    bundle = ResultBundle(bundle_dir)
    if not bundle.aggregate_path.exists():
        raise ConfigError(f"{bundle_dir} has no aggregate CSV")
    agg = read_aggregate_csv(bundle.aggregate_path)
    config = load_config(bundle.config_path) if bundle.config_path.exists() else None
    out = Path(out_dir) if out_dir is not None else bundle.root / "plots"
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def has_column(col: str) -> bool:
        return any(np.any(~np.isnan(cols[col])) for cols in agg.values())

    if has_column("dist_mean"):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        for method, cols in agg.items():
            t = np.arange(len(cols["dist_mean"]))
            ax.plot(t, cols["dist_mean"], label=method)
        if config is not None:
            curve, label = _overlay_curve(config)
            if curve is not None:
                ax.plot(np.arange(len(curve)), curve, "k:", label=label)
        ax.set_yscale("log")
        ax.set_xlabel("iteration t")
        ax.set_ylabel("distance to stable point")
        ax.legend()
        fig.tight_layout()
        path = out / "distance.svg"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

    if has_column("shift_mean"):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        for method, cols in agg.items():
            y = cols["shift_mean"]
            t = np.arange(len(y))
            keep = ~np.isnan(y)
            ax.plot(t[keep], y[keep], label=method)
        ax.set_xlabel("iteration t")
        ax.set_ylabel("loss shift")
        ax.legend()
        fig.tight_layout()
        path = out / "loss_shift.svg"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

    if has_column("risk_mean"):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        positive = True
        for method, cols in agg.items():
            y = cols["risk_mean"]
            t = np.arange(len(y))
            keep = ~np.isnan(y)
            positive &= bool(np.all(y[keep] > 0))
            ax.plot(t[keep], y[keep], label=method)
        if positive:
            ax.set_yscale("log")
            ax.set_ylabel("performative risk (log scale)")
        else:
            ax.set_ylabel("performative risk")
        ax.set_xlabel("iteration t")
        ax.legend()
        fig.tight_layout()
        path = out / "perf_risk.svg"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
