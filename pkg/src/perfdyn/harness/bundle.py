"""Result bundles on disk: config echo, per-method trace CSVs, an aggregate
CSV of per-iteration means and standard errors, and a JSON report."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from ..minimizers.runner import RunTrace, write_trace_csv

TRACE_DIR = "traces"
AGGREGATE_FILE = "aggregate.csv"
CONFIG_ECHO = "config.toml"
REPORT_FILE = "report.json"


def _fmt(x: float) -> str:
    return "" if x is None or np.isnan(x) else f"{x:.17g}"


def _col_stats(rows: np.ndarray):
    """Mean, standard error and median over runs, ignoring missing values."""
    mean = np.full(rows.shape[1], np.nan)
    se = np.full(rows.shape[1], np.nan)
    med = np.full(rows.shape[1], np.nan)
    for t in range(rows.shape[1]):
        col = rows[:, t]
        col = col[~np.isnan(col)]
        if len(col) == 0:
            continue
        mean[t] = col.mean()
        med[t] = np.median(col)
        se[t] = col.std(ddof=1) / np.sqrt(len(col)) if len(col) > 1 else 0.0
    return mean, se, med


def write_aggregate_csv(traces_by_method: dict[str, Sequence[RunTrace]], path,
                        medians: bool = False) -> None:
    """Per-iteration aggregates over runs, one block per method in insertion
    order; byte-stable for a fixed set of traces."""
    header = ["method", "t", "n_runs", "dist_mean", "dist_se",
              "shift_mean", "shift_se", "risk_mean", "risk_se"]
    if medians:
        header += ["dist_median", "shift_median", "risk_median"]
    lines = [",".join(header)]
    for method, traces in traces_by_method.items():
        n = len(traces)
        dist = np.stack([tr.dist_to_ps for tr in traces])
        shift = np.stack([tr.loss_shift for tr in traces])
        risk = np.stack([tr.perf_risk for tr in traces])
        d_m, d_s, d_md = _col_stats(dist)
        s_m, s_s, s_md = _col_stats(shift)
        r_m, r_s, r_md = _col_stats(risk)
        for t in range(dist.shape[1]):
            row = [method, str(t), str(n), _fmt(d_m[t]), _fmt(d_s[t]),
                   _fmt(s_m[t]), _fmt(s_s[t]), _fmt(r_m[t]), _fmt(r_s[t])]
            if medians:
                row += [_fmt(d_md[t]), _fmt(s_md[t]), _fmt(r_md[t])]
            lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_aggregate_csv(path) -> dict[str, dict[str, np.ndarray]]:
    """aggregate.csv back as {method: {column: array over t}}."""
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    out: dict[str, dict[str, list]] = {}
    for line in text[1:]:
        parts = line.split(",")
        row = dict(zip(header, parts))
        m = out.setdefault(row["method"], {c: [] for c in header[1:]})
        for c in header[1:]:
            v = row[c]
            m[c].append(float(v) if v not in ("",) else np.nan)
    return {meth: {c: np.asarray(vals) for c, vals in cols.items()}
            for meth, cols in out.items()}


class ResultBundle:
    """Paths and writers for one experiment's outputs."""

    def __init__(self, root):
        self.root = Path(root)

    @property
    def aggregate_path(self) -> Path:
        return self.root / AGGREGATE_FILE

    @property
    def config_path(self) -> Path:
        return self.root / CONFIG_ECHO

    @property
    def report_path(self) -> Path:
        return self.root / REPORT_FILE

    def trace_path(self, method: str) -> Path:
        return self.root / TRACE_DIR / f"{method}.csv"

    def write(self, config_bytes: bytes, traces_by_method: dict[str, Sequence[RunTrace]],
              report: dict, medians: bool = False) -> None:
        (self.root / TRACE_DIR).mkdir(parents=True, exist_ok=True)
        self.config_path.write_bytes(config_bytes)
        for method, traces in traces_by_method.items():
            write_trace_csv(traces, self.trace_path(method))
        write_aggregate_csv(traces_by_method, self.aggregate_path, medians=medians)
        self.report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
