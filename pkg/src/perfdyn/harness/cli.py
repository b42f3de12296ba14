"""Command-line interface.

    perfdyn run <config.toml> [--output-dir DIR] [--workers N]
    perfdyn validate [--json PATH]
    perfdyn plot <bundle_dir> [--output-dir DIR]
    perfdyn lowerbound-check <bundle_dir> --framework {perdomo,mofakhami} [--slack F]

Exit codes: 0 success, 1 validation or acceptance failure, 2 configuration
error. Worker count can also be set via the PERFDYN_WORKERS environment
variable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ConfigError, PerfdynError
from ..minimizers.runner import WORKERS_ENV_VAR

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def _cmd_run(args) -> int:
    from .config import load_config
    from .runner import run_experiment

    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    try:
        bundle = run_experiment(config, output_dir=args.output_dir, workers=args.workers)
    except PerfdynError as exc:
        out = Path(args.output_dir) if args.output_dir else Path(config.output_dir)
        payload = {"error": type(exc).__name__, "message": str(exc)}
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "error.json").write_text(json.dumps(payload, indent=2) + "\n")
        except OSError:
            pass
        print(json.dumps(payload), file=sys.stderr)
        return EXIT_FAILURE
    print(f"bundle written to {bundle.root}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    from .validate import run_all_suites

    results = run_all_suites()
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.runtime_s:7.2f}s  {r.worst}")
        for note in r.notes:
            print(f"{'':<{width}}  note: {note}")
    failed = [r.name for r in results if not r.passed]
    if args.json:
        payload = [{"name": r.name, "passed": r.passed, "runtime_s": r.runtime_s,
                    "worst": r.worst, "notes": r.notes} for r in results]
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
    if failed:
        print(f"FAILED suites: {', '.join(failed)}")
        return EXIT_FAILURE
    print(f"all {len(results)} suites passed")
    return EXIT_OK


def _cmd_plot(args) -> int:
    from .plots import plot_bundle

    try:
        written = plot_bundle(args.bundle, out_dir=args.output_dir)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_lowerbound_check(args) -> int:
    from .runner import lowerbound_check

    try:
        report = lowerbound_check(args.bundle, framework=args.framework, slack=args.slack)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["passed"] else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perfdyn",
        description="Simulate and verify performative-prediction retraining dynamics.",
        epilog=f"Worker count env override: {WORKERS_ENV_VAR}.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config and write its bundle")
    p_run.add_argument("config")
    p_run.add_argument("--output-dir", default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.set_defaults(fn=_cmd_run)

    p_val = sub.add_parser("validate", help="run every closed-form/inequality suite")
    p_val.add_argument("--json", default=None, help="also write the report as JSON")
    p_val.set_defaults(fn=_cmd_validate)

    p_plot = sub.add_parser("plot", help="render figures from a result bundle")
    p_plot.add_argument("bundle")
    p_plot.add_argument("--output-dir", default=None)
    p_plot.set_defaults(fn=_cmd_plot)

    p_lb = sub.add_parser("lowerbound-check",
                          help="check bundle distances against the instance's lower bound")
    p_lb.add_argument("bundle")
    p_lb.add_argument("--framework", required=True, choices=("perdomo", "mofakhami"))
    p_lb.add_argument("--slack", type=float, default=0.9)
    p_lb.set_defaults(fn=_cmd_lowerbound_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
