from .bundle import ResultBundle, read_aggregate_csv, write_aggregate_csv
from .config import ExperimentConfig, load_config
from .runner import lowerbound_check, run_experiment
from .validate import ALL_SUITES, SuiteResult, run_all_suites

__all__ = [
    "ALL_SUITES",
    "ExperimentConfig",
    "ResultBundle",
    "SuiteResult",
    "load_config",
    "lowerbound_check",
    "read_aggregate_csv",
    "run_all_suites",
    "run_experiment",
    "write_aggregate_csv",
]
