"""Uncapacitated facility location: instance models, LS/RLS local search, exact baselines
and a reproducible benchmark harness."""

from .evaluation import SearchState, evaluate_full
from .exact import brute_force_opt, export_lp, import_open_set
from .experiment import ExperimentConfig, compare_algorithms, run_experiment, summarize
from .instance import Instance, Model, ModelId, Rng64, generate, parse_instance, write_instance
from .search import Algorithm, RunRecord, ls_run, multi_start, rls_run

__all__ = [
    "Algorithm", "ExperimentConfig", "Instance", "Model", "ModelId", "Rng64", "RunRecord",
    "SearchState", "brute_force_opt", "compare_algorithms", "evaluate_full", "export_lp",
    "generate", "import_open_set", "ls_run", "multi_start", "parse_instance", "rls_run",
    "run_experiment", "summarize", "write_instance",
]
