"""rhobench: benchmarking optimizers on plateau-discretized test functions."""

from .classic import (
    LAMBDA,
    MU,
    TARGET_DELTA,
    RunRecord,
    es_run,
    ga_run,
    intea_run,
    max_entropy_sample,
)
from .cma import (
    CmaState,
    MarginState,
    cma_run,
    default_alpha,
    default_lambda,
    margin_correction,
)
from .discretize import DiscretizedProblem, plateau_index, snap_to_plateau
from .harness import (
    PAPER_RHOS,
    ExperimentConfig,
    load_config,
    run_experiment,
    run_seed,
    summarize,
)
from .metrics import default_targets, ecdf, ert, hitting_time, success_rate
from .problems import Domain, ProblemInstance, make_instance

__version__ = "0.1.0"

__all__ = [
    "LAMBDA",
    "MU",
    "TARGET_DELTA",
    "RunRecord",
    "es_run",
    "ga_run",
    "intea_run",
    "max_entropy_sample",
    "CmaState",
    "MarginState",
    "cma_run",
    "default_alpha",
    "default_lambda",
    "margin_correction",
    "DiscretizedProblem",
    "plateau_index",
    "snap_to_plateau",
    "PAPER_RHOS",
    "ExperimentConfig",
    "load_config",
    "run_experiment",
    "run_seed",
    "summarize",
    "default_targets",
    "ecdf",
    "ert",
    "hitting_time",
    "success_rate",
    "Domain",
    "ProblemInstance",
    "make_instance",
    "__version__",
]
