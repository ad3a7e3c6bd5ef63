from .bench import DEFAULT_PRODUCT_SWEEP, BenchRow, bench_step, with_num_products
from .evaluate import (
    EvalReport,
    episode_components,
    evaluate_policy,
    run_episode,
    stockout_rate,
)
from .metrics import (
    BENCH_COLUMNS,
    EVAL_COLUMNS,
    METRIC_COLUMNS,
    TIMING_COLUMNS,
    CsvLog,
)
from .train import TrainResult, eval_seed_list, run_experiment

__all__ = [
    "DEFAULT_PRODUCT_SWEEP",
    "BenchRow",
    "bench_step",
    "with_num_products",
    "EvalReport",
    "episode_components",
    "evaluate_policy",
    "run_episode",
    "stockout_rate",
    "BENCH_COLUMNS",
    "EVAL_COLUMNS",
    "METRIC_COLUMNS",
    "TIMING_COLUMNS",
    "CsvLog",
    "TrainResult",
    "eval_seed_list",
    "run_experiment",
]
