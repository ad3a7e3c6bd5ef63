"""CSV writers for training metrics.

metrics.csv holds only values that are deterministic for a given seed, so a
rerun produces a byte-identical file; wall-clock durations go to the
timing.csv sidecar instead.  Floats are written with repr() so they
round-trip exactly.
"""

from __future__ import annotations

import csv
from typing import IO

METRIC_COLUMNS = (
    "episode",
    "episode_return",
    "rolling_mean_100",
    "revenue",
    "holding_cost",
    "procurement_cost",
    "unfulfilled_penalty",
    "stockouts",
)

EVAL_COLUMNS = (
    "episodes",
    "eval_mean_return",
    "eval_return_std",
    "eval_stockout_rate",
    "policy_loss",
    "value_loss",
    "entropy",
    "approx_kl",
    "grad_norm",
    "clip_frac",
    "rolled_back",
)

TIMING_COLUMNS = ("episodes", "wall_seconds")

BENCH_COLUMNS = ("num_products", "num_stores", "steps", "median_step_seconds")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class CsvLog:
    """Append-only CSV with a fixed column set."""

    def __init__(self, fh: IO[str], columns: tuple[str, ...]):
        self.columns = columns
        self._writer = csv.writer(fh, lineterminator="\n")
        self._fh = fh
        self._writer.writerow(columns)

    def row(self, **values) -> None:
        unknown = set(values) - set(self.columns)
        if unknown:
            raise ValueError(f"unknown metric column(s): {sorted(unknown)}")
        self._writer.writerow([_fmt(values[c]) for c in self.columns])
        self._fh.flush()
