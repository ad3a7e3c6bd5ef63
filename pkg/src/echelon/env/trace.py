"""CSV export of a full episode, one row per (period, vertex, product)."""

from __future__ import annotations

import csv
from typing import IO

from ..config import ChainConfig
from .tables import STORE, WAREHOUSE, EpisodeTables

COLUMNS = (
    "t",
    "vertex",
    "product",
    "on_hand",
    "in_transit",
    "requested",
    "accepted",
    "demand",
    "sales",
    "reward_shared",
)


def write_trace(fh: IO[str], cfg: ChainConfig, tables: EpisodeTables) -> None:
    """Write executed periods to `fh`.  Demand and sales are blank for the
    warehouse rows; stock columns hold period-start values; the shared
    reward is repeated on every row of its period and printed with repr()
    so the float round-trips exactly.
    """
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(COLUMNS)
    for t in range(cfg.horizon):
        reward = repr(float(tables.shared_reward[t]))
        for k in range(cfg.num_products):
            writer.writerow(
                [
                    t,
                    "warehouse",
                    k,
                    tables.on_hand[t, 0, WAREHOUSE, k],
                    tables.in_transit[t, 0, WAREHOUSE, k],
                    tables.requested[t, 0, WAREHOUSE, k],
                    tables.accepted[t, 0, WAREHOUSE, k],
                    "",
                    "",
                    reward,
                ]
            )
        for v in range(cfg.num_stores):
            for k in range(cfg.num_products):
                writer.writerow(
                    [
                        t,
                        f"store_{v}",
                        k,
                        tables.on_hand[t, v, STORE, k],
                        tables.in_transit[t, v, STORE, k],
                        tables.requested[t, v, STORE, k],
                        tables.accepted[t, v, STORE, k],
                        tables.demand[t, v, k],
                        tables.flows[t, v, 1, k],
                        reward,
                    ]
                )


def write_trace_file(path: str, cfg: ChainConfig, tables: EpisodeTables) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_trace(fh, cfg, tables)
