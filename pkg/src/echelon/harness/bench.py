"""Step-latency benchmark across product-count scales.

Holds the chain shape fixed and sweeps the number of products, timing the
simulator step alone (action sampling happens outside the timed region).
Reports the median per-step wall time for each scale.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, replace

import numpy as np

from ..baselines.random_policy import RandomPolicy
from ..config import ChainConfig
from ..env.core import InventoryEnv
from ..env.reference import ReferenceEnv

DEFAULT_PRODUCT_SWEEP = (1, 10, 100, 1000)


@dataclass
class BenchRow:
    num_products: int
    num_stores: int
    steps: int
    median_step_seconds: float


def with_num_products(cfg: ChainConfig, num_products: int) -> ChainConfig:
    """Same chain with every per-product column cloned from product 0."""
    rep = lambda a: np.repeat(a[..., :1], num_products, axis=-1)
    return replace(
        cfg,
        num_products=num_products,
        store_capacity=rep(cfg.store_capacity),
        warehouse_capacity=rep(cfg.warehouse_capacity),
        selling_price=rep(cfg.selling_price),
        holding_cost=rep(cfg.holding_cost),
        procurement_cost=rep(cfg.procurement_cost),
        demand_mean=rep(cfg.demand_mean),
        initial_inventory=rep(cfg.initial_inventory),
    )


def bench_step(
    cfg: ChainConfig,
    product_sweep: tuple[int, ...] = DEFAULT_PRODUCT_SWEEP,
    min_steps: int = 1000,
    seed: int = 0,
    reference: bool = False,
) -> list[BenchRow]:
    rows = []
    for k in product_sweep:
        scaled = with_num_products(cfg, k)
        env = (ReferenceEnv if reference else InventoryEnv)(scaled)
        policy = RandomPolicy(scaled, seed)
        times: list[float] = []
        episode = 0
        while len(times) < min_steps:
            tables = env.reset(seed + episode)
            policy.begin_episode(seed + 10_000 + episode)
            episode += 1
            while not env.done:
                store_req, wh_req, caps = policy.act(tables, env.t)
                start = time.perf_counter()
                env.step(store_req, wh_req, caps)
                times.append(time.perf_counter() - start)
        rows.append(
            BenchRow(
                num_products=k,
                num_stores=scaled.num_stores,
                steps=len(times),
                median_step_seconds=statistics.median(times),
            )
        )
    return rows
