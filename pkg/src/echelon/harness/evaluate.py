"""Policy evaluation: fixed-seed episode rollouts and summary metrics.

A policy is anything with ``begin_episode(seed)`` and ``act(tables, t)``
returning the (store_requests, warehouse_request, allocation_caps) triple.
Evaluation always replays the same seed list, so two policies can be
compared on identical demand paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..config import ChainConfig
from ..env.core import InventoryEnv
from ..env.tables import STORE, WAREHOUSE, EpisodeTables


def stockout_rate(cfg: ChainConfig, tables: EpisodeTables) -> float:
    """Fraction of (period, store) pairs with zero stock against live demand."""
    on_hand = tables.on_hand[: cfg.horizon, :, STORE, :]
    starved = (on_hand == 0) & (tables.demand > 0)
    return float(starved.any(axis=2).mean())


def episode_components(cfg: ChainConfig, tables: EpisodeTables) -> dict[str, float]:
    """Episode totals of the four reward components, recomputed from the
    tables alone (independent of the per-step outcome arithmetic)."""
    t_len = cfg.horizon
    sales = tables.flows[:, :, 1, :]
    revenue = math.fsum((sales * cfg.selling_price).ravel().tolist())

    store_hold = tables.on_hand[:t_len, :, STORE, :] * cfg.holding_cost[1:]
    wh_hold = tables.on_hand[:t_len, 0, WAREHOUSE, :] * cfg.holding_cost[0]
    holding = math.fsum(store_hold.ravel().tolist() + wh_hold.ravel().tolist())

    arrive_by = t_len - cfg.warehouse_lead_time
    arrivals = tables.accepted[:arrive_by, 0, WAREHOUSE, :] if arrive_by > 0 else 0
    procurement = math.fsum((arrivals * cfg.procurement_cost).ravel().tolist())

    short = int((tables.demand - sales).sum())
    asked = tables.requested[:t_len, :, STORE, :].sum(axis=1)
    uncovered = int(
        np.maximum(asked - tables.on_hand[:t_len, 0, WAREHOUSE, :], 0).sum()
    )
    unfulfilled = cfg.unfulfilled_penalty_coeff * float(short + uncovered)

    return {
        "revenue": revenue,
        "holding_cost": holding,
        "procurement_cost": procurement,
        "unfulfilled_penalty": unfulfilled,
    }


def run_episode(
    cfg: ChainConfig, policy, seed: int, policy_seed: int | None = None
) -> tuple[EpisodeTables, float]:
    """One full episode; returns the tables and the total shared reward."""
    env = InventoryEnv(cfg)
    tables = env.reset(seed)
    policy.begin_episode(policy_seed)
    while not env.done:
        store_req, wh_req, caps = policy.act(tables, env.t)
        env.step(store_req, wh_req, caps)
    return tables, math.fsum(tables.shared_reward.tolist())


@dataclass
class EvalReport:
    seeds: list[int]
    returns: list[float] = field(default_factory=list)
    stockout_rates: list[float] = field(default_factory=list)
    components: list[dict[str, float]] = field(default_factory=list)

    @property
    def mean_return(self) -> float:
        return math.fsum(self.returns) / len(self.returns)

    @property
    def std_return(self) -> float:
        mean = self.mean_return
        var = math.fsum((r - mean) ** 2 for r in self.returns) / len(self.returns)
        return math.sqrt(var)

    @property
    def mean_stockout_rate(self) -> float:
        return math.fsum(self.stockout_rates) / len(self.stockout_rates)

    def mean_component(self, name: str) -> float:
        return math.fsum(c[name] for c in self.components) / len(self.components)


def evaluate_policy(
    cfg: ChainConfig, policy, seeds, policy_seed_offset: int = 0x5EED
) -> EvalReport:
    """Replay `seeds`; stochastic policies get a distinct derived seed."""
    report = EvalReport(seeds=[int(s) for s in seeds])
    for s in report.seeds:
        policy_seed = int(
            np.random.SeedSequence([s, policy_seed_offset]).generate_state(1)[0]
        )
        tables, total = run_episode(cfg, policy, s, policy_seed=policy_seed)
        report.returns.append(total)
        report.stockout_rates.append(stockout_rate(cfg, tables))
        report.components.append(episode_components(cfg, tables))
    return report
