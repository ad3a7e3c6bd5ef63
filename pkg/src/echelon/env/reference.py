"""Scalar reference implementation of the environment dynamics.

This rewrites every update as an explicit Python loop over stores and
products, sharing no code with the vectorized environment beyond the config
and the table container.  Tests drive both against the same action stream
and require integer-identical tables and bit-identical rewards.  Slow on
purpose; never use it for training.
"""

from __future__ import annotations

import math

import numpy as np

from ..config import ChainConfig
from .core import EpisodeComplete, StepOutcome
from .tables import STORE, WAREHOUSE, EpisodeTables


def _ration(requests: list[int], available: int) -> list[int]:
    """Largest-remainder split of `available` proportional to `requests`."""
    total = sum(requests)
    if total <= available:
        return list(requests)
    shares = [r * available // total for r in requests]
    remainders = [r * available % total for r in requests]
    leftover = available - sum(shares)
    order = sorted(range(len(requests)), key=lambda v: (-remainders[v], v))
    for v in order[:leftover]:
        shares[v] += 1
    return shares


class ReferenceEnv:
    """Loop-based twin of InventoryEnv with the same public surface."""

    def __init__(self, cfg: ChainConfig):
        self.cfg = cfg
        self.tables: EpisodeTables | None = None
        self.t = 0

    def reset(self, seed: int) -> EpisodeTables:
        cfg = self.cfg
        tables = EpisodeTables.zeros(cfg)
        tables.demand[:] = np.random.default_rng(seed).poisson(
            cfg.demand_mean, size=(cfg.horizon, cfg.num_stores, cfg.num_products)
        )
        for v in range(cfg.num_stores):
            for k in range(cfg.num_products):
                tables.on_hand[0, v, WAREHOUSE, k] = cfg.initial_inventory[0, k]
                tables.on_hand[0, v, STORE, k] = cfg.initial_inventory[1 + v, k]
        self.tables = tables
        self.t = 0
        return tables

    @property
    def done(self) -> bool:
        return self.t >= self.cfg.horizon

    def step(self, store_requests, warehouse_request, allocation_caps) -> StepOutcome:
        if self.tables is None:
            raise RuntimeError("call reset() before step()")
        if self.done:
            raise EpisodeComplete(f"episode already ran its {self.cfg.horizon} periods")
        cfg, tb, t = self.cfg, self.tables, self.t
        n, k_count = cfg.num_stores, cfg.num_products
        theta_u = float(cfg.unfulfilled_penalty_coeff)

        req = [[int(store_requests[v][k]) for k in range(k_count)] for v in range(n)]
        wh_req = [int(warehouse_request[k]) for k in range(k_count)]
        caps = [[int(allocation_caps[v][k]) for k in range(k_count)] for v in range(n)]

        demand = [[int(tb.demand[t, v, k]) for k in range(k_count)] for v in range(n)]
        x_store = [[int(tb.on_hand[t, v, STORE, k]) for k in range(k_count)] for v in range(n)]
        x_wh = [int(tb.on_hand[t, 0, WAREHOUSE, k]) for k in range(k_count)]

        sales = [
            [min(demand[v][k], x_store[v][k]) for k in range(k_count)] for v in range(n)
        ]

        accepted = [[0] * k_count for _ in range(n)]
        for k in range(k_count):
            capped = [min(req[v][k], caps[v][k]) for v in range(n)]
            shares = _ration(capped, x_wh[k])
            for v in range(n):
                accepted[v][k] = shares[v]
        wh_accepted = list(wh_req)

        for v in range(n):
            for k in range(k_count):
                tb.requested[t, v, STORE, k] = req[v][k]
                tb.requested[t, v, WAREHOUSE, k] = wh_req[k]
                tb.accepted[t, v, STORE, k] = accepted[v][k]
                tb.accepted[t, v, WAREHOUSE, k] = wh_accepted[k]
                tb.flows[t, v, 0, k] = accepted[v][k]
                tb.flows[t, v, 1, k] = sales[v][k]

        arrivals = [[0] * k_count for _ in range(n)]
        for v in range(n):
            src = t - int(cfg.store_lead_times[v])
            if src >= 0:
                for k in range(k_count):
                    arrivals[v][k] = int(tb.accepted[src, v, STORE, k])
        src_wh = t - cfg.warehouse_lead_time
        wh_arrival = [
            int(tb.accepted[src_wh, 0, WAREHOUSE, k]) if src_wh >= 0 else 0
            for k in range(k_count)
        ]

        for v in range(n):
            for k in range(k_count):
                nxt = x_store[v][k] - sales[v][k] + arrivals[v][k]
                assert nxt >= 0
                tb.on_hand[t + 1, v, STORE, k] = min(nxt, int(cfg.store_capacity[v, k]))
        for k in range(k_count):
            shipped = sum(accepted[v][k] for v in range(n))
            nxt = x_wh[k] - shipped + wh_arrival[k]
            assert nxt >= 0
            clipped = min(nxt, int(cfg.warehouse_capacity[k]))
            for v in range(n):
                tb.on_hand[t + 1, v, WAREHOUSE, k] = clipped

        for v in range(n):
            for k in range(k_count):
                tr = int(tb.in_transit[t, v, STORE, k]) - arrivals[v][k] + accepted[v][k]
                assert tr >= 0
                tb.in_transit[t + 1, v, STORE, k] = tr
        for k in range(k_count):
            tr = int(tb.in_transit[t, 0, WAREHOUSE, k]) - wh_arrival[k] + wh_accepted[k]
            assert tr >= 0
            for v in range(n):
                tb.in_transit[t + 1, v, WAREHOUSE, k] = tr

        # Reward terms accumulate left to right in product order, matching
        # the vectorized path's rounding sequence exactly.
        local = np.zeros(n + 1, dtype=np.float64)
        for v in range(n):
            rev = 0.0
            hold = 0.0
            for k in range(k_count):
                rev += float(sales[v][k]) * float(cfg.selling_price[v, k])
            for k in range(k_count):
                hold += float(x_store[v][k]) * float(cfg.holding_cost[v + 1, k])
            short = sum(demand[v][k] - sales[v][k] for k in range(k_count))
            local[v + 1] = (rev - hold) - theta_u * float(short)

        proc = 0.0
        hold_wh = 0.0
        for k in range(k_count):
            proc += float(wh_arrival[k]) * float(cfg.procurement_cost[k])
        for k in range(k_count):
            hold_wh += float(x_wh[k]) * float(cfg.holding_cost[0, k])
        uncovered_units = sum(
            max(sum(req[v][k] for v in range(n)) - x_wh[k], 0) for k in range(k_count)
        )
        local[0] = -((proc + hold_wh) + theta_u * float(uncovered_units))

        shared = math.fsum(local.tolist())
        tb.shared_reward[t] = shared

        revenue = 0.0
        for v in range(n):
            for k in range(k_count):
                revenue += float(sales[v][k]) * float(cfg.selling_price[v, k])
        holding = 0.0
        for v in range(n):
            for k in range(k_count):
                holding += float(x_store[v][k]) * float(cfg.holding_cost[v + 1, k])
        for k in range(k_count):
            holding += float(x_wh[k]) * float(cfg.holding_cost[0, k])
        short_total = sum(
            demand[v][k] - sales[v][k] for v in range(n) for k in range(k_count)
        )
        unfulfilled = theta_u * float(short_total + uncovered_units)

        self.t = t + 1
        return StepOutcome(
            t=t,
            shared_reward=shared,
            local_rewards=local,
            revenue=revenue,
            holding_cost=holding,
            procurement_cost=proc,
            unfulfilled_penalty=unfulfilled,
            demand=np.array(demand, dtype=np.int64),
            sales=np.array(sales, dtype=np.int64),
            accepted=np.array(accepted, dtype=np.int64),
            warehouse_accepted=np.array(wh_accepted, dtype=np.int64),
            done=t + 1 >= cfg.horizon,
        )
