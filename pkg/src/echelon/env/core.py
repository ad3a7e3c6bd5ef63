"""Two-echelon inventory environment: one warehouse, N stores, K products.

Within each period the order of events is fixed:

1. demand is revealed at the stores (Poisson, pre-drawn for the episode),
2. sales are resolved against store on-hand stock,
3. store replenishment requests are resolved against warehouse stock
   (allocation caps, then proportional rationing),
4. the warehouse order is accepted in full by the supplier,
5. on-hand stock is updated with shipments out and arrivals in
   (orders placed ``lead`` periods ago), then clipped to capacity with
   the overflow discarded,
6. in-transit stock is rolled forward,
7. rewards are computed from period-start stock and the period's flows.

Rewards: revenue is earned on realized sales; holding cost is charged on
period-start on-hand stock at every vertex; procurement cost is charged on
the supplier shipment arriving this period; the shortage penalty charges
every unmet demand unit at the stores plus every requested-but-uncovered
unit at the warehouse.  Per-vertex terms are reduced left to right in
product order (the scalar twin reproduces the same rounding with a plain
accumulator), and the shared reward is defined as the exact sum of the
local rewards via `math.fsum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import ChainConfig
from .actions import check_on_grid
from .allocation import allocate
from .tables import STORE, WAREHOUSE, EpisodeTables


def _fold(products: np.ndarray) -> np.ndarray:
    """Strict left-to-right sum over the last axis.

    The summation order is part of the reward contract: the scalar twin
    reproduces it with a plain accumulator loop, so both paths round
    identically at any scale.
    """
    return np.add.accumulate(products, axis=-1)[..., -1]


class EpisodeComplete(RuntimeError):
    """Raised when step() is called after the horizon has been reached."""


class IntegrityError(RuntimeError):
    """An internal invariant broke (negative stock or in-transit)."""


@dataclass
class StepOutcome:
    """Everything produced by one environment step."""

    t: int                      # period that was just executed
    shared_reward: float
    local_rewards: np.ndarray   # (N+1,) float64, index 0 = warehouse
    revenue: float
    holding_cost: float
    procurement_cost: float
    unfulfilled_penalty: float
    demand: np.ndarray          # (N, K)
    sales: np.ndarray           # (N, K)
    accepted: np.ndarray        # (N, K) store replenishment after rationing
    warehouse_accepted: np.ndarray  # (K,)
    done: bool


class InventoryEnv:
    """Vectorized episode simulator over the dense tables."""

    def __init__(self, cfg: ChainConfig):
        self.cfg = cfg
        self.tables: EpisodeTables | None = None
        self.t = 0
        self._store_rows = np.arange(cfg.num_stores)

    def reset(self, seed: int) -> EpisodeTables:
        """Start a new episode; demand for all periods is drawn up front."""
        cfg = self.cfg
        rng = np.random.default_rng(seed)
        tables = EpisodeTables.zeros(cfg)
        tables.demand[:] = rng.poisson(
            cfg.demand_mean, size=(cfg.horizon, cfg.num_stores, cfg.num_products)
        )
        tables.on_hand[0, :, WAREHOUSE, :] = cfg.initial_inventory[0]
        tables.on_hand[0, :, STORE, :] = cfg.initial_inventory[1:]
        self.tables = tables
        self.t = 0
        return tables

    @property
    def done(self) -> bool:
        return self.t >= self.cfg.horizon

    def step(
        self,
        store_requests: np.ndarray,    # (N, K) units on the order grid
        warehouse_request: np.ndarray,  # (K,) units on the order grid
        allocation_caps: np.ndarray,    # (N, K) units on the order grid
    ) -> StepOutcome:
        if self.tables is None:
            raise RuntimeError("call reset() before step()")
        if self.done:
            raise EpisodeComplete(f"episode already ran its {self.cfg.horizon} periods")
        cfg, tb, t = self.cfg, self.tables, self.t

        store_req = check_on_grid("store_requests", store_requests, cfg)
        wh_req = check_on_grid("warehouse_request", warehouse_request, cfg)
        caps = check_on_grid("allocation_caps", allocation_caps, cfg)
        if store_req.shape != (cfg.num_stores, cfg.num_products):
            raise ValueError(f"store_requests has shape {store_req.shape}")
        if wh_req.shape != (cfg.num_products,):
            raise ValueError(f"warehouse_request has shape {wh_req.shape}")
        if caps.shape != (cfg.num_stores, cfg.num_products):
            raise ValueError(f"allocation_caps has shape {caps.shape}")

        x_store = tb.on_hand[t, :, STORE, :]
        x_wh = tb.on_hand[t, 0, WAREHOUSE, :]

        demand = tb.demand[t]
        sales = np.minimum(demand, x_store)
        accepted = allocate(store_req, caps, x_wh)
        wh_accepted = wh_req  # the supplier has unlimited capacity

        tb.requested[t, :, STORE, :] = store_req
        tb.requested[t, :, WAREHOUSE, :] = wh_req
        tb.accepted[t, :, STORE, :] = accepted
        tb.accepted[t, :, WAREHOUSE, :] = wh_accepted
        tb.flows[t, :, 0, :] = accepted
        tb.flows[t, :, 1, :] = sales

        store_arrivals = self._store_arrivals(t)
        wh_arrival = self._warehouse_arrival(t)

        next_store = x_store - sales + store_arrivals
        next_wh = x_wh - accepted.sum(axis=0) + wh_arrival
        if (next_store < 0).any() or (next_wh < 0).any():
            raise IntegrityError(f"negative on-hand stock after period {t}")
        next_store = np.minimum(next_store, cfg.store_capacity)
        next_wh = np.minimum(next_wh, cfg.warehouse_capacity)

        next_tr_store = tb.in_transit[t, :, STORE, :] - store_arrivals + accepted
        next_tr_wh = tb.in_transit[t, 0, WAREHOUSE, :] - wh_arrival + wh_accepted
        if (next_tr_store < 0).any() or (next_tr_wh < 0).any():
            raise IntegrityError(f"negative in-transit stock after period {t}")

        tb.on_hand[t + 1, :, STORE, :] = next_store
        tb.on_hand[t + 1, :, WAREHOUSE, :] = next_wh
        tb.in_transit[t + 1, :, STORE, :] = next_tr_store
        tb.in_transit[t + 1, :, WAREHOUSE, :] = next_tr_wh

        outcome = self._rewards(
            t, x_store, x_wh, demand, sales, store_req, accepted, wh_arrival
        )
        tb.shared_reward[t] = outcome.shared_reward
        self.t = t + 1
        return outcome

    def _store_arrivals(self, t: int) -> np.ndarray:
        """Store shipments landing this period: accepted orders from t - lead."""
        cfg, tb = self.cfg, self.tables
        src = t - cfg.store_lead_times
        arrivals = tb.accepted[np.maximum(src, 0), self._store_rows, STORE, :]
        return np.where(src[:, None] >= 0, arrivals, 0)

    def _warehouse_arrival(self, t: int) -> np.ndarray:
        cfg, tb = self.cfg, self.tables
        src = t - cfg.warehouse_lead_time
        if src < 0:
            return np.zeros(cfg.num_products, dtype=np.int64)
        return tb.accepted[src, 0, WAREHOUSE, :]

    def _rewards(
        self,
        t: int,
        x_store: np.ndarray,
        x_wh: np.ndarray,
        demand: np.ndarray,
        sales: np.ndarray,
        store_req: np.ndarray,
        accepted: np.ndarray,
        wh_arrival: np.ndarray,
    ) -> StepOutcome:
        cfg = self.cfg
        n = cfg.num_stores
        theta_u = cfg.unfulfilled_penalty_coeff

        rev = _fold(sales * cfg.selling_price)
        hold = _fold(x_store * cfg.holding_cost[1:])
        short = (demand - sales).sum(axis=1).astype(np.float64)
        local = np.empty(n + 1, dtype=np.float64)
        local[1:] = (rev - hold) - theta_u * short

        proc = float(_fold(wh_arrival * cfg.procurement_cost))
        hold_wh = float(_fold(x_wh * cfg.holding_cost[0]))
        uncovered = float(np.maximum(store_req.sum(axis=0) - x_wh, 0).sum())
        local[0] = -((proc + hold_wh) + theta_u * uncovered)

        shared = math.fsum(local.tolist())

        # Components are recomputed independently of the local split,
        # folding over all store cells and then the warehouse cells.
        revenue = float(_fold((sales * cfg.selling_price).ravel()))
        holding = float(
            _fold(
                np.concatenate(
                    [(x_store * cfg.holding_cost[1:]).ravel(), x_wh * cfg.holding_cost[0]]
                )
            )
        )
        unfulfilled = theta_u * float((demand - sales).sum() + np.maximum(store_req.sum(axis=0) - x_wh, 0).sum())

        return StepOutcome(
            t=t,
            shared_reward=shared,
            local_rewards=local,
            revenue=revenue,
            holding_cost=holding,
            procurement_cost=proc,
            unfulfilled_penalty=unfulfilled,
            demand=demand.copy(),
            sales=sales,
            accepted=accepted,
            warehouse_accepted=self.tables.accepted[t, 0, WAREHOUSE, :].copy(),
            done=t + 1 >= cfg.horizon,
        )
