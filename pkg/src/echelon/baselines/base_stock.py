"""Base-stock (order-up-to) policy and its simulation-based tuning.

Each vertex orders up to a target level z whenever its inventory position
falls below it.  Positions are echelon positions: a store counts its own
on-hand and in-transit stock minus its cumulative unmet demand; the
warehouse additionally counts everything downstream, minus the store
requests it has had to turn down.  Orders are snapped to the environment's
discrete grid.

Targets are tuned by direct search (Powell) on the mean episode return over
a fixed set of demand seeds, so every candidate z faces the same demand
sample paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..config import ChainConfig
from ..env.actions import quantize_units
from ..env.core import InventoryEnv
from ..env.tables import STORE, WAREHOUSE, EpisodeTables
from .powell import PowellResult, minimize_powell


def default_z0(cfg: ChainConfig) -> np.ndarray:
    """Mean lead-time demand plus one review period, per vertex and product."""
    z = np.zeros((cfg.num_stores + 1, cfg.num_products))
    z[1:] = cfg.demand_mean * (cfg.store_lead_times[:, None] + 1)
    z[0] = cfg.demand_mean.sum(axis=0) * (cfg.warehouse_lead_time + 1)
    return z


def base_stock_actions(
    cfg: ChainConfig, tables: EpisodeTables, t: int, z: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orders for period t under targets z, shape (N+1, K) with row 0 the
    warehouse.  Allocation caps pass the store requests through unchanged,
    so rationing alone resolves any shortfall."""
    x_store = tables.on_hand[t, :, STORE, :]
    tr_store = tables.in_transit[t, :, STORE, :]
    unmet_demand = (tables.demand[:t] - tables.flows[:t, :, 1, :]).sum(axis=0)
    pos_store = x_store + tr_store - unmet_demand
    store_req = quantize_units(np.maximum(z[1:] - pos_store, 0.0), cfg)

    x_wh = tables.on_hand[t, 0, WAREHOUSE, :]
    tr_wh = tables.in_transit[t, 0, WAREHOUSE, :]
    refused = (
        tables.requested[:t, :, STORE, :] - tables.accepted[:t, :, STORE, :]
    ).sum(axis=(0, 1))
    pos_wh = x_wh + tr_wh + (x_store + tr_store).sum(axis=0) - refused
    wh_req = quantize_units(np.maximum(z[0] - pos_wh, 0.0), cfg)

    return store_req, wh_req, store_req.copy()


class BaseStockPolicy:
    """Stateless policy object wrapping a target array z of shape (N+1, K)."""

    def __init__(self, cfg: ChainConfig, z: np.ndarray):
        self.cfg = cfg
        self.z = np.asarray(z, dtype=np.float64)
        if self.z.shape != (cfg.num_stores + 1, cfg.num_products):
            raise ValueError(
                f"z has shape {self.z.shape}, expected "
                f"{(cfg.num_stores + 1, cfg.num_products)}"
            )

    def begin_episode(self, seed: int | None = None) -> None:
        pass

    def act(self, tables: EpisodeTables, t: int):
        return base_stock_actions(self.cfg, tables, t, self.z)


def episode_return(cfg: ChainConfig, policy, seed: int) -> float:
    """Total shared reward of one episode under `policy`."""
    env = InventoryEnv(cfg)
    tables = env.reset(seed)
    policy.begin_episode(seed)
    while not env.done:
        store_req, wh_req, caps = policy.act(tables, env.t)
        env.step(store_req, wh_req, caps)
    return math.fsum(tables.shared_reward.tolist())


@dataclass
class BaseStockFit:
    z: np.ndarray            # (N+1, K) tuned targets
    mean_return: float       # mean episode return at z over the tuning seeds
    search: PowellResult
    cached_evals: int        # objective calls answered from the memo table


def optimize_base_stock(
    cfg: ChainConfig,
    seeds: Sequence[int],
    z0: np.ndarray | None = None,
    ftol: float = 1e-6,
    max_sweeps: int = 200,
) -> BaseStockFit:
    """Tune base-stock targets by Powell search under common random numbers.

    The objective is the negative mean episode return over `seeds`.  With a
    unit batch size the policy only sees z through round(z), so candidates
    are snapped to integers first and repeated points are served from a
    memo table; with larger batch sizes rounding would change the policy,
    so both the snap and the memo are disabled.
    """
    if not seeds:
        raise ValueError("optimize_base_stock needs at least one seed")
    shape = (cfg.num_stores + 1, cfg.num_products)
    z0 = default_z0(cfg) if z0 is None else np.asarray(z0, dtype=np.float64)
    if z0.shape != shape:
        raise ValueError(f"z0 has shape {z0.shape}, expected {shape}")

    snap = cfg.batch_size == 1
    memo: dict[tuple, float] = {}
    hits = 0

    def objective(flat: np.ndarray) -> float:
        nonlocal hits
        z = flat.reshape(shape)
        if snap:
            z = np.floor(z + 0.5)
            key = tuple(int(v) for v in z.ravel())
            if key in memo:
                hits += 1
                return memo[key]
        policy = BaseStockPolicy(cfg, z)
        total = math.fsum(episode_return(cfg, policy, s) for s in seeds)
        val = -total / len(seeds)
        if snap:
            memo[key] = val
        return val

    result = minimize_powell(
        objective,
        z0.ravel(),
        ftol=ftol,
        max_sweeps=max_sweeps,
        project=lambda x: np.maximum(x, 0.0),
    )
    z_best = result.x.reshape(shape)
    if snap:
        z_best = np.floor(z_best + 0.5)
    return BaseStockFit(
        z=z_best, mean_return=-result.fun, search=result, cached_evals=hits
    )
