"""Observation vectors for the learning agents.

All features are capacity-normalized floats laid out feature-major with the
product index minor, i.e. a length-K block per feature.  Slicing ``obs[k::K]``
therefore yields the single-product view of the same observation, which is
what the product-shared policies consume.

Store agents see their on-hand stock and the trailing window of accepted
replenishments (their own order pipeline).  The enhanced warehouse agent
additionally sees every store's requested orders over the window; the
limited warehouse agent sees only its own pipeline.  Entries before the
first period read as zero.  The oracle variant appends the demand that will
arrive when an order placed now would land, read from the pre-drawn demand
table (zero past the horizon).
"""

from __future__ import annotations

import numpy as np

from ..config import ChainConfig
from ..env.tables import STORE, WAREHOUSE, EpisodeTables


def store_obs_dim(cfg: ChainConfig, v: int, oracle: bool = False) -> int:
    k = cfg.num_products
    return k * (1 + int(cfg.store_lead_times[v])) + (k if oracle else 0)


def warehouse_obs_dim(cfg: ChainConfig, enhanced: bool) -> int:
    k, m = cfg.num_products, cfg.history_len
    return k * (1 + m + (cfg.num_stores * m if enhanced else 0))


def sarl_obs_dim(cfg: ChainConfig) -> int:
    return sum(store_obs_dim(cfg, v) for v in range(cfg.num_stores)) + warehouse_obs_dim(
        cfg, enhanced=False
    )


def store_obs(
    cfg: ChainConfig, tables: EpisodeTables, t: int, v: int, oracle: bool = False
) -> np.ndarray:
    cap = cfg.store_capacity[v].astype(np.float64)
    lead = int(cfg.store_lead_times[v])
    feats = [tables.on_hand[t, v, STORE, :] / cap]
    for i in range(1, lead + 1):
        if t - i >= 0:
            feats.append(tables.accepted[t - i, v, STORE, :] / cap)
        else:
            feats.append(np.zeros(cfg.num_products))
    if oracle:
        arrive = t + lead
        if arrive < cfg.horizon:
            feats.append(tables.demand[arrive, v, :] / cap)
        else:
            feats.append(np.zeros(cfg.num_products))
    return np.concatenate(feats)


def warehouse_obs(
    cfg: ChainConfig, tables: EpisodeTables, t: int, enhanced: bool
) -> np.ndarray:
    cap = cfg.warehouse_capacity.astype(np.float64)
    m = cfg.history_len
    zeros = np.zeros(cfg.num_products)
    feats = [tables.on_hand[t, 0, WAREHOUSE, :] / cap]
    for i in range(1, m + 1):
        if t - i >= 0:
            feats.append(tables.accepted[t - i, 0, WAREHOUSE, :] / cap)
        else:
            feats.append(zeros)
    if enhanced:
        for v in range(cfg.num_stores):
            for i in range(1, m + 1):
                if t - i >= 0:
                    feats.append(tables.requested[t - i, v, STORE, :] / cap)
                else:
                    feats.append(zeros)
    return np.concatenate(feats)


def sarl_obs(cfg: ChainConfig, tables: EpisodeTables, t: int) -> np.ndarray:
    parts = [store_obs(cfg, tables, t, v) for v in range(cfg.num_stores)]
    parts.append(warehouse_obs(cfg, tables, t, enhanced=False))
    return np.concatenate(parts)
