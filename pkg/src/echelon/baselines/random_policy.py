"""Uniform-random ordering policy, the floor every learned policy must beat."""

from __future__ import annotations

import numpy as np

from ..config import ChainConfig
from ..env.actions import levels_to_units
from ..env.tables import EpisodeTables


class RandomPolicy:
    """Picks every order level uniformly from {0..n}; allocation caps pass
    the store requests through so rationing handles scarcity."""

    def __init__(self, cfg: ChainConfig, seed: int = 0):
        self.cfg = cfg
        self._rng = np.random.default_rng(seed)

    def begin_episode(self, seed: int | None = None) -> None:
        if seed is not None:
            self._rng = np.random.default_rng(seed)

    def act(self, tables: EpisodeTables, t: int):
        cfg = self.cfg
        store_levels = self._rng.integers(
            0, cfg.action_levels + 1, size=(cfg.num_stores, cfg.num_products)
        )
        wh_levels = self._rng.integers(0, cfg.action_levels + 1, size=cfg.num_products)
        store_req = levels_to_units(store_levels, cfg)
        wh_req = levels_to_units(wh_levels, cfg)
        return store_req, wh_req, store_req.copy()
