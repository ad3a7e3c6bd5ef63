"""Dense episode tables for the two-echelon chain.

Every stock-tracking table has shape ``(T+1, N, 2, K)``: axis 1 is the store
index, axis 2 selects the echelon column (0 = warehouse, 1 = store), axis 3
the product.  Warehouse quantities are replicated across all N rows of
column 0, so any row gives the full chain view for one store without an
extra gather.  Flow tables (demand, sales, rewards) have T entries, one per
executed period.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import ChainConfig

WAREHOUSE = 0
STORE = 1


@dataclass
class EpisodeTables:
    """Complete record of one episode.

    on_hand / in_transit / requested / accepted: (T+1, N, 2, K) int64.
    demand: (T, N, K) int64.
    flows: (T, N, 2, K) int64, column 0 = accepted store replenishment,
    column 1 = realized sales.
    shared_reward: (T,) float64.
    """

    on_hand: np.ndarray
    in_transit: np.ndarray
    requested: np.ndarray
    accepted: np.ndarray
    demand: np.ndarray
    flows: np.ndarray
    shared_reward: np.ndarray

    @classmethod
    def zeros(cls, cfg: ChainConfig) -> "EpisodeTables":
        t, n, k = cfg.horizon, cfg.num_stores, cfg.num_products
        stock = lambda: np.zeros((t + 1, n, 2, k), dtype=np.int64)
        return cls(
            on_hand=stock(),
            in_transit=stock(),
            requested=stock(),
            accepted=stock(),
            demand=np.zeros((t, n, k), dtype=np.int64),
            flows=np.zeros((t, n, 2, k), dtype=np.int64),
            shared_reward=np.zeros(t, dtype=np.float64),
        )

    def warehouse_rows_replicated(self) -> bool:
        """True iff column 0 of every stock table is constant across stores."""
        for table in (self.on_hand, self.in_transit, self.requested, self.accepted):
            col = table[:, :, WAREHOUSE, :]
            if not (col == col[:, :1, :]).all():
                return False
        return True
