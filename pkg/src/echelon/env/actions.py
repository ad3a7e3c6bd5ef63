"""Order-quantity grid shared by all policies.

Agents pick one of n+1 discrete levels per product; level ``a`` means a
replenishment request of ``a * b`` units.  The environment accepts only
quantities that sit exactly on this grid.
"""

from __future__ import annotations

import numpy as np

from ..config import ChainConfig


def levels_to_units(levels: np.ndarray, cfg: ChainConfig) -> np.ndarray:
    """Map discrete action levels {0..n} to order quantities in units."""
    levels = np.asarray(levels, dtype=np.int64)
    if (levels < 0).any() or (levels > cfg.action_levels).any():
        raise ValueError(
            f"action level out of range 0..{cfg.action_levels}: "
            f"min={levels.min()}, max={levels.max()}"
        )
    return levels * cfg.batch_size


def quantize_units(quantity: np.ndarray, cfg: ChainConfig) -> np.ndarray:
    """Snap continuous order quantities onto the grid (half-up, then clip)."""
    levels = np.floor(np.asarray(quantity, dtype=np.float64) / cfg.batch_size + 0.5)
    levels = np.clip(levels, 0, cfg.action_levels).astype(np.int64)
    return levels * cfg.batch_size


def check_on_grid(name: str, units: np.ndarray, cfg: ChainConfig) -> np.ndarray:
    """Validate order quantities in units; returns them as int64."""
    arr = np.asarray(units)
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"{name} must be integer units, got dtype {arr.dtype}")
    arr = arr.astype(np.int64)
    if (arr < 0).any():
        raise ValueError(f"{name} contains negative quantities")
    if (arr > cfg.max_order).any():
        raise ValueError(f"{name} exceeds the maximum order {cfg.max_order}")
    if (arr % cfg.batch_size != 0).any():
        raise ValueError(f"{name} must be multiples of the batch size {cfg.batch_size}")
    return arr
