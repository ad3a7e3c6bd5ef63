from .base_stock import (
    BaseStockFit,
    BaseStockPolicy,
    base_stock_actions,
    default_z0,
    episode_return,
    optimize_base_stock,
)
from .powell import PowellResult, minimize_powell
from .random_policy import RandomPolicy

__all__ = [
    "BaseStockFit",
    "BaseStockPolicy",
    "base_stock_actions",
    "default_z0",
    "episode_return",
    "optimize_base_stock",
    "PowellResult",
    "minimize_powell",
    "RandomPolicy",
]
