"""Two-echelon inventory control: simulator, PPO agents, and baselines."""

from .config import (
    ChainConfig,
    ConfigError,
    ExperimentConfig,
    PPOConfig,
    RunConfig,
    config_hash,
    load_config,
    resolve_with_overrides,
)

__version__ = "0.1.0"

__all__ = [
    "ChainConfig",
    "ConfigError",
    "ExperimentConfig",
    "PPOConfig",
    "RunConfig",
    "config_hash",
    "load_config",
    "resolve_with_overrides",
    "__version__",
]
