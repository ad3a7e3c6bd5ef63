"""Configuration for the supply-chain environment, training, and baselines.

A config file is YAML: chain parameters sit at the top level (field names
mirror :class:`ChainConfig` exactly), with optional ``ppo`` and ``train``
sections for the learning stack.  Scalars broadcast to full array shapes,
flat lists broadcast over stores, nested lists are taken verbatim.  Unknown
keys are a hard error at every level.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from typing import Any

import numpy as np
import yaml

DEFAULT_DEMAND_RANGE = (10.0, 1000.0)

VARIANTS = (
    "CMARL",
    "EnWh-LocRwd",
    "LimWh-ShRwd",
    "LimWh-LocRwd",
    "O-CMARL",
    "ShPol",
    "SARL",
    "BSP",
    "RANDOM",
)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass
class ChainConfig:
    """Full environment parameterization for one warehouse and N stores.

    Array fields are stored dense: ``(N, K)`` arrays index ``[store, product]``;
    ``(N+1, K)`` arrays put the warehouse in row 0 and stores in rows 1..N.
    """

    num_stores: int
    num_products: int
    horizon: int
    store_lead_times: np.ndarray       # (N,) int
    warehouse_lead_time: int
    history_len: int                   # m; warehouse observation history
    store_capacity: np.ndarray         # (N, K) int
    warehouse_capacity: np.ndarray     # (K,) int
    selling_price: np.ndarray          # (N, K) float
    holding_cost: np.ndarray           # (N+1, K) float, row 0 = warehouse
    procurement_cost: np.ndarray       # (K,) float
    unfulfilled_penalty_coeff: float
    demand_mean: np.ndarray            # (N, K) float
    action_levels: int                 # n: order levels are {0, 1, .., n}
    batch_size: int                    # b: units per order level
    initial_inventory: np.ndarray      # (N+1, K) int, row 0 = warehouse

    def __post_init__(self) -> None:
        self.validate()

    @property
    def max_order(self) -> int:
        """Largest order quantity on the action grid, n*b units."""
        return self.action_levels * self.batch_size

    @property
    def max_lead_time(self) -> int:
        return max(int(self.store_lead_times.max()), self.warehouse_lead_time)

    @property
    def demand_in_default_range(self) -> bool:
        lo, hi = DEFAULT_DEMAND_RANGE
        return bool((self.demand_mean >= lo).all() and (self.demand_mean <= hi).all())

    def validate(self) -> None:
        if self.num_stores < 1:
            raise ConfigError("num_stores must be >= 1")
        if self.num_products < 1:
            raise ConfigError("num_products must be >= 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        n, k = self.num_stores, self.num_products
        shapes = {
            "store_lead_times": (self.store_lead_times, (n,)),
            "store_capacity": (self.store_capacity, (n, k)),
            "warehouse_capacity": (self.warehouse_capacity, (k,)),
            "selling_price": (self.selling_price, (n, k)),
            "holding_cost": (self.holding_cost, (n + 1, k)),
            "procurement_cost": (self.procurement_cost, (k,)),
            "demand_mean": (self.demand_mean, (n, k)),
            "initial_inventory": (self.initial_inventory, (n + 1, k)),
        }
        for name, (arr, want) in shapes.items():
            if arr.shape != want:
                raise ConfigError(f"{name} has shape {arr.shape}, expected {want}")
        if (self.store_lead_times < 1).any():
            raise ConfigError("store_lead_times must all be >= 1")
        if self.warehouse_lead_time < 1:
            raise ConfigError("warehouse_lead_time must be >= 1")
        if (self.store_capacity <= 0).any():
            raise ConfigError("store_capacity must be strictly positive")
        if (self.warehouse_capacity <= 0).any():
            raise ConfigError("warehouse_capacity must be strictly positive")
        if (self.selling_price <= 0).any():
            raise ConfigError("selling_price must be strictly positive")
        if (self.holding_cost <= 0).any():
            raise ConfigError("holding_cost must be strictly positive")
        if (self.procurement_cost <= 0).any():
            raise ConfigError("procurement_cost must be strictly positive")
        if self.unfulfilled_penalty_coeff < 0:
            raise ConfigError("unfulfilled_penalty_coeff must be >= 0")
        if (self.demand_mean < 0).any() or not np.isfinite(self.demand_mean).all():
            raise ConfigError("demand_mean must be finite and >= 0")
        if self.action_levels < 0:
            raise ConfigError("action_levels must be >= 0")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if (self.initial_inventory < 0).any():
            raise ConfigError("initial_inventory must be >= 0")
        if self.history_len < 1:
            raise ConfigError("history_len must be >= 1")
        if self.history_len < self.max_lead_time:
            raise ConfigError(
                f"history_len ({self.history_len}) must be >= the maximum lead "
                f"time ({self.max_lead_time}) so delayed orders stay observable"
            )

    def to_resolved(self) -> dict[str, Any]:
        """Plain nested-list dict mirroring the config-file field names."""
        return {
            "num_stores": self.num_stores,
            "num_products": self.num_products,
            "horizon": self.horizon,
            "store_lead_times": self.store_lead_times.tolist(),
            "warehouse_lead_time": self.warehouse_lead_time,
            "history_len": self.history_len,
            "store_capacity": self.store_capacity.tolist(),
            "warehouse_capacity": self.warehouse_capacity.tolist(),
            "selling_price": self.selling_price.tolist(),
            "holding_cost": self.holding_cost.tolist(),
            "procurement_cost": self.procurement_cost.tolist(),
            "unfulfilled_penalty_coeff": float(self.unfulfilled_penalty_coeff),
            "demand_mean": self.demand_mean.tolist(),
            "action_levels": self.action_levels,
            "batch_size": self.batch_size,
            "initial_inventory": self.initial_inventory.tolist(),
        }


@dataclass
class PPOConfig:
    """Hyperparameters for PPO training; defaults follow common practice."""

    gamma: float = 0.99
    lam: float = 0.95
    clip_eps: float = 0.2
    lr: float = 3e-4
    epochs: int = 4
    minibatch_size: int = 64
    value_coeff: float = 0.5
    entropy_coeff: float = 0.01
    max_grad_norm: float = 0.5
    episodes_per_batch: int = 8
    hidden_sizes: tuple[int, ...] = (128, 128)
    reward_scale: float = 0.01

    def __post_init__(self) -> None:
        if isinstance(self.hidden_sizes, list):
            self.hidden_sizes = tuple(int(h) for h in self.hidden_sizes)
        if not (0.0 <= self.gamma <= 1.0):
            raise ConfigError("ppo.gamma must be in [0, 1]")
        if not (0.0 <= self.lam <= 1.0):
            raise ConfigError("ppo.lam must be in [0, 1]")
        if self.clip_eps < 0:
            raise ConfigError("ppo.clip_eps must be >= 0")
        if self.lr <= 0:
            raise ConfigError("ppo.lr must be > 0")
        if self.epochs < 1 or self.minibatch_size < 1 or self.episodes_per_batch < 1:
            raise ConfigError("ppo.epochs, minibatch_size, episodes_per_batch must be >= 1")
        if self.reward_scale <= 0:
            raise ConfigError("ppo.reward_scale must be > 0")

    def to_resolved(self) -> dict[str, Any]:
        return {
            "gamma": self.gamma,
            "lam": self.lam,
            "clip_eps": self.clip_eps,
            "lr": self.lr,
            "epochs": self.epochs,
            "minibatch_size": self.minibatch_size,
            "value_coeff": self.value_coeff,
            "entropy_coeff": self.entropy_coeff,
            "max_grad_norm": self.max_grad_norm,
            "episodes_per_batch": self.episodes_per_batch,
            "hidden_sizes": list(self.hidden_sizes),
            "reward_scale": self.reward_scale,
        }


@dataclass
class RunConfig:
    """Experiment-level knobs: variant, budgets, evaluation cadence."""

    variant: str = "CMARL"
    episodes: int = 5000
    eval_cadence: int = 500
    eval_episodes: int = 20

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(
                f"train.variant '{self.variant}' not one of {', '.join(VARIANTS)}"
            )
        if self.episodes < 1:
            raise ConfigError("train.episodes must be >= 1")
        if self.eval_cadence < 1:
            raise ConfigError("train.eval_cadence must be >= 1")
        if self.episodes < self.eval_cadence:
            raise ConfigError("train.episodes must be >= train.eval_cadence")
        if self.eval_episodes < 1:
            raise ConfigError("train.eval_episodes must be >= 1")

    def to_resolved(self) -> dict[str, Any]:
        return {
            "variant": self.variant,
            "episodes": self.episodes,
            "eval_cadence": self.eval_cadence,
            "eval_episodes": self.eval_episodes,
        }


@dataclass
class ExperimentConfig:
    chain: ChainConfig
    ppo: PPOConfig = field(default_factory=PPOConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def to_resolved(self) -> dict[str, Any]:
        out = self.chain.to_resolved()
        out["ppo"] = self.ppo.to_resolved()
        out["train"] = self.run.to_resolved()
        return out


_CHAIN_KEYS = (
    "num_stores",
    "num_products",
    "horizon",
    "store_lead_times",
    "warehouse_lead_time",
    "history_len",
    "store_capacity",
    "warehouse_capacity",
    "selling_price",
    "holding_cost",
    "procurement_cost",
    "unfulfilled_penalty_coeff",
    "demand_mean",
    "action_levels",
    "batch_size",
    "initial_inventory",
)
_REQUIRED_CHAIN_KEYS = (
    "num_stores",
    "num_products",
    "horizon",
    "store_lead_times",
    "warehouse_lead_time",
    "store_capacity",
    "warehouse_capacity",
    "selling_price",
    "holding_cost",
    "procurement_cost",
    "unfulfilled_penalty_coeff",
    "demand_mean",
    "initial_inventory",
)


def _as_int(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    return value


def _broadcast(name: str, value: Any, shape: tuple[int, ...], dtype: type) -> np.ndarray:
    """Expand a scalar / flat list / nested list to the full field shape."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return np.full(shape, value, dtype=dtype)
    if not isinstance(value, list):
        raise ConfigError(f"{name} must be a number or (nested) list, got {value!r}")
    try:
        arr = np.asarray(value)
    except ValueError:
        raise ConfigError(f"{name} is ragged or non-numeric") from None
    if arr.dtype == object:
        raise ConfigError(f"{name} is ragged or non-numeric")
    if len(shape) == 1:
        if arr.shape != shape:
            raise ConfigError(f"{name} must have {shape[0]} entries, got shape {arr.shape}")
        return arr.astype(dtype)
    # 2-D fields: a flat list of K broadcasts across rows.
    if arr.ndim == 1 and arr.shape[0] == shape[1]:
        return np.tile(arr.astype(dtype), (shape[0], 1))
    if arr.shape == shape:
        return arr.astype(dtype)
    raise ConfigError(
        f"{name} must be a scalar, a list of {shape[1]} per-product values, "
        f"or a nested {shape[0]}x{shape[1]} list; got shape {arr.shape}"
    )


def chain_config_from_dict(raw: dict[str, Any]) -> ChainConfig:
    """Build and validate a ChainConfig from a plain config dict."""
    unknown = set(raw) - set(_CHAIN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key: {sorted(unknown)[0]}")
    missing = [k for k in _REQUIRED_CHAIN_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing config key: {missing[0]}")

    n = _as_int("num_stores", raw["num_stores"])
    k = _as_int("num_products", raw["num_products"])
    if n < 1 or k < 1:
        raise ConfigError("num_stores and num_products must be >= 1")

    lead = _broadcast("store_lead_times", raw["store_lead_times"], (n,), np.int64)
    l_wh = _as_int("warehouse_lead_time", raw["warehouse_lead_time"])
    action_levels = _as_int("action_levels", raw.get("action_levels", 20))

    store_cap = _broadcast("store_capacity", raw["store_capacity"], (n, k), np.int64)
    wh_cap = _broadcast("warehouse_capacity", raw["warehouse_capacity"], (k,), np.int64)

    if "history_len" in raw:
        history_len = _as_int("history_len", raw["history_len"])
    else:
        history_len = max(int(lead.max(initial=1)), l_wh)

    if "batch_size" in raw:
        batch = _as_int("batch_size", raw["batch_size"])
    else:
        # Default grid reach: n*b about twice the largest per-product capacity.
        cap_max = max(int(store_cap.max()), int(wh_cap.max()))
        batch = max(1, round(2 * cap_max / max(action_levels, 1)))

    return ChainConfig(
        num_stores=n,
        num_products=k,
        horizon=_as_int("horizon", raw["horizon"]),
        store_lead_times=lead,
        warehouse_lead_time=l_wh,
        history_len=history_len,
        store_capacity=store_cap,
        warehouse_capacity=wh_cap,
        selling_price=_broadcast("selling_price", raw["selling_price"], (n, k), np.float64),
        holding_cost=_broadcast("holding_cost", raw["holding_cost"], (n + 1, k), np.float64),
        procurement_cost=_broadcast("procurement_cost", raw["procurement_cost"], (k,), np.float64),
        unfulfilled_penalty_coeff=float(raw["unfulfilled_penalty_coeff"]),
        demand_mean=_broadcast("demand_mean", raw["demand_mean"], (n, k), np.float64),
        action_levels=action_levels,
        batch_size=batch,
        initial_inventory=_broadcast("initial_inventory", raw["initial_inventory"], (n + 1, k), np.int64),
    )


def _section_from_dict(cls, section: str, raw: dict[str, Any]):
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config key: {section}.{sorted(unknown)[0]}")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigError(f"bad {section} section: {exc}") from exc


def experiment_config_from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    raw = dict(raw)
    ppo_raw = raw.pop("ppo", {}) or {}
    run_raw = raw.pop("train", {}) or {}
    if not isinstance(ppo_raw, dict):
        raise ConfigError("ppo section must be a mapping")
    if not isinstance(run_raw, dict):
        raise ConfigError("train section must be a mapping")
    return ExperimentConfig(
        chain=chain_config_from_dict(raw),
        ppo=_section_from_dict(PPOConfig, "ppo", ppo_raw),
        run=_section_from_dict(RunConfig, "train", run_raw),
    )


def load_config(path: str) -> ExperimentConfig:
    """Load and validate a YAML config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    if raw is None:
        raise ConfigError(f"config file is empty: {path}")
    return experiment_config_from_dict(raw)


def apply_override(resolved: dict[str, Any], path: str, value_text: str) -> None:
    """Set one dotted-path override on a fully resolved config dict.

    Integer path segments index into lists; every segment must already exist,
    so overrides can only touch known keys.
    """
    try:
        value = yaml.safe_load(value_text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed override value '{value_text}': {exc}") from exc
    parts = path.split(".")
    node: Any = resolved
    for i, part in enumerate(parts[:-1]):
        node = _descend(node, part, path)
        if not isinstance(node, (dict, list)):
            raise ConfigError(f"override path '{path}' descends into a scalar at '{part}'")
    last = parts[-1]
    if isinstance(node, list):
        idx = _list_index(node, last, path)
        node[idx] = value
    elif isinstance(node, dict):
        if last not in node:
            raise ConfigError(f"override names unknown config key: {path}")
        node[last] = value
    else:
        raise ConfigError(f"override path '{path}' does not name a config entry")


def _descend(node: Any, part: str, full_path: str) -> Any:
    if isinstance(node, list):
        return node[_list_index(node, part, full_path)]
    if isinstance(node, dict):
        if part not in node:
            raise ConfigError(f"override names unknown config key: {full_path}")
        return node[part]
    raise ConfigError(f"override path '{full_path}' descends into a scalar at '{part}'")


def _list_index(node: list, part: str, full_path: str) -> int:
    try:
        idx = int(part)
    except ValueError:
        raise ConfigError(f"override path '{full_path}': '{part}' is not a list index") from None
    if not (0 <= idx < len(node)):
        raise ConfigError(f"override path '{full_path}': index {idx} out of range")
    return idx


def resolve_with_overrides(path: str, overrides: list[str]) -> ExperimentConfig:
    """Load a config file, apply ``key=value`` overrides, re-validate."""
    cfg = load_config(path)
    if not overrides:
        return cfg
    resolved = cfg.to_resolved()
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' must look like key=value")
        key, _, value = item.partition("=")
        apply_override(resolved, key.strip(), value)
    return experiment_config_from_dict(resolved)


def config_hash(chain: ChainConfig) -> str:
    """Stable short hash of the resolved chain config, for checkpoint manifests."""
    blob = json.dumps(chain.to_resolved(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def dump_resolved(cfg: ExperimentConfig) -> str:
    """Deterministic YAML echo of the effective config (for spec.resolved)."""
    return yaml.safe_dump(cfg.to_resolved(), sort_keys=True, default_flow_style=None)
