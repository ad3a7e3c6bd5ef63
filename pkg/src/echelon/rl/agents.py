"""Variant wiring: which agents exist, what they observe, which heads they own.

Seven learned configurations share one mechanism:

* CMARL            per-store agents + warehouse agent with allocation heads,
                   everyone trained on the shared reward
* EnWh-LocRwd      same structure, agents trained on their local rewards
* LimWh-ShRwd      warehouse keeps its allocation heads but no longer sees
                   the stores' request history, so its caps are uninformed
* LimWh-LocRwd     limited warehouse + local rewards
* O-CMARL          CMARL whose store agents also see the demand that will
                   arrive with an order placed now
* ShPol            CMARL with one single-product network per agent applied
                   to each product's observation slice
* SARL             one network controls every order head from the
                   concatenated observation; no allocation heads

BSP and RANDOM are the unlearned reference policies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import ChainConfig, PPOConfig
from ..env.actions import levels_to_units
from ..env.core import StepOutcome
from ..env.tables import EpisodeTables
from .nets import MLPPolicy
from .observations import (
    sarl_obs,
    sarl_obs_dim,
    store_obs,
    store_obs_dim,
    warehouse_obs,
    warehouse_obs_dim,
)


@dataclass(frozen=True)
class VariantSpec:
    name: str
    learned: bool = True
    enhanced: bool = True        # warehouse observes the stores' requests
    shared_reward: bool = True
    oracle: bool = False
    product_shared: bool = False
    single_agent: bool = False


_SPECS = {
    "CMARL": VariantSpec("CMARL"),
    "EnWh-LocRwd": VariantSpec("EnWh-LocRwd", shared_reward=False),
    "LimWh-ShRwd": VariantSpec("LimWh-ShRwd", enhanced=False),
    "LimWh-LocRwd": VariantSpec("LimWh-LocRwd", enhanced=False, shared_reward=False),
    "O-CMARL": VariantSpec("O-CMARL", oracle=True),
    "ShPol": VariantSpec("ShPol", product_shared=True),
    "SARL": VariantSpec("SARL", enhanced=False, single_agent=True),
    "BSP": VariantSpec("BSP", learned=False),
    "RANDOM": VariantSpec("RANDOM", learned=False),
}


def variant_spec(name: str) -> VariantSpec:
    try:
        return _SPECS[name]
    except KeyError:
        raise ValueError(f"unknown variant '{name}'") from None


class AgentTeam:
    """All networks for one learned variant, plus the action assembly."""

    def __init__(self, cfg: ChainConfig, variant: str, ppo: PPOConfig, seed: int = 0):
        self.cfg = cfg
        self.spec = variant_spec(variant)
        if not self.spec.learned:
            raise ValueError(f"variant '{variant}' has no trainable agents")
        self.ppo = ppo
        n, k = cfg.num_stores, cfg.num_products
        levels = cfg.action_levels
        hidden = ppo.hidden_sizes

        seeds = np.random.SeedSequence(seed).spawn(n + 1)
        self.nets: dict[str, MLPPolicy] = {}
        if self.spec.single_agent:
            self.nets["policy"] = MLPPolicy(
                sarl_obs_dim(cfg), heads=(n + 1) * k, levels=levels,
                hidden=hidden, seed=seeds[0],
            )
        elif self.spec.product_shared:
            for v in range(n):
                self.nets[f"store_{v}"] = MLPPolicy(
                    store_obs_dim(cfg, v) // k, heads=1, levels=levels,
                    hidden=hidden, seed=seeds[v],
                )
            self.nets["warehouse"] = MLPPolicy(
                warehouse_obs_dim(cfg, enhanced=True) // k, heads=1 + n,
                levels=levels, hidden=hidden, seed=seeds[n],
            )
        else:
            for v in range(n):
                self.nets[f"store_{v}"] = MLPPolicy(
                    store_obs_dim(cfg, v, oracle=self.spec.oracle), heads=k,
                    levels=levels, hidden=hidden, seed=seeds[v],
                )
            self.nets["warehouse"] = MLPPolicy(
                warehouse_obs_dim(cfg, enhanced=self.spec.enhanced),
                heads=k + n * k, levels=levels, hidden=hidden, seed=seeds[n],
            )

    @property
    def agent_names(self) -> list[str]:
        return list(self.nets)

    @property
    def rows_per_step(self) -> int:
        return self.cfg.num_products if self.spec.product_shared else 1

    def obs_rows(self, tables: EpisodeTables, t: int) -> dict[str, np.ndarray]:
        """Per-agent observation batch for period t, shape (rows, obs_dim)."""
        cfg, spec = self.cfg, self.spec
        k = cfg.num_products
        if spec.single_agent:
            return {"policy": sarl_obs(cfg, tables, t)[None, :]}
        out = {}
        if spec.product_shared:
            for v in range(cfg.num_stores):
                full = store_obs(cfg, tables, t, v)
                out[f"store_{v}"] = np.stack([full[kk::k] for kk in range(k)])
            full = warehouse_obs(cfg, tables, t, enhanced=True)
            out["warehouse"] = np.stack([full[kk::k] for kk in range(k)])
        else:
            for v in range(cfg.num_stores):
                out[f"store_{v}"] = store_obs(cfg, tables, t, v, oracle=spec.oracle)[None, :]
            out["warehouse"] = warehouse_obs(cfg, tables, t, enhanced=spec.enhanced)[None, :]
        return out

    def assemble(self, actions: dict[str, np.ndarray]):
        """Map per-agent action levels to environment order quantities.

        `actions[name]` has shape (rows, heads).  Returns the env step
        triple (store_requests, warehouse_request, allocation_caps).
        """
        cfg, spec = self.cfg, self.spec
        n, k = cfg.num_stores, cfg.num_products
        if spec.single_agent:
            row = actions["policy"][0]
            store_levels = row[: n * k].reshape(n, k)
            wh_levels = row[n * k :]
            cap_levels = None
        elif spec.product_shared:
            store_levels = np.stack(
                [actions[f"store_{v}"][:, 0] for v in range(n)]
            )
            wh = actions["warehouse"]            # (K, 1+N)
            wh_levels = wh[:, 0]
            cap_levels = wh[:, 1:].T             # (N, K)
        else:
            store_levels = np.stack(
                [actions[f"store_{v}"][0] for v in range(n)]
            )
            wh_row = actions["warehouse"][0]
            wh_levels = wh_row[:k]
            cap_levels = wh_row[k:].reshape(n, k)

        store_req = levels_to_units(store_levels, cfg)
        wh_req = levels_to_units(wh_levels, cfg)
        if cap_levels is None:
            caps = store_req.copy()
        else:
            caps = levels_to_units(cap_levels, cfg)
        return store_req, wh_req, caps

    def act_sample(self, tables: EpisodeTables, t: int, rng: np.random.Generator):
        """Sample all agents; returns (env action triple, per-agent records)."""
        obs = self.obs_rows(tables, t)
        records = {}
        acts = {}
        for name in self.agent_names:
            a, logp, value = self.nets[name].act(obs[name], rng)
            acts[name] = a
            records[name] = (obs[name], a, value)
        return self.assemble(acts), records

    def act_greedy(self, tables: EpisodeTables, t: int):
        obs = self.obs_rows(tables, t)
        acts = {name: self.nets[name].act_greedy(obs[name]) for name in self.agent_names}
        return self.assemble(acts)

    def reward_for(self, name: str, outcome: StepOutcome) -> float:
        """Training reward stream for one agent (unscaled)."""
        if self.spec.shared_reward or self.spec.single_agent:
            return outcome.shared_reward
        if name == "warehouse":
            return float(outcome.local_rewards[0])
        v = int(name.split("_")[1])
        return float(outcome.local_rewards[v + 1])


class TeamPolicy:
    """Evaluation adapter: greedy team actions behind the policy protocol."""

    def __init__(self, team: AgentTeam):
        self.team = team

    def begin_episode(self, seed: int | None = None) -> None:
        pass

    def act(self, tables: EpisodeTables, t: int):
        return self.team.act_greedy(tables, t)
