"""Clipped-surrogate PPO over the per-agent networks.

Rollouts sample every agent once per period; updates run per agent on the
flattened batch.  The old-policy log-probabilities are recomputed in one
pass right before the first epoch, on exactly the minibatch slices the
first epoch will use, so the importance ratio of the very first minibatch
is exactly one before any optimizer step.  A non-finite loss rolls the
agent's parameters and optimizer state back to their pre-update snapshot
and abandons that update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..config import ChainConfig, PPOConfig
from ..env.core import InventoryEnv, StepOutcome
from ..env.tables import STORE, EpisodeTables
from .agents import AgentTeam
from .autodiff import Adam, Tensor, clip_global_norm, gather_last, log_softmax, minimum
from .gae import gae_advantages, normalize
from .nets import MLPPolicy


@dataclass
class EpisodeStats:
    """Per-episode log row: total return, reward components, stock-outs."""

    seed: int
    episode_return: float
    revenue: float
    holding_cost: float
    procurement_cost: float
    unfulfilled_penalty: float
    stockouts: int


def episode_stats(cfg: ChainConfig, seed: int, tables: EpisodeTables,
                  outcomes: list[StepOutcome]) -> EpisodeStats:
    on_hand = tables.on_hand[: cfg.horizon, :, STORE, :]
    starved = ((on_hand == 0) & (tables.demand > 0)).any(axis=2)
    return EpisodeStats(
        seed=seed,
        episode_return=math.fsum(tables.shared_reward.tolist()),
        revenue=math.fsum(o.revenue for o in outcomes),
        holding_cost=math.fsum(o.holding_cost for o in outcomes),
        procurement_cost=math.fsum(o.procurement_cost for o in outcomes),
        unfulfilled_penalty=math.fsum(o.unfulfilled_penalty for o in outcomes),
        stockouts=int(starved.sum()),
    )


@dataclass
class UpdateStats:
    policy_loss: float = 0.0
    value_loss: float = 0.0
    entropy: float = 0.0
    approx_kl: float = 0.0
    grad_norm: float = 0.0
    clip_frac: float = 0.0
    rolled_back: bool = False


@dataclass
class BatchStats:
    episodes: list[EpisodeStats]
    agent: dict[str, UpdateStats] = field(default_factory=dict)

    @property
    def mean_return(self) -> float:
        return math.fsum(e.episode_return for e in self.episodes) / len(self.episodes)

    @property
    def aborted(self) -> bool:
        return any(a.rolled_back for a in self.agent.values())


class PPOTrainer:
    def __init__(self, cfg: ChainConfig, team: AgentTeam, ppo: PPOConfig, seed: int = 0):
        self.cfg = cfg
        self.team = team
        self.ppo = ppo
        self.env = InventoryEnv(cfg)
        self.optim = {
            name: Adam(net.params, lr=ppo.lr) for name, net in team.nets.items()
        }
        act_ss, shuffle_ss, env_ss = np.random.SeedSequence(seed).spawn(3)
        self.act_rng = np.random.default_rng(act_ss)
        self.shuffle_rng = np.random.default_rng(shuffle_ss)
        self.env_seed_rng = np.random.default_rng(env_ss)
        self.episodes_seen = 0

    # -- rollouts -------------------------------------------------------------

    def collect(self, episodes: int):
        """Run sampled episodes; returns (per-agent batch, per-episode stats)."""
        team, ppo = self.team, self.ppo
        names = team.agent_names
        rows = team.rows_per_step
        batches = {
            name: {"obs": [], "actions": [], "adv": [], "ret": []} for name in names
        }
        stats: list[EpisodeStats] = []
        for _ in range(episodes):
            seed = int(self.env_seed_rng.integers(0, 2**31))
            tables = self.env.reset(seed)
            obs_ep = {name: [] for name in names}
            act_ep = {name: [] for name in names}
            val_ep = {name: [] for name in names}
            rew_ep = {name: [] for name in names}
            outcomes = []
            while not self.env.done:
                (store_req, wh_req, caps), records = team.act_sample(
                    tables, self.env.t, self.act_rng
                )
                outcome = self.env.step(store_req, wh_req, caps)
                outcomes.append(outcome)
                for name in names:
                    obs, actions, values = records[name]
                    obs_ep[name].append(obs)
                    act_ep[name].append(actions)
                    val_ep[name].append(values)
                    rew_ep[name].append(
                        team.reward_for(name, outcome) * ppo.reward_scale
                    )
            stats.append(episode_stats(self.cfg, seed, tables, outcomes))
            for name in names:
                values = np.stack(val_ep[name])        # (T, rows)
                rewards = np.asarray(rew_ep[name])     # (T,)
                adv = np.empty_like(values)
                ret = np.empty_like(values)
                for r in range(rows):
                    adv[:, r], ret[:, r] = gae_advantages(
                        rewards, values[:, r], ppo.gamma, ppo.lam
                    )
                batches[name]["obs"].append(np.concatenate(obs_ep[name]))
                batches[name]["actions"].append(np.concatenate(act_ep[name]))
                batches[name]["adv"].append(adv.reshape(-1))
                batches[name]["ret"].append(ret.reshape(-1))
        self.episodes_seen += episodes
        out = {}
        for name in names:
            out[name] = {
                "obs": np.concatenate(batches[name]["obs"]),
                "actions": np.concatenate(batches[name]["actions"]),
                "adv": np.concatenate(batches[name]["adv"]),
                "ret": np.concatenate(batches[name]["ret"]),
            }
        return out, stats

    # -- updates --------------------------------------------------------------

    def update_agent(self, net: MLPPolicy, optim: Adam, batch: dict) -> UpdateStats:
        ppo = self.ppo
        obs, actions = batch["obs"], batch["actions"]
        adv = normalize(batch["adv"])
        ret = batch["ret"]
        size = obs.shape[0]
        mb = min(ppo.minibatch_size, size)

        perms = [self.shuffle_rng.permutation(size) for _ in range(ppo.epochs)]
        chunks0 = [perms[0][i : i + mb] for i in range(0, size, mb)]

        # Old-policy log-probs, computed on the exact epoch-0 slices before
        # any parameter changes.
        logp_old = np.empty(size)
        for idx in chunks0:
            logits, _ = net.forward(obs[idx])
            logp_old[idx] = net.joint_log_prob(logits, actions[idx]).data

        snap = optim.snapshot()
        stats = UpdateStats()
        steps = 0
        for epoch in range(ppo.epochs):
            chunks = (
                chunks0
                if epoch == 0
                else [perms[epoch][i : i + mb] for i in range(0, size, mb)]
            )
            for idx in chunks:
                logits, value = net.forward(obs[idx])
                ls = log_softmax(logits)
                logp = gather_last(ls, actions[idx]).sum(axis=1)
                ratio = (logp - Tensor(logp_old[idx])).exp()
                adv_t = Tensor(adv[idx])
                surr = minimum(
                    ratio * adv_t,
                    ratio.clip(1 - ppo.clip_eps, 1 + ppo.clip_eps) * adv_t,
                )
                policy_loss = -surr.mean()
                diff = value - Tensor(ret[idx])
                value_loss = (diff * diff).mean()
                probs = ls.exp()
                entropy = -(probs * ls).sum(axis=(1, 2)).mean()
                loss = policy_loss + ppo.value_coeff * value_loss - ppo.entropy_coeff * entropy
                if not np.isfinite(loss.data):
                    optim.restore(snap)
                    return UpdateStats(rolled_back=True)
                loss.backward()
                norm = clip_global_norm(net.params, ppo.max_grad_norm)
                optim.step()

                steps += 1
                stats.policy_loss += float(policy_loss.data)
                stats.value_loss += float(value_loss.data)
                stats.entropy += float(entropy.data)
                stats.approx_kl += float((logp_old[idx] - logp.data).mean())
                stats.grad_norm += norm
                stats.clip_frac += float(
                    (np.abs(ratio.data - 1.0) > ppo.clip_eps).mean()
                )
        for name in ("policy_loss", "value_loss", "entropy", "approx_kl", "grad_norm", "clip_frac"):
            setattr(stats, name, getattr(stats, name) / max(steps, 1))
        return stats

    def train_batch(self) -> BatchStats:
        """One collect-and-update cycle over episodes_per_batch episodes."""
        batches, stats = self.collect(self.ppo.episodes_per_batch)
        out = BatchStats(episodes=stats)
        for name in self.team.agent_names:
            out.agent[name] = self.update_agent(
                self.team.nets[name], self.optim[name], batches[name]
            )
        return out
