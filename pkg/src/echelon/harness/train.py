"""Experiment driver: run a variant, log metrics, save checkpoints.

The output directory receives:

* ``spec.resolved``          effective config after defaults and overrides
* ``metrics.csv``            one row per completed training episode
                             (seed-deterministic, byte-stable across reruns)
* ``eval.csv``               greedy evaluation on fixed seeds every cadence,
                             plus update statistics
* ``timing.csv``             wall-clock sidecar, one row per cadence
* ``checkpoint_best.bin``    parameters at the best rolling-mean return
* ``checkpoint_final.bin``   parameters at the end of training

RANDOM and BSP run through the same driver as logging-only controls: same
metrics files, no updates and no checkpoints.  Three consecutive aborted
updates (non-finite losses) halt the run.
"""

from __future__ import annotations

import math
import os
import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..baselines.base_stock import BaseStockPolicy, default_z0
from ..baselines.random_policy import RandomPolicy
from ..config import ExperimentConfig, config_hash, dump_resolved
from ..env.core import InventoryEnv
from ..rl.agents import AgentTeam, TeamPolicy, variant_spec
from ..rl.checkpoint import save_checkpoint
from ..rl.ppo import BatchStats, EpisodeStats, PPOTrainer, episode_stats
from .evaluate import evaluate_policy
from .metrics import EVAL_COLUMNS, METRIC_COLUMNS, TIMING_COLUMNS, CsvLog

MAX_CONSECUTIVE_ABORTS = 3
ROLLING_WINDOW = 100


@dataclass
class TrainResult:
    variant: str
    episodes: int
    final_rolling_mean: float
    best_rolling_mean: float
    eval_mean_return: float
    eval_stockout_rate: float
    out_dir: str


def eval_seed_list(seed: int, count: int) -> list[int]:
    """Fixed evaluation seeds, independent of the training streams."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    return [int(s) for s in rng.integers(0, 2**31, size=count)]


def _mean_update_stats(stats: BatchStats) -> dict:
    agents = list(stats.agent.values())
    count = max(len(agents), 1)
    mean = lambda name: math.fsum(getattr(a, name) for a in agents) / count
    return {
        "policy_loss": mean("policy_loss"),
        "value_loss": mean("value_loss"),
        "entropy": mean("entropy"),
        "approx_kl": mean("approx_kl"),
        "grad_norm": mean("grad_norm"),
        "clip_frac": mean("clip_frac"),
        "rolled_back": any(a.rolled_back for a in agents),
    }


class _PolicyRollouts:
    """Episode collector for the unlearned control variants."""

    def __init__(self, cfg, policy, seed: int):
        self.cfg = cfg
        self.policy = policy
        self.env = InventoryEnv(cfg)
        env_ss, pol_ss = np.random.SeedSequence([seed, 3]).spawn(2)
        self.env_seed_rng = np.random.default_rng(env_ss)
        self.policy_seed_rng = np.random.default_rng(pol_ss)
        self.episodes_seen = 0

    def run_batch(self, episodes: int) -> list[EpisodeStats]:
        stats = []
        for _ in range(episodes):
            seed = int(self.env_seed_rng.integers(0, 2**31))
            tables = self.env.reset(seed)
            self.policy.begin_episode(int(self.policy_seed_rng.integers(0, 2**31)))
            outcomes = []
            while not self.env.done:
                store_req, wh_req, caps = self.policy.act(tables, self.env.t)
                outcomes.append(self.env.step(store_req, wh_req, caps))
            stats.append(episode_stats(self.cfg, seed, tables, outcomes))
        self.episodes_seen += episodes
        return stats


def run_experiment(
    exp: ExperimentConfig, seed: int, out_dir: str, progress=None
) -> TrainResult:
    cfg, run = exp.chain, exp.run
    spec = variant_spec(run.variant)
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "spec.resolved"), "w", encoding="utf-8") as fh:
        fh.write(dump_resolved(exp))

    if spec.learned:
        team = AgentTeam(cfg, run.variant, exp.ppo, seed)
        trainer = PPOTrainer(cfg, team, exp.ppo, seed)
        eval_policy = TeamPolicy(team)
        collector = None
    else:
        team = trainer = None
        policy = (
            RandomPolicy(cfg, seed)
            if run.variant == "RANDOM"
            else BaseStockPolicy(cfg, default_z0(cfg))
        )
        collector = _PolicyRollouts(cfg, policy, seed)
        eval_policy = policy

    eval_seeds = eval_seed_list(seed, run.eval_episodes)
    window: deque[float] = deque(maxlen=ROLLING_WINDOW)
    rolling = lambda: math.fsum(window) / len(window)
    best_rolling = -math.inf
    episode_no = 0
    consecutive_aborts = 0
    last_eval = None

    start = time.perf_counter()
    with open(os.path.join(out_dir, "metrics.csv"), "w", encoding="utf-8", newline="") as mfh, open(
        os.path.join(out_dir, "eval.csv"), "w", encoding="utf-8", newline=""
    ) as efh, open(
        os.path.join(out_dir, "timing.csv"), "w", encoding="utf-8", newline=""
    ) as tfh:
        metrics = CsvLog(mfh, METRIC_COLUMNS)
        eval_log = CsvLog(efh, EVAL_COLUMNS)
        timing = CsvLog(tfh, TIMING_COLUMNS)
        next_eval = run.eval_cadence

        while episode_no < run.episodes:
            if spec.learned:
                batch = trainer.train_batch()
                episode_rows = batch.episodes
                update_stats = _mean_update_stats(batch)
                if batch.aborted:
                    consecutive_aborts += 1
                    if consecutive_aborts >= MAX_CONSECUTIVE_ABORTS:
                        raise RuntimeError(
                            f"training halted: {consecutive_aborts} consecutive "
                            f"aborted updates (non-finite losses) at episode {episode_no}"
                        )
                else:
                    consecutive_aborts = 0
            else:
                episode_rows = collector.run_batch(exp.ppo.episodes_per_batch)
                update_stats = {c: 0.0 for c in EVAL_COLUMNS[4:-1]}
                update_stats["rolled_back"] = False

            for row in episode_rows:
                episode_no += 1
                window.append(row.episode_return)
                metrics.row(
                    episode=episode_no,
                    episode_return=row.episode_return,
                    rolling_mean_100=rolling(),
                    revenue=row.revenue,
                    holding_cost=row.holding_cost,
                    procurement_cost=row.procurement_cost,
                    unfulfilled_penalty=row.unfulfilled_penalty,
                    stockouts=row.stockouts,
                )

            if rolling() > best_rolling:
                best_rolling = rolling()
                if spec.learned:
                    save_checkpoint(
                        os.path.join(out_dir, "checkpoint_best.bin"),
                        run.variant, config_hash(cfg), team.nets,
                    )

            if episode_no >= next_eval or episode_no >= run.episodes:
                report = evaluate_policy(cfg, eval_policy, eval_seeds)
                last_eval = report
                eval_log.row(
                    episodes=episode_no,
                    eval_mean_return=report.mean_return,
                    eval_return_std=report.std_return,
                    eval_stockout_rate=report.mean_stockout_rate,
                    **update_stats,
                )
                timing.row(episodes=episode_no, wall_seconds=time.perf_counter() - start)
                next_eval = episode_no - episode_no % run.eval_cadence + run.eval_cadence
                if progress is not None:
                    progress(episode_no, report.mean_return)

    if spec.learned:
        save_checkpoint(
            os.path.join(out_dir, "checkpoint_final.bin"),
            run.variant, config_hash(cfg), team.nets,
        )
    return TrainResult(
        variant=run.variant,
        episodes=episode_no,
        final_rolling_mean=rolling(),
        best_rolling_mean=best_rolling,
        eval_mean_return=last_eval.mean_return,
        eval_stockout_rate=last_eval.mean_stockout_rate,
        out_dir=out_dir,
    )
