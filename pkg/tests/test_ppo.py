import numpy as np
import pytest

from echelon.config import PPOConfig
from echelon.rl.agents import AgentTeam
from echelon.rl.nets import MLPPolicy
from echelon.rl.ppo import PPOTrainer

from conftest import make_chain


def tiny_chain(**over):
    d = dict(num_stores=2, num_products=1, horizon=6, demand_mean=6.0)
    d.update(over)
    return make_chain(**d)


def tiny_ppo(**over):
    kw = dict(hidden_sizes=(8, 8), episodes_per_batch=2, minibatch_size=64,
              epochs=2)
    kw.update(over)
    return PPOConfig(**kw)


def make_trainer(seed=0, variant="CMARL", ppo=None, cfg=None):
    cfg = cfg or tiny_chain()
    ppo = ppo or tiny_ppo()
    team = AgentTeam(cfg, variant, ppo, seed=seed)
    return PPOTrainer(cfg, team, ppo, seed=seed), team, cfg


class TestCollect:
    def test_batch_shapes(self):
        trainer, team, cfg = make_trainer()
        batches, stats = trainer.collect(3)
        assert len(stats) == 3
        rows = 3 * cfg.horizon
        for name, net in team.nets.items():
            b = batches[name]
            assert b["obs"].shape == (rows, net.obs_dim)
            assert b["actions"].shape == (rows, net.heads)
            assert b["adv"].shape == (rows,)
            assert b["ret"].shape == (rows,)
        assert trainer.episodes_seen == 3

    def test_identical_seeds_identical_rollouts(self):
        a, _, _ = make_trainer(seed=4)
        b, _, _ = make_trainer(seed=4)
        ba, sa = a.collect(2)
        bb, sb = b.collect(2)
        assert [e.episode_return for e in sa] == [e.episode_return for e in sb]
        for name in ba:
            assert (ba[name]["obs"] == bb[name]["obs"]).all()
            assert (ba[name]["actions"] == bb[name]["actions"]).all()
            assert (ba[name]["adv"] == bb[name]["adv"]).all()

    def test_stats_components_reconcile(self):
        trainer, _, _ = make_trainer(seed=2)
        _, stats = trainer.collect(4)
        for e in stats:
            net = e.revenue - e.holding_cost - e.procurement_cost - e.unfulfilled_penalty
            assert e.episode_return == pytest.approx(net, rel=1e-12, abs=1e-9)
            assert e.stockouts >= 0

    def test_product_shared_batch_has_product_rows(self):
        cfg = tiny_chain(num_products=2)
        trainer, team, _ = make_trainer(variant="ShPol", cfg=cfg)
        batches, _ = trainer.collect(1)
        assert batches["warehouse"]["obs"].shape[0] == cfg.horizon * 2


class TestUpdate:
    def test_ratio_is_one_before_any_step(self):
        """One epoch, one minibatch: the surrogate ratio must be exactly 1,
        so the clipped fraction and the KL estimate are exactly zero."""
        ppo = tiny_ppo(epochs=1, minibatch_size=10_000)
        trainer, team, _ = make_trainer(ppo=ppo)
        stats = trainer.train_batch()
        for agent_stats in stats.agent.values():
            assert agent_stats.approx_kl == 0.0
            assert agent_stats.clip_frac == 0.0
            assert not agent_stats.rolled_back

    def test_update_moves_parameters(self):
        trainer, team, _ = make_trainer(seed=1)
        before = [p.data.copy() for p in team.nets["warehouse"].params]
        trainer.train_batch()
        after = team.nets["warehouse"].params
        assert any((a.data != b).any() for a, b in zip(after, before))

    def test_non_finite_loss_rolls_back(self):
        trainer, team, _ = make_trainer(seed=3)
        net = team.nets["store_0"]
        optim = trainer.optim["store_0"]
        batches, _ = trainer.collect(2)
        batch = batches["store_0"]
        batch["adv"] = np.full_like(batch["adv"], np.inf)
        before = [p.data.copy() for p in net.params]
        t_before = optim.t
        with np.errstate(invalid="ignore"):
            stats = trainer.update_agent(net, optim, batch)
        assert stats.rolled_back
        assert all((p.data == b).all() for p, b in zip(net.params, before))
        assert optim.t == t_before

    def test_rolled_back_update_reports_zero_stats(self):
        trainer, team, _ = make_trainer(seed=3)
        batches, _ = trainer.collect(1)
        batch = batches["store_1"]
        batch["ret"] = np.full_like(batch["ret"], np.nan)
        stats = trainer.update_agent(team.nets["store_1"], trainer.optim["store_1"], batch)
        assert stats.rolled_back
        assert stats.policy_loss == 0.0 and stats.grad_norm == 0.0

    def test_full_batch_is_deterministic(self):
        a, _, _ = make_trainer(seed=6)
        b, _, _ = make_trainer(seed=6)
        sa, sb = a.train_batch(), b.train_batch()
        assert sa.mean_return == sb.mean_return
        for name in sa.agent:
            assert sa.agent[name].policy_loss == sb.agent[name].policy_loss
            assert sa.agent[name].grad_norm == sb.agent[name].grad_norm

    def test_batch_stats_flags(self):
        trainer, _, _ = make_trainer(seed=7)
        stats = trainer.train_batch()
        assert len(stats.episodes) == trainer.ppo.episodes_per_batch
        assert not stats.aborted
        assert np.isfinite(stats.mean_return)


class TestObjective:
    def test_full_loss_gradient_matches_finite_differences(self):
        """Backprop through the entire clipped-surrogate objective."""
        from echelon.rl.autodiff import Tensor, gradient_check, minimum
        from echelon.rl.gae import normalize
        from echelon.rl.autodiff import gather_last, log_softmax

        rng = np.random.default_rng(0)
        net = MLPPolicy(obs_dim=2, heads=1, levels=3, hidden=(4,), seed=0)
        obs = rng.normal(size=(8, 2))
        actions = rng.integers(0, 4, size=(8, 1))
        adv = normalize(rng.normal(size=8))
        ret = rng.normal(size=8)
        logits, _ = net.forward(obs)
        logp_old = net.joint_log_prob(logits, actions).data.copy()

        def build():
            logits, value = net.forward(obs)
            ls = log_softmax(logits)
            logp = gather_last(ls, actions).sum(axis=1)
            ratio = (logp - Tensor(logp_old)).exp()
            adv_t = Tensor(adv)
            surr = minimum(ratio * adv_t, ratio.clip(0.8, 1.2) * adv_t)
            diff = value - Tensor(ret)
            probs = ls.exp()
            entropy = -(probs * ls).sum(axis=(1, 2)).mean()
            return -surr.mean() + 0.5 * (diff * diff).mean() - 0.01 * entropy

        assert gradient_check(build, net.params, eps=1e-5) < 1e-4
