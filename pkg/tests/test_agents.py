import numpy as np
import pytest

from echelon.config import PPOConfig
from echelon.env import InventoryEnv
from echelon.rl.agents import AgentTeam, TeamPolicy, variant_spec
from echelon.rl.observations import (
    sarl_obs_dim,
    store_obs_dim,
    warehouse_obs_dim,
)

from conftest import make_chain, random_actions

ALL_LEARNED = (
    "CMARL", "EnWh-LocRwd", "LimWh-ShRwd", "LimWh-LocRwd", "O-CMARL", "ShPol", "SARL",
)


def team_for(variant, cfg=None, seed=0):
    cfg = cfg or make_chain(num_products=2, demand_mean=6.0)
    return AgentTeam(cfg, variant, PPOConfig(hidden_sizes=(8, 8)), seed=seed), cfg


class TestWiring:
    @pytest.mark.parametrize("variant", ("CMARL", "EnWh-LocRwd", "O-CMARL"))
    def test_full_view_warehouse(self, variant):
        team, cfg = team_for(variant)
        net = team.nets["warehouse"]
        assert net.obs_dim == warehouse_obs_dim(cfg, enhanced=True)
        assert net.heads == cfg.num_products * (1 + cfg.num_stores)

    @pytest.mark.parametrize("variant", ("LimWh-ShRwd", "LimWh-LocRwd"))
    def test_limited_warehouse_keeps_allocation_heads(self, variant):
        """The restricted view removes only the request block from the
        observation; the warehouse still proposes every allocation."""
        team, cfg = team_for(variant)
        net = team.nets["warehouse"]
        assert net.obs_dim == warehouse_obs_dim(cfg, enhanced=False)
        assert net.heads == cfg.num_products * (1 + cfg.num_stores)

    def test_store_heads_one_per_product(self):
        team, cfg = team_for("CMARL")
        for v in range(cfg.num_stores):
            net = team.nets[f"store_{v}"]
            assert net.obs_dim == store_obs_dim(cfg, v)
            assert net.heads == cfg.num_products

    def test_oracle_widens_store_inputs_only(self):
        plain, cfg = team_for("CMARL")
        oracle, _ = team_for("O-CMARL")
        for v in range(cfg.num_stores):
            assert (
                oracle.nets[f"store_{v}"].obs_dim
                == plain.nets[f"store_{v}"].obs_dim + cfg.num_products
            )
        assert oracle.nets["warehouse"].obs_dim == plain.nets["warehouse"].obs_dim

    def test_single_agent_owns_every_order_head(self):
        team, cfg = team_for("SARL")
        assert list(team.nets) == ["policy"]
        net = team.nets["policy"]
        assert net.obs_dim == sarl_obs_dim(cfg)
        assert net.heads == (cfg.num_stores + 1) * cfg.num_products

    def test_product_shared_nets_are_single_product(self):
        team, cfg = team_for("ShPol")
        assert team.rows_per_step == cfg.num_products
        assert team.nets["store_0"].heads == 1
        assert team.nets["warehouse"].heads == 1 + cfg.num_stores
        single = make_chain(num_products=1, demand_mean=6.0)
        assert team.nets["store_0"].obs_dim == store_obs_dim(single, 0)

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError, match="unknown variant"):
            variant_spec("CMRAL")

    @pytest.mark.parametrize("variant", ("BSP", "RANDOM"))
    def test_unlearned_variants_have_no_team(self, variant):
        with pytest.raises(ValueError, match="no trainable agents"):
            team_for(variant)


class TestActions:
    @pytest.mark.parametrize("variant", ALL_LEARNED)
    def test_sampled_actions_are_grid_valid(self, variant):
        team, cfg = team_for(variant)
        env = InventoryEnv(cfg)
        tables = env.reset(seed=0)
        rng = np.random.default_rng(0)
        while not env.done:
            (store_req, wh_req, caps), _ = team.act_sample(tables, env.t, rng)
            env.step(store_req, wh_req, caps)  # raises if off-grid

    def test_greedy_matches_sampling_support(self):
        team, cfg = team_for("CMARL")
        env = InventoryEnv(cfg)
        tables = env.reset(seed=1)
        store_req, wh_req, caps = team.act_greedy(tables, 0)
        assert store_req.shape == (cfg.num_stores, cfg.num_products)
        assert wh_req.shape == (cfg.num_products,)
        assert caps.shape == (cfg.num_stores, cfg.num_products)
        again = team.act_greedy(tables, 0)
        assert (store_req == again[0]).all() and (caps == again[2]).all()

    def test_single_agent_caps_defer_to_rationing(self):
        team, cfg = team_for("SARL")
        env = InventoryEnv(cfg)
        tables = env.reset(seed=2)
        (store_req, _, caps), _ = team.act_sample(tables, 0, np.random.default_rng(0))
        assert (caps == store_req).all()

    def test_levels_scale_with_batch_size(self):
        cfg = make_chain(batch_size=3, demand_mean=6.0)
        team, _ = team_for("CMARL", cfg=cfg)
        env = InventoryEnv(cfg)
        tables = env.reset(seed=3)
        (store_req, wh_req, caps), _ = team.act_sample(tables, 0, np.random.default_rng(1))
        assert (store_req % 3 == 0).all()
        assert (wh_req % 3 == 0).all()
        assert (caps % 3 == 0).all()


class TestRewardStreams:
    def run_one_step(self, variant):
        team, cfg = team_for(variant)
        env = InventoryEnv(cfg)
        tables = env.reset(seed=4)
        acts, _ = team.act_sample(tables, 0, np.random.default_rng(2))
        return team, env.step(*acts)

    @pytest.mark.parametrize("variant", ("CMARL", "LimWh-ShRwd", "O-CMARL", "ShPol"))
    def test_shared_stream_is_identical_for_everyone(self, variant):
        team, outcome = self.run_one_step(variant)
        for name in team.agent_names:
            assert team.reward_for(name, outcome) == outcome.shared_reward

    @pytest.mark.parametrize("variant", ("EnWh-LocRwd", "LimWh-LocRwd"))
    def test_local_streams_partition_the_shared_reward(self, variant):
        team, outcome = self.run_one_step(variant)
        total = sum(team.reward_for(name, outcome) for name in team.agent_names)
        assert total == pytest.approx(outcome.shared_reward, abs=1e-9)
        assert team.reward_for("warehouse", outcome) == outcome.local_rewards[0]
        assert team.reward_for("store_1", outcome) == outcome.local_rewards[2]

    def test_single_agent_trains_on_the_shared_reward(self):
        team, outcome = self.run_one_step("SARL")
        assert team.reward_for("policy", outcome) == outcome.shared_reward


class TestTeamPolicy:
    def test_protocol_round_trip(self):
        team, cfg = team_for("CMARL")
        policy = TeamPolicy(team)
        policy.begin_episode(seed=0)
        env = InventoryEnv(cfg)
        tables = env.reset(seed=5)
        while not env.done:
            env.step(*policy.act(tables, env.t))
        assert env.done
