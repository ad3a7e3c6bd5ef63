"""Property tests for the simulator's step invariants.

`step_violations` in conftest re-derives, from the episode tables alone,
everything a step must preserve: conservation at both echelons, in-transit
bookkeeping, allocation feasibility, warehouse-column replication, bounds,
and the exact reward decomposition.
"""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from echelon.env import InventoryEnv

from conftest import make_chain, random_actions, step_violations


@st.composite
def chain_case(draw):
    n = draw(st.integers(1, 4))
    k = draw(st.integers(1, 3))
    cfg = make_chain(
        num_stores=n,
        num_products=k,
        horizon=draw(st.integers(2, 8)),
        store_lead_times=[draw(st.integers(1, 4)) for _ in range(n)],
        warehouse_lead_time=draw(st.integers(1, 4)),
        store_capacity=draw(st.integers(3, 40)),
        warehouse_capacity=draw(st.integers(5, 120)),
        unfulfilled_penalty_coeff=draw(
            st.floats(0, 10, allow_nan=False, allow_infinity=False)
        ),
        demand_mean=draw(st.floats(0, 25, allow_nan=False, allow_infinity=False)),
        action_levels=draw(st.integers(1, 20)),
        batch_size=draw(st.integers(1, 3)),
        initial_inventory=draw(st.integers(0, 30)),
    )
    seed = draw(st.integers(0, 2**31 - 1))
    return cfg, seed


@given(chain_case())
@settings(max_examples=60, deadline=None)
def test_random_episodes_hold_every_invariant(case):
    cfg, seed = case
    env = InventoryEnv(cfg)
    tables = env.reset(seed=seed)
    rng = np.random.default_rng(seed ^ 0xA5A5A5)
    while not env.done:
        t = env.t
        outcome = env.step(*random_actions(cfg, rng))
        assert step_violations(cfg, tables, t, outcome) == []


def test_shared_reward_table_matches_outcomes(chain):
    env = InventoryEnv(chain)
    tables = env.reset(seed=5)
    rng = np.random.default_rng(5)
    rewards = []
    while not env.done:
        rewards.append(env.step(*random_actions(chain, rng)).shared_reward)
    assert tables.shared_reward.tolist() == rewards


def test_zero_actions_zero_flows(chain):
    env = InventoryEnv(chain)
    tables = env.reset(seed=9)
    zero = (
        np.zeros((chain.num_stores, chain.num_products), dtype=np.int64),
        np.zeros(chain.num_products, dtype=np.int64),
        np.zeros((chain.num_stores, chain.num_products), dtype=np.int64),
    )
    while not env.done:
        env.step(*zero)
    assert (tables.flows[:, :, 0, :] == 0).all()
    assert (tables.in_transit == 0).all()
    assert (tables.accepted == 0).all()
