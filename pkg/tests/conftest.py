import math

import numpy as np
import pytest

from echelon.config import chain_config_from_dict
from echelon.env.tables import STORE, WAREHOUSE

BASE_CHAIN = {
    "num_stores": 2,
    "num_products": 1,
    "horizon": 30,
    "store_lead_times": [2, 2],
    "warehouse_lead_time": 2,
    "store_capacity": 30,
    "warehouse_capacity": 90,
    "selling_price": 5.0,
    "holding_cost": 0.1,
    "procurement_cost": 1.0,
    "unfulfilled_penalty_coeff": 5.0,
    "demand_mean": 10.0,
    "action_levels": 20,
    "batch_size": 1,
    "initial_inventory": 20,
}


def make_chain(**over):
    d = dict(BASE_CHAIN)
    d.update(over)
    return chain_config_from_dict(d)


@pytest.fixture
def chain():
    return make_chain()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_actions(cfg, rng):
    """A uniformly random but grid-valid env action triple."""
    b, top = cfg.batch_size, cfg.action_levels + 1
    store_req = rng.integers(0, top, size=(cfg.num_stores, cfg.num_products)) * b
    wh_req = rng.integers(0, top, size=cfg.num_products) * b
    caps = rng.integers(0, top, size=(cfg.num_stores, cfg.num_products)) * b
    return store_req, wh_req, caps


def step_violations(cfg, tables, t, outcome):
    """Every post-step invariant violated at period t, as readable strings.

    Checked: non-negativity and capacity bounds, warehouse-column
    replication, the conservation identity at both echelons, the in-transit
    recurrence, allocation feasibility, and the exact local-reward
    decomposition of the shared reward.
    """
    bad = []
    on0, on1 = tables.on_hand[t], tables.on_hand[t + 1]
    tr0, tr1 = tables.in_transit[t], tables.in_transit[t + 1]
    acc, req = tables.accepted[t], tables.requested[t]
    sales = tables.flows[t, :, 1, :]

    for name, arr in (("on_hand", on1), ("in_transit", tr1), ("accepted", acc)):
        if (arr < 0).any():
            bad.append(f"t={t}: negative {name}")
    if (on1[:, STORE, :] > cfg.store_capacity).any():
        bad.append(f"t={t}: store stock above capacity")
    if (on1[:, WAREHOUSE, :] > cfg.warehouse_capacity).any():
        bad.append(f"t={t}: warehouse stock above capacity")
    for name, arr in (
        ("on_hand", on1),
        ("in_transit", tr1),
        ("requested", req),
        ("accepted", acc),
    ):
        if (arr[:, WAREHOUSE, :] != arr[0, WAREHOUSE, :]).any():
            bad.append(f"t={t}: {name} warehouse column not replicated")

    if (acc[:, STORE, :] > req[:, STORE, :]).any():
        bad.append(f"t={t}: allocation exceeds request")
    if (acc[:, STORE, :].sum(axis=0) > on0[0, WAREHOUSE, :]).any():
        bad.append(f"t={t}: allocation exceeds warehouse stock")

    arrivals = np.zeros((cfg.num_stores, cfg.num_products), dtype=np.int64)
    for v in range(cfg.num_stores):
        src = t - int(cfg.store_lead_times[v])
        if src >= 0:
            arrivals[v] = tables.accepted[src, v, STORE, :]
    want = np.minimum(on0[:, STORE, :] - sales + arrivals, cfg.store_capacity.astype(np.int64))
    if (on1[:, STORE, :] != want).any():
        bad.append(f"t={t}: store conservation identity broken")

    src = t - cfg.warehouse_lead_time
    wh_arrival = tables.accepted[src, 0, WAREHOUSE, :] if src >= 0 else 0
    shipped = acc[:, STORE, :].sum(axis=0)
    want_wh = np.minimum(
        on0[0, WAREHOUSE, :] - shipped + wh_arrival,
        cfg.warehouse_capacity.astype(np.int64),
    )
    if (on1[0, WAREHOUSE, :] != want_wh).any():
        bad.append(f"t={t}: warehouse conservation identity broken")

    if (tr1[:, STORE, :] != tr0[:, STORE, :] - arrivals + acc[:, STORE, :]).any():
        bad.append(f"t={t}: store in-transit recurrence broken")
    if (tr1[0, WAREHOUSE, :] != tr0[0, WAREHOUSE, :] - wh_arrival + acc[0, WAREHOUSE, :]).any():
        bad.append(f"t={t}: warehouse in-transit recurrence broken")

    if math.fsum(outcome.local_rewards.tolist()) != outcome.shared_reward:
        bad.append(f"t={t}: local rewards do not sum to the shared reward")
    via_components = math.fsum(
        [
            outcome.revenue,
            -outcome.holding_cost,
            -outcome.procurement_cost,
            -outcome.unfulfilled_penalty,
        ]
    )
    if not math.isclose(via_components, outcome.shared_reward, rel_tol=1e-12, abs_tol=1e-12):
        bad.append(f"t={t}: component totals disagree with the shared reward")
    return bad
