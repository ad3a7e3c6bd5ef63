"""Generalized advantage estimation for finite-horizon episodes."""

from __future__ import annotations

import numpy as np


def gae_advantages(
    rewards: np.ndarray,
    values: np.ndarray,
    gamma: float,
    lam: float,
    last_value: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Backward GAE recursion over one episode.

    Returns (advantages, value targets); the episode ends after the last
    reward, so the terminal bootstrap defaults to zero.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if rewards.shape != values.shape or rewards.ndim != 1:
        raise ValueError("rewards and values must be matching 1-D arrays")
    t_len = rewards.size
    adv = np.zeros(t_len, dtype=np.float64)
    carry = 0.0
    next_value = float(last_value)
    for t in range(t_len - 1, -1, -1):
        delta = rewards[t] + gamma * next_value - values[t]
        carry = delta + gamma * lam * carry
        adv[t] = carry
        next_value = values[t]
    return adv, adv + values


def normalize(adv: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    """Zero-mean unit-variance rescaling, used per update batch."""
    return (adv - adv.mean()) / (adv.std() + eps)
