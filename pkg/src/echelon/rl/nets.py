"""Actor-critic MLP with independent categorical heads.

One network per agent: a shared tanh trunk feeding H discrete heads (one
per decision the agent makes each period, each over the same n+1 order
levels) and a scalar value head.  The joint action log-probability is the
sum over heads.
"""

from __future__ import annotations

import numpy as np

from .autodiff import Tensor, gather_last, log_softmax


class MLPPolicy:
    def __init__(
        self,
        obs_dim: int,
        heads: int,
        levels: int,
        hidden: tuple[int, ...] = (128, 128),
        seed: int = 0,
    ):
        if obs_dim < 1 or heads < 1 or levels < 0:
            raise ValueError("obs_dim and heads must be >= 1, levels >= 0")
        self.obs_dim = obs_dim
        self.heads = heads
        self.levels = levels
        self.hidden = tuple(hidden)

        rng = np.random.default_rng(seed)
        self.trunk: list[tuple[Tensor, Tensor]] = []
        fan_in = obs_dim
        for width in self.hidden:
            w = Tensor(rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, width)))
            b = Tensor(np.zeros(width))
            self.trunk.append((w, b))
            fan_in = width
        # Small policy-head weights keep the initial policy near uniform.
        self.w_pi = Tensor(
            rng.normal(0.0, 0.01 / np.sqrt(fan_in), size=(fan_in, heads * (levels + 1)))
        )
        self.b_pi = Tensor(np.zeros(heads * (levels + 1)))
        self.w_v = Tensor(rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, 1)))
        self.b_v = Tensor(np.zeros(1))

    @property
    def params(self) -> list[Tensor]:
        out: list[Tensor] = []
        for w, b in self.trunk:
            out += [w, b]
        return out + [self.w_pi, self.b_pi, self.w_v, self.b_v]

    @property
    def param_count(self) -> int:
        return sum(p.data.size for p in self.params)

    @property
    def layer_sizes(self) -> list[int]:
        return [self.obs_dim, *self.hidden, self.heads * (self.levels + 1)]

    def forward(self, obs: np.ndarray) -> tuple[Tensor, Tensor]:
        """obs (B, obs_dim) -> logits Tensor (B, H, levels+1), value Tensor (B,)."""
        obs = np.asarray(obs, dtype=np.float64)
        if obs.ndim != 2 or obs.shape[1] != self.obs_dim:
            raise ValueError(f"obs has shape {obs.shape}, expected (B, {self.obs_dim})")
        h = Tensor(obs)
        for w, b in self.trunk:
            h = (h @ w + b).tanh()
        logits = (h @ self.w_pi + self.b_pi).reshape(obs.shape[0], self.heads, self.levels + 1)
        value = (h @ self.w_v + self.b_v).reshape(obs.shape[0])
        return logits, value

    def joint_log_prob(self, logits: Tensor, actions: np.ndarray) -> Tensor:
        """Sum of per-head log-probabilities, shape (B,)."""
        return gather_last(log_softmax(logits), actions).sum(axis=1)

    def act(self, obs: np.ndarray, rng: np.random.Generator):
        """Sample one action per head; returns (actions (B,H), logp (B,), value (B,))."""
        logits, value = self.forward(obs)
        actions = sample_heads(logits.data, rng)
        logp = self.joint_log_prob(logits, actions)
        return actions, logp.data.copy(), value.data.copy()

    def act_greedy(self, obs: np.ndarray) -> np.ndarray:
        logits, _ = self.forward(obs)
        return logits.data.argmax(axis=-1)


def sample_heads(logits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw one category per head from softmax(logits), shape (B, H)."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    probs = np.exp(shifted)
    probs /= probs.sum(axis=-1, keepdims=True)
    cum = probs.cumsum(axis=-1)
    u = rng.random(size=logits.shape[:-1] + (1,))
    idx = (cum < u).sum(axis=-1)
    return np.minimum(idx, logits.shape[-1] - 1).astype(np.int64)
