from .agents import AgentTeam, TeamPolicy, VariantSpec, variant_spec
from .autodiff import Adam, Tensor, clip_global_norm, gradient_check
from .checkpoint import CheckpointMismatch, load_checkpoint, save_checkpoint
from .gae import gae_advantages, normalize
from .nets import MLPPolicy, sample_heads
from .ppo import BatchStats, PPOTrainer, UpdateStats

__all__ = [
    "AgentTeam",
    "TeamPolicy",
    "VariantSpec",
    "variant_spec",
    "Adam",
    "Tensor",
    "clip_global_norm",
    "gradient_check",
    "CheckpointMismatch",
    "load_checkpoint",
    "save_checkpoint",
    "gae_advantages",
    "normalize",
    "MLPPolicy",
    "sample_heads",
    "BatchStats",
    "PPOTrainer",
    "UpdateStats",
]
