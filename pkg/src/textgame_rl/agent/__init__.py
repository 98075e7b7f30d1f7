"""DRRN learner: Q-network, replay, training loop, inverse-dynamics head."""

from .invdy import (InvDynHead, LossWeights, action_decode_target,
                    combined_loss, dec_loss, inv_loss)
from .qnet import QNetwork, select_action, softmax_probs
from .replay import ReplayBuffer, Transition
from .trainer import (VARIANTS, TrainConfig, TrainResult, build_vocab,
                      config_for_variant, run_training, td_loss, train_step)

__all__ = [
    "VARIANTS", "InvDynHead", "LossWeights", "QNetwork", "ReplayBuffer",
    "TrainConfig", "TrainResult", "Transition", "action_decode_target",
    "build_vocab", "combined_loss", "config_for_variant", "dec_loss",
    "inv_loss", "run_training", "select_action", "softmax_probs", "td_loss",
    "train_step",
]
