"""Numpy autodiff, the speaker-tag encoder, its loss and optimizer."""

from .checkpoint import load_checkpoint, save_checkpoint
from .loss import cross_entropy, perm_invariant_ce
from .model import EncoderConfig, SecModel
from .optim import Adam
from .tensor import Tensor
from .train import collate, train_step
from .vocab import Vocabulary

__all__ = [
    "Adam",
    "EncoderConfig",
    "SecModel",
    "Tensor",
    "Vocabulary",
    "collate",
    "cross_entropy",
    "load_checkpoint",
    "perm_invariant_ce",
    "save_checkpoint",
    "train_step",
]
