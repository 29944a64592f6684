"""Batching and a single optimisation step."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import NumericalError, ValidationError
from ..errorsim import TrainingExample
from .loss import perm_invariant_ce
from .model import SecModel
from .optim import Adam


@dataclass(frozen=True)
class Batch:
    tokens: np.ndarray  # (B, T) vocabulary indices, 0 = pad
    input_tags: np.ndarray
    target_tags: np.ndarray
    mask: np.ndarray  # True on real positions


def canonical_tags(tags: Sequence[int]) -> list[int]:
    """Relabel a two-speaker tag sequence so the first word carries speaker 0."""
    if not tags or tags[0] == 0:
        return list(tags)
    return [1 - t for t in tags]


def collate(model: SecModel, examples: Sequence[TrainingExample]) -> Batch:
    if not examples:
        raise ValidationError("empty batch")
    width = max(len(ex) for ex in examples)
    shape = (len(examples), width)
    tokens = np.zeros(shape, dtype=np.int64)
    tags = np.zeros(shape, dtype=np.int64)
    targets = np.zeros(shape, dtype=np.int64)
    mask = np.zeros(shape, dtype=bool)
    for i, ex in enumerate(examples):
        n = len(ex)
        tokens[i, :n] = model.vocab.encode(ex.tokens)
        tags[i, :n] = canonical_tags(ex.input_tags)
        targets[i, :n] = ex.target_tags
        mask[i, :n] = True
    return Batch(tokens, tags, targets, mask)


def batch_loss(model: SecModel, batch: Batch):
    logits = model.forward_batch(batch.tokens, batch.input_tags, batch.mask)
    return perm_invariant_ce(logits, batch.target_tags, model.config.num_speakers, batch.mask)


def train_step(
    model: SecModel, examples: Sequence[TrainingExample], optimizer: Adam, freeze_backbone: bool = False
) -> float:
    """One Adam update on ``examples``; returns the loss before the update.

    With ``freeze_backbone`` the embeddings and backbone stack are excluded
    from the graph, so they receive neither gradients nor updates.
    """
    batch = collate(model, examples)
    frozen = model.backbone_parameters() if freeze_backbone else []
    for p in frozen:
        p.requires_grad = False
    try:
        optimizer.zero_grad()
        loss = batch_loss(model, batch)
        value = loss.item()
        if not np.isfinite(value):
            raise NumericalError(f"non-finite training loss {value}")
        loss.backward()
        optimizer.step(skip=frozen)
    finally:
        for p in frozen:
            p.requires_grad = True
    return value
