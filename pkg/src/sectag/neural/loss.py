"""Permutation-invariant cross-entropy over speaker classes."""

from __future__ import annotations

import itertools
from typing import Optional

import numpy as np

from ..errors import ConfigurationError, ShapeError
from . import tensor as T
from .tensor import Tensor

MAX_PIT_SPEAKERS = 4


def permutations(num_speakers: int) -> np.ndarray:
    """All relabelings as rows; ``perm[c]`` is the class that target ``c`` becomes."""
    if num_speakers > MAX_PIT_SPEAKERS:
        raise ConfigurationError(f"exhaustive permutation loss supports at most {MAX_PIT_SPEAKERS} speakers")
    return np.array(list(itertools.permutations(range(num_speakers))), dtype=np.int64)


def _as_batch(logits: Tensor, targets, mask):
    targets = np.asarray(targets, dtype=np.int64)
    squeeze = logits.data.ndim == 2
    if squeeze:
        logits = T.reshape(logits, (1,) + logits.shape)
        targets = targets[None, :]
    if logits.data.ndim != 3 or logits.shape[:2] != targets.shape:
        raise ShapeError(f"logits {logits.shape} do not match targets {targets.shape}")
    mask = np.ones(targets.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool).reshape(targets.shape)
    return logits, targets, mask


def permutation_ce(logp: np.ndarray, targets: np.ndarray, mask: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Mean token cross-entropy per (sequence, permutation), shape (B, P)."""
    b_idx = np.arange(targets.shape[0])[:, None]
    t_idx = np.arange(targets.shape[1])[None, :]
    counts = np.maximum(mask.sum(axis=1), 1)
    out = np.empty((targets.shape[0], len(perms)))
    for k, perm in enumerate(perms):
        nll = -logp[b_idx, t_idx, perm[targets]]
        out[:, k] = (nll * mask).sum(axis=1) / counts
    return out


def perm_invariant_ce(
    logits: Tensor, targets, num_speakers: Optional[int] = None, mask: Optional[np.ndarray] = None
) -> Tensor:
    """Mean over sequences of the minimum, over speaker relabelings, of token cross-entropy.

    ``logits`` is (T, K) or (B, T, K). Ties between relabelings go to the
    first in lexicographic order; the gradient follows the chosen one.
    """
    logits = T.as_tensor(logits)
    logits, targets, mask = _as_batch(logits, targets, mask)
    k = num_speakers or logits.shape[-1]
    if k != logits.shape[-1]:
        raise ShapeError(f"logits have {logits.shape[-1]} classes, expected {k}")
    perms = permutations(k)
    logp = T.log_softmax(logits)
    per_perm = permutation_ce(logp.data, targets, mask, perms)
    best = per_perm.argmin(axis=1)
    chosen = perms[best][np.arange(len(best))[:, None], targets]
    b, t = targets.shape
    bi, ti = np.nonzero(mask)
    counts = np.maximum(mask.sum(axis=1), 1)
    weights = -1.0 / (counts[bi] * b)
    return T.pick_sum(logp, (bi, ti, chosen[bi, ti]), weights)


def cross_entropy(logits: Tensor, targets, mask: Optional[np.ndarray] = None) -> Tensor:
    """Plain mean token cross-entropy (identity labeling)."""
    logits = T.as_tensor(logits)
    logits, targets, mask = _as_batch(logits, targets, mask)
    logp = T.log_softmax(logits)
    b = targets.shape[0]
    bi, ti = np.nonzero(mask)
    counts = np.maximum(mask.sum(axis=1), 1)
    return T.pick_sum(logp, (bi, ti, targets[bi, ti]), -1.0 / (counts[bi] * b))
