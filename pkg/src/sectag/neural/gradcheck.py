"""Finite-difference gradient checking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import Module, Parameter
from .tensor import Tensor

GROUPS = ("token_emb", "tag_emb", "attention", "feedforward", "layernorm", "classifier")


def parameter_group(name: str) -> str:
    if name.startswith("token_embedding"):
        return "token_emb"
    if name.startswith("tag_embedding"):
        return "tag_emb"
    if name.startswith("classifier"):
        return "classifier"
    if ".attn." in name:
        return "attention"
    if ".ff." in name:
        return "feedforward"
    return "layernorm"


@dataclass(frozen=True)
class GradCheckResult:
    group: str
    checked: int
    max_rel_error: float


def _rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)


def gradcheck(
    module: Module,
    loss_fn: Callable[[], Tensor],
    step: float = 1e-4,
    per_param: int = 12,
    rng: Optional[np.random.Generator] = None,
    only_rows: Optional[dict[str, np.ndarray]] = None,
) -> dict[str, GradCheckResult]:
    """Compare backprop gradients against central differences.

    Up to ``per_param`` entries of each parameter are probed; the relative
    error ``|g - n| / (|g| + |n|)`` is taken over the probed vector of each
    parameter group. ``only_rows`` restricts probing of a parameter to the
    given leading-axis rows (used for embedding tables where most rows are
    untouched by the loss).
    """
    rng = rng or np.random.default_rng(0)
    params = list(module.named_parameters())
    for _, p in params:
        p.grad = None
    loss_fn().backward()
    analytic: dict[str, list[float]] = {}
    numeric: dict[str, list[float]] = {}
    for name, p in params:
        group = parameter_group(name)
        grad = p.grad if p.grad is not None else np.zeros_like(p.data)
        candidates = _candidates(p, (only_rows or {}).get(name))
        pick = candidates if len(candidates) <= per_param else candidates[rng.choice(len(candidates), per_param, replace=False)]
        for flat in pick:
            idx = np.unravel_index(int(flat), p.shape)
            old = p.data[idx]
            p.data[idx] = old + step
            up = loss_fn().item()
            p.data[idx] = old - step
            down = loss_fn().item()
            p.data[idx] = old
            analytic.setdefault(group, []).append(float(grad[idx]))
            numeric.setdefault(group, []).append((up - down) / (2 * step))
    return {
        g: GradCheckResult(g, len(analytic[g]), _rel_error(np.array(analytic[g]), np.array(numeric[g])))
        for g in analytic
    }


def _candidates(p: Parameter, rows: Optional[np.ndarray]) -> np.ndarray:
    if rows is None:
        return np.arange(p.data.size)
    width = int(np.prod(p.shape[1:]))
    return (np.asarray(rows)[:, None] * width + np.arange(width)[None, :]).reshape(-1)
