"""Adam optimizer."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .model import Parameter


class Adam:
    """Adam with bias correction.

    Parameters flagged ``sparse_rows`` (embedding tables) are updated lazily:
    only rows that received a gradient in this step are touched.
    """

    def __init__(
        self,
        params: Sequence[Parameter],
        lr: float = 1e-3,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        clip_norm: Optional[float] = None,
    ):
        self.params = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.clip_norm = clip_norm
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def step(self, skip: Sequence[Parameter] = ()) -> None:
        """Update every parameter holding a gradient, except those in ``skip``."""
        skip_ids = {id(p) for p in skip}
        active = [i for i, p in enumerate(self.params) if p.grad is not None and id(p) not in skip_ids]
        if not active:
            return
        scale = 1.0
        if self.clip_norm is not None:
            norm = np.sqrt(sum(float((self.params[i].grad ** 2).sum()) for i in active))
            if norm > self.clip_norm:
                scale = self.clip_norm / norm
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        step_size = self.lr / c1
        root_c2 = np.sqrt(c2)
        for i in active:
            p = self.params[i]
            g = p.grad * scale if scale != 1.0 else p.grad
            if getattr(p, "sparse_rows", False):
                self._lazy_update(i, g, step_size, root_c2)
                continue
            m, v = self.m[i], self.v[i]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            denom = np.sqrt(v)
            denom /= root_c2
            denom += self.eps
            p.data -= step_size * m / denom

    def _lazy_update(self, i: int, g: np.ndarray, step_size: float, root_c2: float) -> None:
        # rows with an all-zero gradient (unused embeddings) keep their moments
        rows = np.flatnonzero(g.any(axis=1))
        p, m, v = self.params[i], self.m[i], self.v[i]
        gr = g[rows]
        m[rows] = self.beta1 * m[rows] + (1.0 - self.beta1) * gr
        v[rows] = self.beta2 * v[rows] + (1.0 - self.beta2) * (gr * gr)
        p.data[rows] -= step_size * m[rows] / (np.sqrt(v[rows]) / root_c2 + self.eps)

    def state(self) -> dict:
        return {"t": self.t, "m": [m.copy() for m in self.m], "v": [v.copy() for v in self.v]}
