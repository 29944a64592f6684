"""Transformer encoder that re-predicts speaker tags for a window of words.

Each position is embedded as token + speaker-tag + sinusoidal position. A
"backbone" stack stands in for a pretrained language model and can be
frozen; a "head" stack and a per-token classifier produce the tag logits.
Both stacks use pre-norm residual blocks.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from ..errors import ConfigurationError, ShapeError
from ..rng import substream
from . import tensor as T
from .tensor import Tensor
from .vocab import Vocabulary

NEG_INF = -1e9


class Parameter(Tensor):
    """A trainable leaf tensor."""

    def __init__(self, data, name: Optional[str] = None, sparse_rows: bool = False):
        super().__init__(data, requires_grad=True, name=name)
        self.sparse_rows = sparse_rows


class Module:
    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Parameter]]:
        for key, value in vars(self).items():
            name = f"{prefix}{key}"
            if isinstance(value, Parameter):
                yield name, value
            elif isinstance(value, Module):
                yield from value.named_parameters(name + ".")
            elif isinstance(value, list):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{name}.{i}.")

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]


def _init(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Linear(Module):
    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator):
        self.weight = Parameter(_init(rng, d_in, d_out))
        self.bias = Parameter(np.zeros(d_out))

    def __call__(self, x: Tensor) -> Tensor:
        return T.linear(x, self.weight, self.bias)


class LayerNorm(Module):
    def __init__(self, d: int):
        self.gamma = Parameter(np.ones(d))
        self.beta = Parameter(np.zeros(d))

    def __call__(self, x: Tensor) -> Tensor:
        return T.layer_norm(x, self.gamma, self.beta)


class SelfAttention(Module):
    def __init__(self, d: int, heads: int, rng: np.random.Generator):
        self.heads = heads
        self.query = Linear(d, d, rng)
        self.key = Linear(d, d, rng)
        self.value = Linear(d, d, rng)
        self.out = Linear(d, d, rng)

    def __call__(self, x: Tensor, mask_add: np.ndarray) -> Tensor:
        q = T.split_heads(self.query(x), self.heads)
        k = T.split_heads(self.key(x), self.heads)
        v = T.split_heads(self.value(x), self.heads)
        return self.out(T.merge_heads(T.attention(q, k, v, mask_add)))


class FeedForward(Module):
    def __init__(self, d: int, hidden: int, rng: np.random.Generator):
        self.inner = Linear(d, hidden, rng)
        self.outer = Linear(hidden, d, rng)

    def __call__(self, x: Tensor) -> Tensor:
        return self.outer(T.gelu(self.inner(x)))


class EncoderLayer(Module):
    def __init__(self, d: int, heads: int, hidden: int, rng: np.random.Generator):
        self.attn_norm = LayerNorm(d)
        self.attn = SelfAttention(d, heads, rng)
        self.ff_norm = LayerNorm(d)
        self.ff = FeedForward(d, hidden, rng)

    def __call__(self, x: Tensor, mask_add: np.ndarray) -> Tensor:
        x = x + self.attn(self.attn_norm(x), mask_add)
        return x + self.ff(self.ff_norm(x))


class EncoderStack(Module):
    def __init__(self, layers: int, d: int, heads: int, hidden: int, rng: np.random.Generator):
        self.layers = [EncoderLayer(d, heads, hidden, rng) for _ in range(layers)]
        self.final_norm = LayerNorm(d)

    def __call__(self, x: Tensor, mask_add: np.ndarray) -> Tensor:
        for layer in self.layers:
            x = layer(x, mask_add)
        return self.final_norm(x)


@dataclass(frozen=True)
class EncoderConfig:
    vocab_size: int
    d_model: int = 128
    heads: int = 4
    backbone_layers: int = 2
    head_layers: int = 2
    ff_dim: int = 256
    max_len: int = 64
    num_speakers: int = 2
    seed: int = 0

    def __post_init__(self):
        dims = (self.vocab_size, self.d_model, self.heads, self.ff_dim, self.max_len, self.num_speakers)
        if min(dims) < 1 or min(self.backbone_layers, self.head_layers) < 0:
            raise ConfigurationError("all model dimensions must be positive")
        if self.d_model % self.heads:
            raise ConfigurationError(f"d_model {self.d_model} not divisible by {self.heads} heads")

    def to_dict(self) -> dict:
        return asdict(self)


def sinusoidal_positions(length: int, d: int) -> np.ndarray:
    pos = np.arange(length)[:, None]
    rates = np.exp(-np.log(10000.0) * (np.arange(0, d, 2) / d))
    table = np.zeros((length, d))
    table[:, 0::2] = np.sin(pos * rates)
    table[:, 1::2] = np.cos(pos * rates[: d // 2])
    return table


# parameters frozen in the first training stage
BACKBONE_PREFIXES = ("token_embedding", "tag_embedding", "backbone.")


class SecModel(Module):
    """Speaker-tag corrector; ``vocab`` maps words to embedding rows."""

    def __init__(self, config: EncoderConfig, vocab: Vocabulary):
        if len(vocab) != config.vocab_size:
            raise ConfigurationError(f"vocabulary has {len(vocab)} entries, config expects {config.vocab_size}")
        self.config = config
        self.vocab = vocab
        d = config.d_model

        def rng(part):
            return substream(config.seed, "init", part)

        self.token_embedding = Parameter(rng("token").normal(0.0, 0.5, size=(config.vocab_size, d)), sparse_rows=True)
        self.tag_embedding = Parameter(rng("tag").normal(0.0, 0.5, size=(config.num_speakers, d)))
        self.backbone = EncoderStack(config.backbone_layers, d, config.heads, config.ff_dim, rng("backbone"))
        self.head = EncoderStack(config.head_layers, d, config.heads, config.ff_dim, rng("head"))
        self.classifier = Linear(d, config.num_speakers, rng("classifier"))
        self.positions = sinusoidal_positions(config.max_len, d)

    @property
    def num_parameters(self) -> int:
        return sum(p.data.size for p in self.parameters())

    def backbone_parameters(self) -> list[Parameter]:
        return [p for n, p in self.named_parameters() if n.startswith(BACKBONE_PREFIXES)]

    def forward_batch(self, tokens: np.ndarray, tags: np.ndarray, mask: Optional[np.ndarray] = None) -> Tensor:
        """Logits of shape (B, T, num_speakers); ``mask`` marks real (non-pad) positions."""
        tokens = np.asarray(tokens, dtype=np.int64)
        tags = np.asarray(tags, dtype=np.int64)
        if tokens.ndim != 2 or tokens.shape != tags.shape:
            raise ShapeError(f"tokens {tokens.shape} and tags {tags.shape} must be equal (B, T) arrays")
        b, t = tokens.shape
        if t > self.config.max_len:
            raise ShapeError(f"sequence length {t} exceeds max_len {self.config.max_len}")
        if tags.size and (tags.min() < 0 or tags.max() >= self.config.num_speakers):
            raise ShapeError("speaker tag index out of range")
        if mask is None:
            mask = np.ones((b, t), dtype=bool)
        mask_add = np.where(mask, 0.0, NEG_INF)[:, None, None, :]
        x = T.embedding(self.token_embedding, tokens) + T.embedding(self.tag_embedding, tags)
        x = x + self.positions[:t]
        x = self.backbone(x, mask_add)
        x = self.head(x, mask_add)
        return self.classifier(x)

    def forward(self, tokens: Sequence[int], tags: Sequence[int]) -> Tensor:
        """Logits (T, num_speakers) for one sequence of token and tag indices."""
        if len(tokens) != len(tags):
            raise ShapeError(f"{len(tokens)} tokens but {len(tags)} tags")
        logits = self.forward_batch(np.asarray(tokens)[None, :], np.asarray(tags)[None, :])
        return T.reshape(logits, logits.shape[1:])

    def predict(self, words: Sequence[str], tags: Sequence[int]) -> list[int]:
        """Arg-max speaker index per word."""
        logits = self.forward(self.vocab.encode(words), tags)
        return [int(k) for k in logits.data.argmax(axis=-1)]

    def state(self) -> dict[str, np.ndarray]:
        return {n: p.data.copy() for n, p in self.named_parameters()}

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        for name, p in self.named_parameters():
            if state[name].shape != p.data.shape:
                raise ShapeError(f"{name}: expected {p.data.shape}, got {state[name].shape}")
            p.data = np.array(state[name], dtype=np.float64)
