"""Word vocabulary with hashed buckets for words never seen in training."""

from __future__ import annotations

import hashlib
import zlib
from collections import Counter
from typing import Iterable, Sequence

import numpy as np

PAD = "<pad>"
DEFAULT_BUCKETS = 2**15


class Vocabulary:
    """Index 0 is padding, then known words, then ``buckets`` hash slots."""

    def __init__(self, words: Sequence[str], buckets: int = DEFAULT_BUCKETS):
        if buckets < 1:
            raise ValueError("need at least one hash bucket")
        self.words = list(words)
        self.buckets = buckets
        self._index = {w: i + 1 for i, w in enumerate(self.words)}

    @classmethod
    def build(cls, texts: Iterable[str], min_count: int = 1, buckets: int = DEFAULT_BUCKETS) -> "Vocabulary":
        counts = Counter(texts)
        words = sorted(w for w, c in counts.items() if c >= min_count)
        return cls(words, buckets)

    def __len__(self) -> int:
        return 1 + len(self.words) + self.buckets

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def index(self, word: str) -> int:
        known = self._index.get(word)
        if known is not None:
            return known
        return 1 + len(self.words) + zlib.crc32(word.encode("utf-8")) % self.buckets

    def encode(self, words: Sequence[str]) -> np.ndarray:
        return np.array([self.index(w) for w in words], dtype=np.int64)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.buckets).encode())
        for w in self.words:
            h.update(b"\n" + w.encode("utf-8"))
        return h.hexdigest()
