"""Synthetic ASR error pairs for desk-scale lexicon training and evaluation.

Each word gets a fixed confusion profile: up to three single-edit spelling
variants with Dirichlet weights, so one variant usually dominates, as real
recognizers tend to repeat the same mistake. Training and test pairs are
drawn independently from the same profiles. A small share of the draws are
unrelated vocabulary words, the kind of pair the phonetic filter exists to
drop.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lexicon import ErrorPair

SPELLING_SWAPS = (
    ("ph", "f"), ("f", "ph"), ("ck", "k"), ("c", "k"), ("k", "c"), ("y", "i"), ("i", "y"),
    ("ee", "ea"), ("ea", "ee"), ("oo", "u"), ("u", "oo"), ("s", "z"), ("z", "s"),
    ("er", "or"), ("or", "er"), ("a", "e"), ("e", "a"), ("o", "a"), ("i", "e"), ("o", "u"),
    ("t", "d"), ("d", "t"), ("ie", "y"), ("ou", "o"), ("m", "n"), ("n", "m"),
    ("b", "p"), ("p", "b"), ("v", "f"), ("g", "k"), ("th", "d"),
    ("ll", "l"), ("ss", "s"), ("tt", "t"), ("l", "ll"), ("s", "ss"), ("t", "tt"),
)


def spelling_variants(word: str) -> list[str]:
    """All distinct single-rewrite variants of ``word``, sorted."""
    out = set()
    for src, dst in SPELLING_SWAPS:
        start = word.find(src)
        while start != -1:
            variant = word[:start] + dst + word[start + len(src) :]
            if variant != word and variant.isalpha():
                out.add(variant)
            start = word.find(src, start + 1)
    if len(word) > 3 and word.endswith("s"):
        out.add(word[:-1])
    if len(word) > 3 and word.endswith("e"):
        out.add(word[:-1])
    return sorted(out)


@dataclass(frozen=True)
class ConfusionProfile:
    variants: tuple[str, ...]
    weights: tuple[float, ...]


def confusion_profiles(words: Sequence[str], rng: np.random.Generator, max_variants: int = 3) -> dict[str, ConfusionProfile]:
    profiles = {}
    for word in sorted(set(words)):
        variants = spelling_variants(word)
        if not variants:
            continue
        take = min(max_variants, len(variants))
        chosen = [variants[i] for i in rng.choice(len(variants), size=take, replace=False)]
        alpha = np.array([4.0] + [1.0] * (take - 1))
        weights = rng.dirichlet(alpha)
        profiles[word] = ConfusionProfile(tuple(chosen), tuple(float(w) for w in weights))
    return profiles


def sample_error_pairs(
    profiles: dict[str, ConfusionProfile],
    rng: np.random.Generator,
    mean_count: float = 12.0,
    p_noise: float = 0.03,
) -> list[ErrorPair]:
    """Aggregate ``(ref, hyp, count)`` pairs from the profiles, sorted."""
    vocab = sorted(profiles)
    counts: Counter = Counter()
    for word in vocab:
        profile = profiles[word]
        n = 1 + int(rng.poisson(mean_count - 1))
        picks = rng.choice(len(profile.variants), size=n, p=np.array(profile.weights))
        noise = rng.random(n) < p_noise
        for pick, is_noise in zip(picks, noise):
            hyp = vocab[int(rng.integers(len(vocab)))] if is_noise else profile.variants[int(pick)]
            if hyp != word:
                counts[word, hyp] += 1
    return [ErrorPair(r, h, c) for (r, h), c in sorted(counts.items())]
