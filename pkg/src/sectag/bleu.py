"""Corpus-level BLEU over pre-tokenized sequences."""

from __future__ import annotations

import math
from collections import Counter
from typing import Hashable, Sequence

from .errors import UndefinedMetricError

MAX_ORDER = 4


def _ngrams(tokens: Sequence[Hashable], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def corpus_stats(
    references: Sequence[Sequence[Hashable]], hypotheses: Sequence[Sequence[Hashable]], max_order: int = MAX_ORDER
) -> tuple[list[int], list[int], int, int]:
    """Clipped matches and hypothesis n-gram totals per order, plus both corpus lengths."""
    matches = [0] * max_order
    totals = [0] * max_order
    ref_len = hyp_len = 0
    for ref, hyp in zip(references, hypotheses):
        ref_len += len(ref)
        hyp_len += len(hyp)
        for n in range(1, max_order + 1):
            hyp_counts = _ngrams(hyp, n)
            ref_counts = _ngrams(ref, n)
            matches[n - 1] += sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
            totals[n - 1] += sum(hyp_counts.values())
    return matches, totals, ref_len, hyp_len


def bleu(
    references: Sequence[Sequence[Hashable]], hypotheses: Sequence[Sequence[Hashable]], max_order: int = MAX_ORDER
) -> float:
    """Corpus BLEU with uniform weights, brevity penalty and no smoothing.

    Orders for which the corpus has no hypothesis n-grams at all (segments
    shorter than the order) are left out of the geometric mean. An order that
    has n-grams but no matches makes the score 0.
    """
    if len(references) != len(hypotheses):
        raise ValueError("references and hypotheses must pair up")
    if not hypotheses:
        raise UndefinedMetricError("BLEU undefined for an empty hypothesis corpus")
    matches, totals, ref_len, hyp_len = corpus_stats(references, hypotheses, max_order)
    if hyp_len == 0:
        return 0.0
    log_sum, orders = 0.0, 0
    for m, t in zip(matches, totals):
        if t == 0:
            break
        if m == 0:
            return 0.0
        log_sum += math.log(m / t)
        orders += 1
    brevity = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return brevity * math.exp(log_sum / orders)
