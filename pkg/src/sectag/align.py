"""Levenshtein word alignment and optimal hypothesis-to-reference speaker mapping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

CORRECT = "correct"
SUBSTITUTION = "substitution"
INSERTION = "insertion"
DELETION = "deletion"


@dataclass(frozen=True)
class AlignmentOp:
    kind: str
    ref_index: Optional[int] = None
    hyp_index: Optional[int] = None

    @property
    def paired(self) -> bool:
        return self.kind in (CORRECT, SUBSTITUTION)


def edit_distance(ref: Sequence[Hashable], hyp: Sequence[Hashable]) -> int:
    """Unit-cost Levenshtein distance."""
    if len(ref) < len(hyp):
        ref, hyp = hyp, ref
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        cur = [i]
        for j, h in enumerate(hyp, start=1):
            cur.append(min(prev[j - 1] + (r != h), prev[j] + 1, cur[j - 1] + 1))
        prev = cur
    return prev[-1]


def align(ref: Sequence[Hashable], hyp: Sequence[Hashable]) -> list[AlignmentOp]:
    """Minimum-edit alignment of two token sequences.

    On equal cost the backtrace prefers correct, then substitution, then
    deletion, then insertion, so counts are stable for a given input.
    """
    n, m = len(ref), len(hyp)
    cost = [list(range(m + 1))]
    for i in range(1, n + 1):
        prev = cost[-1]
        row = [i]
        r = ref[i - 1]
        for j in range(1, m + 1):
            row.append(min(prev[j - 1] + (r != hyp[j - 1]), prev[j] + 1, row[j - 1] + 1))
        cost.append(row)

    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        here = cost[i][j]
        if i > 0 and j > 0:
            same = ref[i - 1] == hyp[j - 1]
            if same and here == cost[i - 1][j - 1]:
                ops.append(AlignmentOp(CORRECT, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
            if not same and here == cost[i - 1][j - 1] + 1:
                ops.append(AlignmentOp(SUBSTITUTION, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
        if i > 0 and here == cost[i - 1][j] + 1:
            ops.append(AlignmentOp(DELETION, i - 1, None))
            i -= 1
        else:
            ops.append(AlignmentOp(INSERTION, None, j - 1))
            j -= 1
    ops.reverse()
    return ops


def alignment_cost(ops: Sequence[AlignmentOp]) -> int:
    return sum(op.kind != CORRECT for op in ops)


def cooccurrence(
    ops: Sequence[AlignmentOp], ref_tags: Sequence[str], hyp_tags: Sequence[str]
) -> tuple[np.ndarray, list[str], list[str]]:
    """Count paired words per (hyp speaker, ref speaker); labels sorted."""
    hyp_labels = sorted(set(hyp_tags))
    ref_labels = sorted(set(ref_tags))
    hi = {s: k for k, s in enumerate(hyp_labels)}
    ri = {s: k for k, s in enumerate(ref_labels)}
    counts = np.zeros((len(hyp_labels), len(ref_labels)), dtype=np.int64)
    for op in ops:
        if op.paired:
            counts[hi[hyp_tags[op.hyp_index]], ri[ref_tags[op.ref_index]]] += 1
    return counts, hyp_labels, ref_labels


def mapping_from_counts(counts: np.ndarray, hyp_labels: list[str], ref_labels: list[str]) -> dict[str, str]:
    """Injective hyp->ref mapping maximizing total agreement.

    Pairs with zero co-occurrence are left unmapped.
    """
    if counts.size == 0:
        return {}
    rows, cols = linear_sum_assignment(counts, maximize=True)
    return {hyp_labels[r]: ref_labels[c] for r, c in zip(rows, cols) if counts[r, c] > 0}


def map_speakers(
    ops: Sequence[AlignmentOp], ref_tags: Sequence[str], hyp_tags: Sequence[str]
) -> dict[str, str]:
    return mapping_from_counts(*cooccurrence(ops, ref_tags, hyp_tags))
