"""Classify speaker-tag errors by where they fall inside a reference turn.

* ``a``: a mis-tagged run strictly inside the turn
* ``b``: a mis-tagged run at the start or end of the turn
* ``c``: the whole turn is mis-tagged

Positions are taken over the turn's aligned words, so deleted words neither
count as errors nor hide a turn edge. One ``TypedError`` is emitted per run.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .align import align, cooccurrence, mapping_from_counts
from .session import TaggedTranscript, turns_of

KINDS = ("a", "b", "c")


@dataclass(frozen=True)
class TypedError:
    kind: str
    turn_range: tuple[int, int]
    wrong_word_indices: tuple[int, ...]


def classify_errors(
    ref: TaggedTranscript, hyp: TaggedTranscript, mapping: Optional[dict[str, str]] = None
) -> list[TypedError]:
    ops = align(ref.texts, hyp.texts)
    ref_tags, hyp_tags = ref.tags, hyp.tags
    if mapping is None:
        mapping = mapping_from_counts(*cooccurrence(ops, ref_tags, hyp_tags))
    hyp_of_ref = {op.ref_index: op.hyp_index for op in ops if op.paired}

    errors = []
    for turn in turns_of(ref):
        positions = [i for i in turn.word_range if i in hyp_of_ref]
        flags = [mapping.get(hyp_tags[hyp_of_ref[i]]) != ref_tags[i] for i in positions]
        if not any(flags):
            continue
        span = (turn.start, turn.stop)
        if all(flags):
            errors.append(TypedError("c", span, tuple(positions)))
            continue
        k = 0
        while k < len(flags):
            if not flags[k]:
                k += 1
                continue
            end = k
            while end < len(flags) and flags[end]:
                end += 1
            kind = "b" if k == 0 or end == len(flags) else "a"
            errors.append(TypedError(kind, span, tuple(positions[k:end])))
            k = end
    return errors


def count_kinds(errors: Iterable[TypedError]) -> dict[str, int]:
    counts = Counter(e.kind for e in errors)
    return {kind: counts.get(kind, 0) for kind in KINDS}
