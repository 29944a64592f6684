"""Assign diarization speakers to ASR words.

A word goes to the speaker with the largest total temporal overlap. Words
that overlap no segment go to the speaker of the nearest segment, measured
as the gap between the closed intervals. Ties are broken by the earliest
segment start, then by the smaller speaker label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigurationError
from .session import SpeakerSegment, TaggedTranscript, TaggedWord, Word


@dataclass(frozen=True)
class TraceRecord:
    speaker: str
    rule: str  # "overlap" or "nearest"
    amount: float  # seconds of overlap, or gap seconds for "nearest"


def _overlap(word: Word, seg: SpeakerSegment) -> float:
    return max(0.0, min(word.end, seg.end) - max(word.start, seg.start))


def _gap(word: Word, seg: SpeakerSegment) -> float:
    return max(0.0, seg.start - word.end, word.start - seg.end)


def assign_speaker(word: Word, segments: Sequence[SpeakerSegment]) -> tuple[str, TraceRecord]:
    if not segments:
        raise ConfigurationError("cannot assign speakers without diarization segments")

    totals: dict[str, float] = {}
    first_start: dict[str, float] = {}
    for seg in segments:
        ov = _overlap(word, seg)
        if ov > 0:
            totals[seg.speaker] = totals.get(seg.speaker, 0.0) + ov
            first_start[seg.speaker] = min(first_start.get(seg.speaker, seg.start), seg.start)
    if totals:
        best = max(totals.values())
        speaker = min(
            (s for s, v in totals.items() if v == best),
            key=lambda s: (first_start[s], s),
        )
        return speaker, TraceRecord(speaker, "overlap", totals[speaker])

    nearest = min(segments, key=lambda seg: (_gap(word, seg), seg.start, seg.speaker))
    return nearest.speaker, TraceRecord(nearest.speaker, "nearest", _gap(word, nearest))


def reconcile(
    words: Sequence[Word], segments: Sequence[SpeakerSegment], session_id: str = ""
) -> tuple[TaggedTranscript, list[TraceRecord]]:
    tagged, trace = [], []
    for word in words:
        speaker, record = assign_speaker(word, segments)
        tagged.append(TaggedWord(word.text, speaker, word.start, word.end))
        trace.append(record)
    return TaggedTranscript(tuple(tagged), session_id), trace


def format_trace(trace: Sequence[TraceRecord], words: Sequence[Word]) -> str:
    lines = [
        f"{i}\t{w.text}\t{r.speaker}\t{r.rule}\t{r.amount:.6f}"
        for i, (w, r) in enumerate(zip(words, trace))
    ]
    return "".join(line + "\n" for line in lines)
