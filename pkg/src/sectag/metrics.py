"""Word diarization error rate (WDER) and concatenated minimum-permutation WER (cpWER)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .align import CORRECT, DELETION, INSERTION, align, cooccurrence, edit_distance, mapping_from_counts
from .errors import UndefinedMetricError
from .session import TaggedTranscript

EXHAUSTIVE_LIMIT = 8


@dataclass
class AlignmentCounts:
    C: int = 0
    S: int = 0
    I: int = 0
    D: int = 0
    C_IS: int = 0
    S_IS: int = 0

    @property
    def numerator(self) -> int:
        return self.S_IS + self.C_IS

    @property
    def denominator(self) -> int:
        return self.S + self.C

    def __add__(self, other: "AlignmentCounts") -> "AlignmentCounts":
        return AlignmentCounts(*(a + b for a, b in zip(self.astuple(), other.astuple())))

    def astuple(self) -> tuple[int, ...]:
        return (self.C, self.S, self.I, self.D, self.C_IS, self.S_IS)


@dataclass(frozen=True)
class MetricRecord:
    """One row of a metric report, in the ``rate (errors/total)`` notation."""

    metric: str
    numerator: int
    denominator: int
    label: str = ""

    @property
    def rate(self) -> float:
        if self.denominator == 0:
            raise UndefinedMetricError(f"{self.metric}: empty denominator")
        return self.numerator / self.denominator

    @property
    def percent(self) -> str:
        return f"{100.0 * self.rate:.2f}"

    def __str__(self) -> str:
        head = f"{self.label} " if self.label else ""
        return f"{head}{self.percent} ({self.numerator}/{self.denominator})"

    def as_record(self) -> str:
        return f"{self.metric}\t{self.rate:.6f}\t{self.numerator}\t{self.denominator}"


def format_rate(numerator: int, denominator: int) -> str:
    """``format_rate(7673, 274398) == '2.80 (7673/274398)'``."""
    return str(MetricRecord("", numerator, denominator))


def wder_counts(
    ref: TaggedTranscript, hyp: TaggedTranscript, mapping: Optional[dict[str, str]] = None
) -> tuple[AlignmentCounts, dict[str, str]]:
    """Alignment counts plus the speaker mapping they were computed under.

    Without an explicit ``mapping`` the optimal per-session mapping is used.
    Hypothesis speakers left unmapped count as wrong everywhere.
    """
    ops = align(ref.texts, hyp.texts)
    ref_tags, hyp_tags = ref.tags, hyp.tags
    if mapping is None:
        mapping = mapping_from_counts(*cooccurrence(ops, ref_tags, hyp_tags))
    counts = AlignmentCounts()
    for op in ops:
        if op.kind == INSERTION:
            counts.I += 1
        elif op.kind == DELETION:
            counts.D += 1
        else:
            wrong = mapping.get(hyp_tags[op.hyp_index]) != ref_tags[op.ref_index]
            if op.kind == CORRECT:
                counts.C += 1
                counts.C_IS += wrong
            else:
                counts.S += 1
                counts.S_IS += wrong
    return counts, mapping


def wder(
    ref: TaggedTranscript, hyp: TaggedTranscript, mapping: Optional[dict[str, str]] = None
) -> tuple[float, AlignmentCounts]:
    counts, _ = wder_counts(ref, hyp, mapping)
    if counts.denominator == 0:
        raise UndefinedMetricError("WDER undefined: no correct or substituted words")
    return counts.numerator / counts.denominator, counts


def corpus_wder(
    pairs: Iterable[tuple[TaggedTranscript, TaggedTranscript]], scope: str = "session"
) -> tuple[float, AlignmentCounts]:
    """WDER pooled over sessions.

    ``scope="session"`` maps speakers per session; ``scope="corpus"`` finds one
    mapping over the pooled co-occurrence counts, which only makes sense when
    labels are shared across sessions.
    """
    pairs = list(pairs)
    mapping = None
    if scope == "corpus":
        totals: dict[tuple[str, str], int] = {}
        for ref, hyp in pairs:
            counts, hyp_labels, ref_labels = cooccurrence(align(ref.texts, hyp.texts), ref.tags, hyp.tags)
            for a, h in enumerate(hyp_labels):
                for b, r in enumerate(ref_labels):
                    totals[h, r] = totals.get((h, r), 0) + int(counts[a, b])
        hyp_all = sorted({h for h, _ in totals})
        ref_all = sorted({r for _, r in totals})
        matrix = np.array([[totals.get((h, r), 0) for r in ref_all] for h in hyp_all], dtype=np.int64)
        mapping = mapping_from_counts(matrix.reshape(len(hyp_all), len(ref_all)), hyp_all, ref_all)
    elif scope != "session":
        raise ValueError(f"unknown mapping scope {scope!r}")
    total = AlignmentCounts()
    for ref, hyp in pairs:
        total = total + wder_counts(ref, hyp, mapping)[0]
    if total.denominator == 0:
        raise UndefinedMetricError("WDER undefined: no correct or substituted words")
    return total.numerator / total.denominator, total


@dataclass(frozen=True)
class CpwerCounts:
    errors: int
    ref_words: int
    assignment: dict = field(default_factory=dict, compare=False)


def speaker_streams(transcript: TaggedTranscript) -> dict[str, list[str]]:
    streams: dict[str, list[str]] = {}
    for w in transcript.words:
        streams.setdefault(w.speaker, []).append(w.text)
    return streams


def _padded_costs(ref_streams: list[list[str]], hyp_streams: list[list[str]]) -> np.ndarray:
    n = max(len(ref_streams), len(hyp_streams))
    costs = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i < len(ref_streams) and j < len(hyp_streams):
                costs[i, j] = edit_distance(ref_streams[i], hyp_streams[j])
            elif i < len(ref_streams):
                costs[i, j] = len(ref_streams[i])
            elif j < len(hyp_streams):
                costs[i, j] = len(hyp_streams[j])
    return costs


def solve_exhaustive(costs: np.ndarray) -> tuple[int, tuple[int, ...]]:
    """Minimum-cost permutation by enumeration; first minimum in lexicographic order."""
    n = costs.shape[0]
    best, best_perm = None, tuple(range(n))
    rows = np.arange(n)
    for perm in itertools.permutations(range(n)):
        total = int(costs[rows, perm].sum())
        if best is None or total < best:
            best, best_perm = total, perm
    return (best or 0), best_perm


def solve_assignment(costs: np.ndarray) -> tuple[int, tuple[int, ...]]:
    rows, cols = linear_sum_assignment(costs)
    perm = tuple(int(c) for c in cols[np.argsort(rows)])
    return int(costs[rows, cols].sum()), perm


def cpwer(ref: TaggedTranscript, hyp: TaggedTranscript, solver: str = "auto") -> tuple[float, CpwerCounts]:
    """cpWER with unmatched speaker streams costed as whole deletions/insertions.

    ``solver`` is ``"exhaustive"``, ``"assignment"`` or ``"auto"`` (exhaustive
    up to eight streams per side).
    """
    if len(ref) == 0:
        raise UndefinedMetricError("cpWER undefined for an empty reference")
    ref_s, hyp_s = speaker_streams(ref), speaker_streams(hyp)
    ref_labels, hyp_labels = list(ref_s), list(hyp_s)
    costs = _padded_costs([ref_s[s] for s in ref_labels], [hyp_s[s] for s in hyp_labels])
    if solver == "auto":
        solver = "exhaustive" if costs.shape[0] <= EXHAUSTIVE_LIMIT else "assignment"
    if solver == "exhaustive":
        errors, perm = solve_exhaustive(costs)
    elif solver == "assignment":
        errors, perm = solve_assignment(costs)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    assignment = {
        ref_labels[i]: hyp_labels[j]
        for i, j in enumerate(perm)
        if i < len(ref_labels) and j < len(hyp_labels)
    }
    counts = CpwerCounts(errors, len(ref), assignment)
    return errors / len(ref), counts


def corpus_cpwer(pairs: Iterable[tuple[TaggedTranscript, TaggedTranscript]]) -> tuple[float, CpwerCounts]:
    errors = words = 0
    for ref, hyp in pairs:
        _, counts = cpwer(ref, hyp)
        errors += counts.errors
        words += counts.ref_words
    if words == 0:
        raise UndefinedMetricError("cpWER undefined for an empty reference corpus")
    return errors / words, CpwerCounts(errors, words)


def record_table(rows: Sequence[MetricRecord]) -> str:
    """Align ``label  rate (x/y)`` rows the way result tables print them."""
    width = max((len(r.label) for r in rows), default=0)
    return "".join(f"{r.label:<{width}}  {r.percent} ({r.numerator}/{r.denominator})\n" for r in rows)
