"""Confusion lexicon built from ASR error pairs, and n-best alternate spellings.

The lexicon has two parts: word-level alternates observed in the error
pairs, ranked by count, and a phone confusion matrix estimated from
phone-level alignments of the same pairs. Words the lexicon has not seen
get alternates synthesized from single phone confusions.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from ..align import DELETION, align, edit_distance
from ..bleu import bleu
from ..errors import ParseError, UndefinedMetricError, ValidationError
from .g2p import EmptyPronunciationError, PhonemeSeq, Pronunciations, RuleTable, default_rules, g2p

GAP = "<gap>"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class ErrorPair:
    ref_word: str
    hyp_word: str
    count: int = 1

    def __post_init__(self):
        if self.ref_word == self.hyp_word:
            raise ValidationError(f"error pair repeats the reference word {self.ref_word!r}")
        if self.count < 1:
            raise ValidationError(f"error pair count must be positive, got {self.count}")


@dataclass(frozen=True)
class AlternateCandidate:
    word: str
    score: float


def parse_error_pairs(text: str) -> list[ErrorPair]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected ref<TAB>hyp<TAB>count, found {len(fields)} fields", lineno)
        try:
            count = int(fields[2])
        except ValueError:
            raise ParseError(f"non-integer count {fields[2]!r}", lineno) from None
        try:
            pairs.append(ErrorPair(fields[0].strip(), fields[1].strip(), count))
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    return pairs


def format_error_pairs(pairs: Iterable[ErrorPair]) -> str:
    return "".join(f"{p.ref_word}\t{p.hyp_word}\t{p.count}\n" for p in pairs)


def phone_distance_ratio(ref_phones: PhonemeSeq, hyp_phones: PhonemeSeq) -> float:
    """Phone edit distance over the longer pronunciation's length."""
    longest = max(len(ref_phones), len(hyp_phones))
    if longest == 0:
        return 0.0
    return edit_distance(ref_phones, hyp_phones) / longest


def phonetic_filter(
    pairs: Iterable[ErrorPair],
    pronunciations: Optional[Pronunciations] = None,
    max_ratio: float = 0.5,
    rules: Optional[RuleTable] = None,
) -> list[ErrorPair]:
    """Keep pairs whose phone edit-distance ratio is at most ``max_ratio``.

    Pairs where either word cannot be pronounced are dropped.
    """
    kept = []
    for pair in pairs:
        try:
            ratio = phone_distance_ratio(
                g2p(pair.ref_word, pronunciations, rules), g2p(pair.hyp_word, pronunciations, rules)
            )
        except EmptyPronunciationError:
            continue
        if ratio <= max_ratio:
            kept.append(pair)
    return kept


@dataclass
class ConfusionLexicon:
    entries: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    matrix: dict[str, dict[str, float]] = field(default_factory=dict)

    def save(self, path) -> None:
        lines = [f"#sectag-confusion-lexicon\tversion={FORMAT_VERSION}"]
        for ref in sorted(self.entries):
            lines += [f"W\t{ref}\t{alt}\t{score!r}" for alt, score in self.entries[ref]]
        for a in sorted(self.matrix):
            lines += [f"P\t{a}\t{b}\t{p!r}" for b, p in sorted(self.matrix[a].items())]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ConfusionLexicon":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines or not lines[0].startswith("#sectag-confusion-lexicon"):
            raise ParseError("missing lexicon header", 1)
        version = lines[0].split("version=")[-1]
        if version != str(FORMAT_VERSION):
            raise ParseError(f"unsupported lexicon version {version}", 1)
        lex = cls()
        for lineno, line in enumerate(lines[1:], start=2):
            fields = line.split("\t")
            if len(fields) != 4 or fields[0] not in ("W", "P"):
                raise ParseError("malformed lexicon record", lineno)
            if fields[0] == "W":
                lex.entries.setdefault(fields[1], []).append((fields[2], float(fields[3])))
            else:
                lex.matrix.setdefault(fields[1], {})[fields[2]] = float(fields[3])
        return lex


def _phone_alignment(ref: PhonemeSeq, hyp: PhonemeSeq) -> list[tuple[str, str]]:
    pairs = []
    for op in align(ref, hyp):
        if op.kind == DELETION:
            pairs.append((ref[op.ref_index], GAP))
        elif op.paired:
            pairs.append((ref[op.ref_index], hyp[op.hyp_index]))
    return pairs


def build_confusion_lexicon(
    pairs: Iterable[ErrorPair],
    pronunciations: Optional[Pronunciations] = None,
    rules: Optional[RuleTable] = None,
) -> ConfusionLexicon:
    """Rank alternates per word by count and estimate phone confusions.

    Matrix rows are add-one smoothed over the targets observed for that
    phone (including the phone itself and ``GAP``), so each row sums to 1.
    """
    word_counts: dict[str, Counter] = defaultdict(Counter)
    phone_counts: dict[str, Counter] = defaultdict(Counter)
    for pair in pairs:
        word_counts[pair.ref_word][pair.hyp_word] += pair.count
        try:
            ref_ph = g2p(pair.ref_word, pronunciations, rules)
            hyp_ph = g2p(pair.hyp_word, pronunciations, rules)
        except EmptyPronunciationError:
            continue
        for a, b in _phone_alignment(ref_ph, hyp_ph):
            phone_counts[a][b] += pair.count

    entries = {}
    for ref, counts in word_counts.items():
        total = sum(counts.values())
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        entries[ref] = [(alt, c / total) for alt, c in ranked]
    matrix = {}
    for a, counts in phone_counts.items():
        denom = sum(counts.values()) + len(counts)
        matrix[a] = {b: (c + 1) / denom for b, c in counts.items()}
    return ConfusionLexicon(entries, matrix)


def _synthesize(
    word: str, lexicon: ConfusionLexicon, rules: RuleTable
) -> list[AlternateCandidate]:
    chunks = rules.segment(word)
    scored: dict[str, float] = {}
    for ci, (graphemes, phones) in enumerate(chunks):
        for pi, phone in enumerate(phones):
            for target, prob in lexicon.matrix.get(phone, {}).items():
                if target == phone:
                    continue
                new_phones = list(phones)
                if target == GAP:
                    del new_phones[pi]
                else:
                    new_phones[pi] = target
                spelled = rules.spell(tuple(new_phones))
                if spelled == graphemes:
                    continue
                candidate ="".join(c[0] for c in chunks[:ci]) + spelled + "".join(c[0] for c in chunks[ci + 1 :])
                if candidate and candidate != word and prob > scored.get(candidate, -1.0):
                    scored[candidate] = prob
    ranked = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))
    return [AlternateCandidate(w, s) for w, s in ranked]


def generate_alternates(
    word: str,
    lexicon: ConfusionLexicon,
    k: int = 3,
    rules: Optional[RuleTable] = None,
) -> list[AlternateCandidate]:
    """Up to ``k`` alternate spellings, best first; never includes ``word``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if word in lexicon.entries:
        seen = [AlternateCandidate(w, s) for w, s in lexicon.entries[word] if w != word]
        return seen[:k]
    return _synthesize(word, lexicon, rules or default_rules())[:k]


class LexiconGenerator:
    """Callable ``word -> k-best alternates`` backed by a confusion lexicon."""

    def __init__(self, lexicon: ConfusionLexicon, k: int = 3, rules: Optional[RuleTable] = None):
        self.lexicon = lexicon
        self.k = k
        self.rules = rules or default_rules()
        self._cached = lru_cache(maxsize=None)(self._generate)

    def _generate(self, word: str) -> tuple[AlternateCandidate, ...]:
        return tuple(generate_alternates(word, self.lexicon, self.k, self.rules))

    def __call__(self, word: str) -> list[AlternateCandidate]:
        return list(self._cached(word))

    def top1(self, word: str) -> str:
        best = self._cached(word)
        return best[0].word if best else word


class IdentityGenerator:
    """Baseline that always predicts the input word."""

    def __call__(self, word: str) -> list[AlternateCandidate]:
        return []

    def top1(self, word: str) -> str:
        return word


@dataclass(frozen=True)
class GeneratorReport:
    bleu: float
    identity_bleu: float
    pairs: int


def word_pieces(word: str) -> list[str]:
    return list(word)


def evaluate_generator(generator, test_pairs: Sequence[ErrorPair]) -> GeneratorReport:
    """Character-level corpus BLEU of top-1 predictions against observed alternates.

    Each pair counts ``count`` times. ``generator`` needs a ``top1(word)`` method
    or is called and its first candidate used.
    """
    if not test_pairs:
        raise UndefinedMetricError("cannot evaluate a generator on an empty test set")
    top1: Callable[[str], str]
    if hasattr(generator, "top1"):
        top1 = generator.top1
    else:
        def top1(word):
            best = list(generator(word))
            if not best:
                return word
            return best[0] if isinstance(best[0], str) else best[0].word

    refs, hyps, ident = [], [], []
    for pair in test_pairs:
        target = word_pieces(pair.hyp_word)
        guess = word_pieces(top1(pair.ref_word))
        for _ in range(pair.count):
            refs.append(target)
            hyps.append(guess)
            ident.append(word_pieces(pair.ref_word))
    return GeneratorReport(bleu(refs, hyps), bleu(refs, ident), len(test_pairs))
