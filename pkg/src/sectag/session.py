"""Words, speaker segments, tagged transcripts and their on-disk formats.

Three formats are read here:

* CTM: ``recording channel start duration word [confidence]``
* RTTM: ten-field ``SPEAKER`` lines; other record types are skipped
* session files: ``speaker<TAB>start<TAB>end<TAB>word`` per line, or the
  text-only variant ``speaker<TAB>word``
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import ParseError, ValidationError

_EDGE_PUNCT = re.compile(r"^[^\w']+|[^\w']+$")


def normalize_text(token: str) -> str:
    """Lowercase and strip surrounding punctuation, keeping apostrophes."""
    return _EDGE_PUNCT.sub("", token.strip().lower())


@dataclass(frozen=True)
class Word:
    text: str
    start: float
    end: float
    confidence: Optional[float] = None

    def __post_init__(self):
        if not self.text or any(c.isspace() for c in self.text):
            raise ValidationError(f"invalid word text {self.text!r}")
        if self.start < 0 or self.end < self.start:
            raise ValidationError(f"invalid word interval [{self.start}, {self.end}] for {self.text!r}")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class SpeakerSegment:
    speaker: str
    start: float
    end: float

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise ValidationError(f"invalid segment [{self.start}, {self.end}] for {self.speaker}")


@dataclass(frozen=True)
class TaggedWord:
    """A word with its speaker label; timings are kept when the source had them."""

    text: str
    speaker: str
    start: Optional[float] = None
    end: Optional[float] = None

    def __post_init__(self):
        if not self.text:
            raise ValidationError("tagged word text must be non-empty")


@dataclass(frozen=True)
class TaggedTranscript:
    words: tuple[TaggedWord, ...]
    session_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))

    def __len__(self):
        return len(self.words)

    @property
    def texts(self) -> list[str]:
        return [w.text for w in self.words]

    @property
    def tags(self) -> list[str]:
        return [w.speaker for w in self.words]

    @property
    def speakers(self) -> list[str]:
        """Speaker labels in order of first appearance."""
        return list(dict.fromkeys(self.tags))

    @property
    def timed(self) -> bool:
        return bool(self.words) and all(w.start is not None for w in self.words)

    def with_tags(self, tags: Sequence[str]) -> "TaggedTranscript":
        if len(tags) != len(self.words):
            raise ValidationError(f"expected {len(self.words)} tags, got {len(tags)}")
        words = [TaggedWord(w.text, t, w.start, w.end) for w, t in zip(self.words, tags)]
        return TaggedTranscript(tuple(words), self.session_id)

    def with_texts(self, texts: Sequence[str]) -> "TaggedTranscript":
        if len(texts) != len(self.words):
            raise ValidationError(f"expected {len(self.words)} texts, got {len(texts)}")
        words = [TaggedWord(x, w.speaker, w.start, w.end) for w, x in zip(self.words, texts)]
        return TaggedTranscript(tuple(words), self.session_id)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]], session_id: str = "") -> "TaggedTranscript":
        """Build from ``(text, speaker)`` pairs."""
        return cls(tuple(TaggedWord(t, s) for t, s in pairs), session_id)


@dataclass(frozen=True)
class Turn:
    """Maximal run of one speaker; ``start``/``stop`` index the transcript (half-open)."""

    speaker: str
    start: int
    stop: int

    def __len__(self):
        return self.stop - self.start

    @property
    def word_range(self) -> range:
        return range(self.start, self.stop)


def turns_of(transcript: TaggedTranscript | Sequence[str]) -> list[Turn]:
    """Group a transcript (or a bare tag list) into maximal same-speaker runs."""
    tags = transcript.tags if isinstance(transcript, TaggedTranscript) else list(transcript)
    turns = []
    start = 0
    for i in range(1, len(tags) + 1):
        if i == len(tags) or tags[i] != tags[start]:
            turns.append(Turn(tags[start], start, i))
            start = i
    return turns


def _data_lines(content: str):
    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";;") or line.startswith("#"):
            continue
        yield lineno, line


def _number(value: str, what: str, lineno: int) -> float:
    try:
        number = float(value)
    except ValueError:
        raise ParseError(f"non-numeric {what} {value!r}", lineno) from None
    if number != number or number in (float("inf"), float("-inf")):
        raise ParseError(f"non-finite {what} {value!r}", lineno)
    return number


def _word_at(text: str, start: float, end: float, conf: Optional[float], lineno: int) -> Word:
    token = normalize_text(text)
    if not token:
        raise ValidationError(f"line {lineno}: token {text!r} is empty after normalization")
    try:
        return Word(token, start, end, conf)
    except ValidationError as exc:
        raise ValidationError(f"line {lineno}: {exc}") from None


def _check_order(words: list[Word], lines: list[int]) -> None:
    for prev, cur, lineno in zip(words, words[1:], lines[1:]):
        if cur.start < prev.start:
            raise ValidationError(
                f"line {lineno}: start time {cur.start} precedes previous start {prev.start}"
            )


def parse_ctm(content: str) -> list[Word]:
    words, lines = [], []
    for lineno, line in _data_lines(content):
        fields = line.split()
        if len(fields) not in (5, 6):
            raise ParseError(f"expected 5 or 6 CTM fields, found {len(fields)}", lineno)
        start = _number(fields[2], "start", lineno)
        duration = _number(fields[3], "duration", lineno)
        conf = _number(fields[5], "confidence", lineno) if len(fields) == 6 else None
        words.append(_word_at(fields[4], start, start + duration, conf, lineno))
        lines.append(lineno)
    _check_order(words, lines)
    return words


def parse_words(content: str, format: str = "ctm") -> list[Word]:
    """Parse word timings from CTM or timed session-file content.

    Raises ParseError for malformed lines and ValidationError when start
    times decrease.
    """
    if format == "ctm":
        return parse_ctm(content)
    if format in ("session", "session-file"):
        transcript = parse_session(content)
        if transcript.words and not transcript.timed:
            raise ParseError("session file has no timings")
        return [Word(w.text, w.start, w.end) for w in transcript.words]
    raise ValueError(f"unknown word format {format!r}")


def parse_segments(content: str) -> list[SpeakerSegment]:
    """Parse RTTM ``SPEAKER`` records into segments, in file order."""
    segments = []
    for lineno, line in _data_lines(content):
        fields = line.split()
        if fields[0] != "SPEAKER":
            continue
        if len(fields) < 8:
            raise ParseError(f"expected 10 RTTM fields, found {len(fields)}", lineno)
        onset = _number(fields[3], "onset", lineno)
        duration = _number(fields[4], "duration", lineno)
        if duration <= 0:
            raise ValidationError(f"line {lineno}: non-positive duration {duration}")
        if onset < 0:
            raise ValidationError(f"line {lineno}: negative onset {onset}")
        segments.append(SpeakerSegment(fields[7], onset, onset + duration))
    return segments


def parse_session(content: str, session_id: str = "") -> TaggedTranscript:
    """Parse a canonical session file (timed or text-only)."""
    words = []
    width = None
    prev_start = None
    for lineno, raw in enumerate(content.splitlines(), start=1):
        if not raw.strip():
            continue
        fields = raw.rstrip("\r\n").split("\t")
        if width is None:
            width = len(fields)
            if width not in (2, 4):
                raise ParseError(f"expected 2 or 4 tab-separated fields, found {width}", lineno)
        elif len(fields) != width:
            raise ParseError(f"expected {width} fields, found {len(fields)}", lineno)
        speaker = fields[0]
        if not speaker:
            raise ParseError("empty speaker label", lineno)
        if width == 2:
            text = normalize_text(fields[1])
            if not text:
                raise ValidationError(f"line {lineno}: empty word")
            words.append(TaggedWord(text, speaker))
            continue
        start = _number(fields[1], "start", lineno)
        end = _number(fields[2], "end", lineno)
        word = _word_at(fields[3], start, end, None, lineno)
        if prev_start is not None and start < prev_start:
            raise ValidationError(f"line {lineno}: start time {start} precedes previous start {prev_start}")
        prev_start = start
        words.append(TaggedWord(word.text, speaker, start, end))
    return TaggedTranscript(tuple(words), session_id)


def format_session(transcript: TaggedTranscript) -> str:
    """Serialize to the canonical session format; timings kept when every word has them."""
    if transcript.timed:
        lines = [f"{w.speaker}\t{w.start!r}\t{w.end!r}\t{w.text}" for w in transcript.words]
    else:
        lines = [f"{w.speaker}\t{w.text}" for w in transcript.words]
    return "".join(line + "\n" for line in lines)


def read_session(path) -> TaggedTranscript:
    path = Path(path)
    return parse_session(path.read_text(encoding="utf-8"), session_id=path.stem)


def write_session(transcript: TaggedTranscript, path) -> None:
    Path(path).write_text(format_session(transcript), encoding="utf-8")


def read_corpus(directory) -> list[TaggedTranscript]:
    """Read every ``*.tsv`` session file in a directory, sorted by name."""
    return [read_session(p) for p in sorted(Path(directory).glob("*.tsv"))]


def write_corpus(sessions: Iterable[TaggedTranscript], directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for session in sessions:
        write_session(session, directory / f"{session.session_id}.tsv")
