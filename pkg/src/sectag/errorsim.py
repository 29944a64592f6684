"""Synthetic speaker-tag and word errors for training and evaluating the corrector.

Speaker errors move words across a speaker change point (two-speaker
inputs) or split a prefix/suffix off to a new speaker (one-speaker inputs).
Word errors replace a token with one of its alternate spellings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, UnsupportedInputError
from .session import TaggedTranscript, turns_of

AlternateFn = Callable[[str], Sequence]


@dataclass(frozen=True)
class SimConfig:
    p_word_sub: float = 0.1
    p_zero: float = 0.40
    p_one: float = 0.48
    p_two: float = 0.12
    max_shift: int = 3
    seed: int = 0
    alternate_sampling: str = "uniform"  # or "score"

    def __post_init__(self):
        if abs(self.p_zero + self.p_one + self.p_two - 1.0) > 1e-9:
            raise ConfigurationError("speaker-error probabilities must sum to 1")
        if min(self.p_zero, self.p_one, self.p_two) < 0:
            raise ConfigurationError("speaker-error probabilities must be non-negative")
        if not 0.0 <= self.p_word_sub <= 1.0:
            raise ConfigurationError("p_word_sub must lie in [0, 1]")
        if self.max_shift < 1:
            raise ConfigurationError("max_shift must be at least 1")
        if self.alternate_sampling not in ("uniform", "score"):
            raise ConfigurationError(f"unknown alternate sampling {self.alternate_sampling!r}")


@dataclass(frozen=True)
class SpeakerErrorEvent:
    kind: str  # "shift", "prefix" or "suffix"
    index: int  # original boundary for shifts, 0 / len for prefix / suffix
    size: int  # signed for shifts: >0 moves the boundary right


@dataclass(frozen=True)
class SpeakerErrorDraw:
    drawn: int
    events: tuple[SpeakerErrorEvent, ...]


@dataclass(frozen=True)
class TrainingExample:
    tokens: tuple[str, ...]
    input_tags: tuple[int, ...]
    target_tags: tuple[int, ...]

    def __post_init__(self):
        if not len(self.tokens) == len(self.input_tags) == len(self.target_tags):
            raise ValueError("tokens and tag sequences must have equal length")

    def __len__(self):
        return len(self.tokens)


def draw_error_count(rng: np.random.Generator, config: SimConfig) -> int:
    u = rng.random()
    if u < config.p_zero:
        return 0
    if u < config.p_zero + config.p_one:
        return 1
    return 2


def _run_left(tags: list, b: int) -> int:
    i = b - 1
    while i > 0 and tags[i - 1] == tags[b - 1]:
        i -= 1
    return b - i


def _run_right(tags: list, b: int) -> int:
    j = b
    while j + 1 < len(tags) and tags[j + 1] == tags[b]:
        j += 1
    return j - b + 1


def simulate_speaker_errors(
    tags: Sequence[int],
    rng: np.random.Generator,
    config: SimConfig = SimConfig(),
    log: Optional[list] = None,
) -> list[int]:
    """Corrupt a 0/1 speaker-index sequence with up to two boundary errors.

    Each error never empties a speaker run, and two errors always hit
    distinct sites. ``log`` (if given) receives one ``SpeakerErrorDraw``.
    """
    tags = list(tags)
    values = set(tags)
    if len(values) > 2:
        raise UnsupportedInputError(f"expected at most two speakers, found {len(values)}")
    if not values <= {0, 1}:
        raise UnsupportedInputError("speaker indices must be 0 or 1")
    k = draw_error_count(rng, config)
    events = []
    if k and tags:
        if len(values) == 2:
            events = _shift_boundaries(tags, k, rng, config.max_shift)
        else:
            events = _split_edges(tags, k, rng, config.max_shift)
    if log is not None:
        log.append(SpeakerErrorDraw(k, tuple(events)))
    return tags


def _shift_boundaries(tags: list[int], k: int, rng: np.random.Generator, max_shift: int) -> list[SpeakerErrorEvent]:
    points = [i for i in range(1, len(tags)) if tags[i] != tags[i - 1]]
    sites = rng.choice(len(points), size=min(k, len(points)), replace=False)
    events = []
    for site in sites:
        b = points[int(site)]
        go_right = bool(rng.integers(2))
        d = int(rng.integers(1, max_shift + 1))
        right_room = _run_right(tags, b) - 1
        left_room = _run_left(tags, b) - 1
        if go_right and right_room == 0 or not go_right and left_room == 0:
            go_right = not go_right
        step = min(d, right_room if go_right else left_room)
        if step == 0:
            continue
        if go_right:
            tags[b : b + step] = [tags[b - 1]] * step
            events.append(SpeakerErrorEvent("shift", b, step))
        else:
            tags[b - step : b] = [tags[b]] * step
            events.append(SpeakerErrorEvent("shift", b, -step))
    return events


def _split_edges(tags: list[int], k: int, rng: np.random.Generator, max_shift: int) -> list[SpeakerErrorEvent]:
    n = len(tags)
    other = 1 - tags[0]
    if k == 1:
        sides = ["suffix"] if rng.integers(2) else ["prefix"]
    else:
        sides = ["prefix", "suffix"]
    room = n - 1
    events = []
    for side in sides:
        d = min(int(rng.integers(1, max_shift + 1)), room)
        if d == 0:
            continue
        room -= d
        if side == "prefix":
            tags[:d] = [other] * d
            events.append(SpeakerErrorEvent("prefix", 0, d))
        else:
            tags[n - d :] = [other] * d
            events.append(SpeakerErrorEvent("suffix", n, d))
    return events


def _alternate_text(candidate) -> str:
    return candidate if isinstance(candidate, str) else candidate.word


def simulate_word_errors(
    tokens: Sequence[str],
    alternates: AlternateFn,
    rng: np.random.Generator,
    config: SimConfig = SimConfig(),
    log: Optional[list] = None,
) -> list[str]:
    """Replace each token, with probability ``p_word_sub``, by one of its alternates.

    One uniform draw is consumed per token whether or not it is replaced.
    ``log`` (if given) receives ``(index, old, new)`` for each replacement.
    """
    out = list(tokens)
    draws = rng.random(len(out))
    for i, u in enumerate(draws):
        if u >= config.p_word_sub:
            continue
        candidates = list(alternates(out[i]))
        if not candidates:
            continue
        if config.alternate_sampling == "score":
            weights = np.array([max(getattr(c, "score", 1.0), 0.0) for c in candidates], dtype=float)
            if weights.sum() <= 0:
                weights = np.ones(len(candidates))
            pick = int(rng.choice(len(candidates), p=weights / weights.sum()))
        else:
            pick = int(rng.integers(len(candidates)))
        new = _alternate_text(candidates[pick])
        if log is not None:
            log.append((i, out[i], new))
        out[i] = new
    return out


def speaker_indices(labels: Sequence[str]) -> list[int]:
    """Index speakers by order of first appearance."""
    order = {s: k for k, s in enumerate(dict.fromkeys(labels))}
    return [order[s] for s in labels]


def make_training_example(
    window: TaggedTranscript,
    config: SimConfig,
    alternates: Optional[AlternateFn],
    rng: np.random.Generator,
) -> TrainingExample:
    target = speaker_indices(window.tags)
    if len(set(target)) > 2:
        raise UnsupportedInputError("training windows must contain one or two speakers")
    input_tags = simulate_speaker_errors(target, rng, config)
    tokens = window.texts
    if alternates is not None and config.p_word_sub > 0:
        tokens = simulate_word_errors(tokens, alternates, rng, config)
    return TrainingExample(tuple(tokens), tuple(input_tags), tuple(target))


@dataclass(frozen=True)
class WindowSampler:
    """Draw reference spans for training, with lengths uniform on ``mean +- spread``.

    Most spans straddle at least one speaker change; a fraction
    ``p_single`` are taken from inside a single turn when the session has
    a turn long enough, so one-speaker inputs are seen as well.
    """

    mean_length: int = 30
    spread: int = 12
    p_single: float = 0.15

    def __post_init__(self):
        if self.spread < 0 or self.mean_length - self.spread < 2:
            raise ConfigurationError("window lengths must be at least 2")

    def sample(self, sessions: Sequence[TaggedTranscript], rng: np.random.Generator) -> TaggedTranscript:
        length = int(rng.integers(self.mean_length - self.spread, self.mean_length + self.spread + 1))
        single = rng.random() < self.p_single
        for _ in range(100):
            session = sessions[int(rng.integers(len(sessions)))]
            n = len(session)
            if n < length:
                continue
            turns = turns_of(session)
            if single:
                long_turns = [t for t in turns if len(t) >= length]
                if long_turns:
                    turn = long_turns[int(rng.integers(len(long_turns)))]
                    start = int(rng.integers(turn.start, turn.stop - length + 1))
                    return _slice(session, start, start + length)
            if len(turns) < 2:
                continue
            b = turns[int(rng.integers(1, len(turns)))].start
            lo, hi = max(0, b - length + 1), min(b - 1, n - length)
            if lo > hi:
                continue
            start = int(rng.integers(lo, hi + 1))
            return _slice(session, start, start + length)
        raise ConfigurationError(f"no session can supply a window of {length} words")


def _slice(session: TaggedTranscript, start: int, stop: int) -> TaggedTranscript:
    return TaggedTranscript(session.words[start:stop], session.session_id)


@dataclass
class CorruptionLog:
    session_id: str
    speaker_draws: list = field(default_factory=list)
    word_substitutions: list = field(default_factory=list)


def corrupt_session(
    session: TaggedTranscript,
    config: SimConfig,
    alternates: Optional[AlternateFn],
    rng: np.random.Generator,
) -> tuple[TaggedTranscript, CorruptionLog]:
    """Corrupt a whole multi-turn session.

    Every speaker junction is handed to ``simulate_speaker_errors`` as a
    two-turn input (left turn + right turn, read from the current tags),
    from left to right; word substitutions then run over all tokens.
    """
    log = CorruptionLog(session.session_id)
    tags = session.tags
    for turn in turns_of(session)[1:]:
        b = turn.start
        lo = b - _run_left(tags, b)
        hi = b + _run_right(tags, b)
        left, right = tags[b - 1], tags[b]
        local = [0 if t == left else 1 for t in tags[lo:hi]]
        local = simulate_speaker_errors(local, rng, config, log.speaker_draws)
        tags[lo:hi] = [left if t == 0 else right for t in local]
    texts = session.texts
    if alternates is not None and config.p_word_sub > 0:
        texts = simulate_word_errors(texts, alternates, rng, config, log.word_substitutions)
    return session.with_tags(tags).with_texts(texts), log

