"""Deterministic synthetic two-party conversations.

Sessions alternate speakers with geometric turn lengths. Words come from a
small phrase grammar; each speaker in a session gets a topic and a verbal
tic, turns open with discourse markers and questions draw answers, so the
text carries the kind of lexical cues a tagger can use to place turn
boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError
from .rng import substream
from .session import TaggedTranscript, TaggedWord

TOPICS: dict[str, dict[str, tuple[str, ...]]] = {
    "cooking": {
        "nouns": ("recipe", "oven", "garlic", "pasta", "kitchen", "sauce", "dinner", "onions", "butter", "skillet"),
        "verbs": ("cook", "bake", "chop", "taste", "fry", "season"),
    },
    "sports": {
        "nouns": ("team", "coach", "season", "playoffs", "stadium", "referee", "pitcher", "score", "league", "jersey"),
        "verbs": ("play", "watch", "coach", "train", "cheer", "score"),
    },
    "travel": {
        "nouns": ("flight", "airport", "hotel", "passport", "beach", "luggage", "ticket", "island", "train", "museum"),
        "verbs": ("travel", "visit", "book", "pack", "fly", "explore"),
    },
    "work": {
        "nouns": ("manager", "office", "meeting", "deadline", "project", "salary", "client", "budget", "report", "schedule"),
        "verbs": ("work", "hire", "manage", "finish", "present", "plan"),
    },
    "music": {
        "nouns": ("guitar", "concert", "album", "drummer", "piano", "festival", "melody", "band", "singer", "lyrics"),
        "verbs": ("play", "sing", "record", "listen", "practice", "perform"),
    },
    "family": {
        "nouns": ("brother", "sister", "cousin", "grandmother", "wedding", "kids", "parents", "birthday", "uncle", "nephew"),
        "verbs": ("visit", "call", "raise", "help", "miss", "celebrate"),
    },
    "health": {
        "nouns": ("doctor", "clinic", "exercise", "diet", "vitamins", "sleep", "nurse", "allergy", "gym", "therapy"),
        "verbs": ("exercise", "rest", "recover", "stretch", "jog", "eat"),
    },
    "technology": {
        "nouns": ("computer", "phone", "software", "laptop", "internet", "password", "printer", "website", "battery", "network"),
        "verbs": ("install", "fix", "update", "download", "charge", "program"),
    },
    "pets": {
        "nouns": ("puppy", "kitten", "veterinarian", "leash", "aquarium", "parrot", "collar", "hamster", "kennel", "treats"),
        "verbs": ("walk", "feed", "groom", "adopt", "train", "pet"),
    },
    "weather": {
        "nouns": ("rain", "snow", "thunder", "forecast", "umbrella", "sunshine", "storm", "humidity", "winter", "summer"),
        "verbs": ("shovel", "freeze", "sweat", "drive", "wait", "hike"),
    },
    "names": {
        "nouns": ("jupiter", "philadelphia", "farnoosh", "chicago", "katherine", "stephen", "brooklyn", "seattle", "phoenix", "michael"),
        "verbs": ("meet", "remember", "call", "visit", "know", "like"),
    },
}

TICS = (("you", "know"), ("i", "mean"), ("like",), ("basically",), ("actually",), ("honestly",), ("kind", "of"), ("sort", "of"))
OPENERS = (("well",), ("so",), ("oh",), ("yeah",), ("okay",), ("um",), ("uh",), ("right",), ("and",), ("but",))
ANSWERS = (("yeah",), ("no",), ("oh", "yeah"), ("well",), ("i", "guess"), ("definitely",), ("not", "really"))
QUESTIONS = (("do", "you"), ("what", "about", "you"), ("right",), ("have", "you"), ("you", "think"), ("is", "that", "right"))
BACKCHANNELS = {1: (("yeah",), ("right",), ("okay",), ("mhm",), ("wow",), ("really",), ("sure",)),
                2: (("uh", "huh"), ("oh", "wow"), ("i", "see"), ("oh", "really"), ("yeah", "yeah"), ("that's", "true"))}
SUBJECTS = ("i", "we", "you", "they", "my", "our")
AUX = ("really", "usually", "always", "never", "sometimes", "still", "probably", "just")
DETS = ("the", "a", "that", "this", "some", "my")
LINKS = ("with", "at", "for", "after", "before", "near")
FILLERS = ("and", "then", "because", "but", "so")


@dataclass(frozen=True)
class SyntheticDialogSpec:
    num_sessions: int = 2000
    speakers: int = 2
    mean_turn_length: float = 12.0
    min_turns: int = 10
    max_turns: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.num_sessions < 1 or self.speakers < 2:
            raise ConfigurationError("need at least one session and two speakers")
        if self.mean_turn_length < 1.0:
            raise ConfigurationError("mean turn length must be at least 1")
        if not 2 <= self.min_turns <= self.max_turns:
            raise ConfigurationError("need 2 <= min_turns <= max_turns")


def _pick(rng: np.random.Generator, items: Sequence):
    return items[int(rng.integers(len(items)))]


def _clause(rng: np.random.Generator, topic: dict) -> list[str]:
    words = [_pick(rng, SUBJECTS)]
    if rng.random() < 0.5:
        words.append(_pick(rng, AUX))
    words += [_pick(rng, topic["verbs"]), _pick(rng, DETS), _pick(rng, topic["nouns"])]
    if rng.random() < 0.4:
        words += [_pick(rng, LINKS), _pick(rng, DETS), _pick(rng, topic["nouns"])]
    return words


@dataclass(frozen=True)
class Persona:
    topic: dict
    tic: tuple[str, ...]


def _turn(rng: np.random.Generator, length: int, persona: Persona, answering: bool) -> tuple[list[str], bool]:
    """Exactly ``length`` words; also reports whether the turn ends in a question."""
    if length <= 2:
        return list(_pick(rng, BACKCHANNELS[length])), False
    head = list(_pick(rng, ANSWERS if answering else OPENERS)) if answering or rng.random() < 0.6 else []
    tail = list(_pick(rng, QUESTIONS)) if rng.random() < 0.3 else []
    if len(head) + len(tail) >= length:
        tail = []
        head = head[: length - 1]
    body: list[str] = []
    need = length - len(head) - len(tail)
    while len(body) < need:
        if body:
            body.append(_pick(rng, FILLERS))
        if rng.random() < 0.35:
            body += list(persona.tic)
        body += _clause(rng, persona.topic)
    return head + body[:need] + tail, bool(tail)


def generate_session(spec: SyntheticDialogSpec, index: int) -> TaggedTranscript:
    rng = substream(spec.seed, "corpus", index)
    labels = [f"spk{k + 1}" for k in range(spec.speakers)]
    topics = rng.choice(len(TOPICS), size=spec.speakers, replace=False)
    tics = rng.choice(len(TICS), size=spec.speakers, replace=False)
    names = sorted(TOPICS)
    personas = [Persona(TOPICS[names[t]], TICS[c]) for t, c in zip(topics, tics)]
    n_turns = int(rng.integers(spec.min_turns, spec.max_turns + 1))
    speaker = int(rng.integers(spec.speakers))
    words: list[TaggedWord] = []
    question = False
    for _ in range(n_turns):
        length = int(rng.geometric(1.0 / spec.mean_turn_length))
        texts, question = _turn(rng, length, personas[speaker], question)
        words += [TaggedWord(t, labels[speaker]) for t in texts]
        others = [k for k in range(spec.speakers) if k != speaker]
        speaker = others[int(rng.integers(len(others)))]
    return TaggedTranscript(tuple(words), f"s{index:05d}")


def generate_corpus(spec: SyntheticDialogSpec) -> list[TaggedTranscript]:
    """All sessions of ``spec``; session ``i`` depends only on (seed, i)."""
    return [generate_session(spec, i) for i in range(spec.num_sessions)]


def split_corpus(
    sessions: Sequence[TaggedTranscript], fractions: Sequence[float], seed: int = 0
) -> list[list[TaggedTranscript]]:
    """Shuffle deterministically and cut into parts of the given fractions."""
    if abs(sum(fractions) - 1.0) > 1e-9 or min(fractions) < 0:
        raise ConfigurationError("split fractions must be non-negative and sum to 1")
    order = substream(seed, "split").permutation(len(sessions))
    cuts = np.round(np.cumsum(fractions) * len(sessions)).astype(int)
    parts, lo = [], 0
    for hi in cuts:
        parts.append([sessions[i] for i in order[lo:hi]])
        lo = hi
    return parts


def corpus_words(sessions: Sequence[TaggedTranscript]) -> list[str]:
    return sorted({w for s in sessions for w in s.texts})
