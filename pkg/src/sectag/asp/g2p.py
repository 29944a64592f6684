"""Grapheme-to-phoneme conversion: lexicon lookup with a letter-rule fallback."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from ..errors import ValidationError

PHONES = frozenset(
    "AA AE AH AO AW AY B CH D DH EH ER EY F G HH IH IY JH K L M N NG "
    "OW OY P R S SH T TH UH UW V W Y Z ZH".split()
)

PhonemeSeq = tuple[str, ...]
Pronunciations = Mapping[str, PhonemeSeq]


class EmptyPronunciationError(ValidationError):
    pass


@dataclass(frozen=True)
class Rule:
    pattern: str
    phones: PhonemeSeq
    at_start: bool = False
    at_end: bool = False

    def matches(self, word: str, i: int) -> bool:
        if not word.startswith(self.pattern, i):
            return False
        if self.at_start and i != 0:
            return False
        if self.at_end and i + len(self.pattern) != len(word):
            return False
        # a silent rule never swallows the only vowel of a short word ("be", "the")
        if not self.phones and i < 2:
            return False
        return True


class RuleTable:
    """Longest-match letter rules plus a phone-to-spelling table."""

    def __init__(self, rules: list[Rule], p2g: dict[str, str]):
        self.rules = sorted(rules, key=lambda r: (-len(r.pattern), -(r.at_start or r.at_end)))
        self.p2g = p2g

    def segment(self, word: str) -> list[tuple[str, PhonemeSeq]]:
        """Split ``word`` into grapheme chunks, each with the phones it produces.

        Characters no rule covers (digits, apostrophes) become chunks with no phones.
        """
        chunks = []
        i = 0
        while i < len(word):
            for rule in self.rules:
                if rule.matches(word, i):
                    chunks.append((rule.pattern, rule.phones))
                    i += len(rule.pattern)
                    break
            else:
                chunks.append((word[i], ()))
                i += 1
        return chunks

    def phones(self, word: str) -> PhonemeSeq:
        return tuple(p for _, phones in self.segment(word) for p in phones)

    def spell(self, phones: PhonemeSeq) -> str:
        return "".join(self.p2g[p] for p in phones)


def parse_rule_table(text: str) -> RuleTable:
    rules, p2g = [], {}
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            section = line.strip("[]")
            continue
        left, right = line.split(None, 1)
        if section == "g2p":
            phones = () if right.strip() == "-" else tuple(right.split())
            unknown = set(phones) - PHONES
            if unknown:
                raise ValidationError(f"rule {left!r} uses unknown phones {sorted(unknown)}")
            rules.append(
                Rule(left.strip("^$"), phones, at_start=left.startswith("^"), at_end=left.endswith("$"))
            )
        elif section == "p2g":
            p2g[left] = right.strip()
    return RuleTable(rules, p2g)


@lru_cache(maxsize=None)
def default_rules() -> RuleTable:
    text = resources.files("sectag.asp").joinpath("data/g2p_rules.txt").read_text(encoding="utf-8")
    return parse_rule_table(text)


_STRESS = re.compile(r"\d")


def parse_pronunciations(text: str) -> dict[str, PhonemeSeq]:
    """Read ``WORD  PH1 PH2 ...`` lines; stress digits are stripped, first variant kept."""
    table: dict[str, PhonemeSeq] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(";;;") or line.startswith("#"):
            continue
        fields = line.split()
        word = re.sub(r"\(\d+\)$", "", fields[0]).lower()
        phones = tuple(_STRESS.sub("", p) for p in fields[1:])
        if word not in table and phones:
            table[word] = phones
    return table


def load_pronunciations(path) -> dict[str, PhonemeSeq]:
    return parse_pronunciations(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def default_pronunciations() -> dict[str, PhonemeSeq]:
    text = resources.files("sectag.asp").joinpath("data/lexicon.txt").read_text(encoding="utf-8")
    return parse_pronunciations(text)


def g2p(word: str, lexicon: Optional[Pronunciations] = None, rules: Optional[RuleTable] = None) -> PhonemeSeq:
    if not any(c.isalpha() for c in word):
        raise EmptyPronunciationError(f"{word!r} has no letters to pronounce")
    lexicon = default_pronunciations() if lexicon is None else lexicon
    if word in lexicon:
        return tuple(lexicon[word])
    phones = (rules or default_rules()).phones(word)
    if not phones:
        raise EmptyPronunciationError(f"no pronunciation for {word!r}")
    return phones
