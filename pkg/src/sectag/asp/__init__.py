"""Alternate spelling prediction: phonetic filtering, confusion lexicon, n-best alternates."""

from .g2p import EmptyPronunciationError, default_pronunciations, default_rules, g2p, load_pronunciations
from .lexicon import (
    GAP,
    AlternateCandidate,
    ConfusionLexicon,
    ErrorPair,
    IdentityGenerator,
    LexiconGenerator,
    build_confusion_lexicon,
    evaluate_generator,
    generate_alternates,
    parse_error_pairs,
    phone_distance_ratio,
    phonetic_filter,
)

__all__ = [
    "GAP",
    "AlternateCandidate",
    "ConfusionLexicon",
    "EmptyPronunciationError",
    "ErrorPair",
    "IdentityGenerator",
    "LexiconGenerator",
    "build_confusion_lexicon",
    "default_pronunciations",
    "default_rules",
    "evaluate_generator",
    "g2p",
    "generate_alternates",
    "load_pronunciations",
    "parse_error_pairs",
    "phone_distance_ratio",
    "phonetic_filter",
]
