import pytest

from sectag.asp.g2p import EmptyPronunciationError, g2p, parse_pronunciations
from sectag.asp.lexicon import (
    GAP,
    ConfusionLexicon,
    ErrorPair,
    IdentityGenerator,
    LexiconGenerator,
    build_confusion_lexicon,
    evaluate_generator,
    format_error_pairs,
    generate_alternates,
    parse_error_pairs,
    phone_distance_ratio,
    phonetic_filter,
)
from sectag.asp.synth import confusion_profiles, sample_error_pairs
from sectag.errors import ParseError, UndefinedMetricError, ValidationError
from sectag.rng import substream

from fixtures import FILTER_CASES, PRONUNCIATIONS


def test_bundled_pronunciation():
    assert g2p("cat") == ("K", "AE", "T")


def test_rules_cover_unknown_words():
    assert len(g2p("blorptastic")) > 0


def test_unpronounceable_word():
    with pytest.raises(EmptyPronunciationError):
        g2p("123")


def test_pronunciation_parser_strips_stress_and_variants():
    table = parse_pronunciations(";;; comment\nREAD  R IY1 D\nREAD(1)  R EH1 D\n")
    assert table == {"read": ("R", "IY", "D")}


@pytest.mark.parametrize("ref, hyp, ratio, kept", FILTER_CASES)
def test_filter_fixture(ref, hyp, ratio, kept):
    assert phone_distance_ratio(PRONUNCIATIONS[ref], PRONUNCIATIONS[hyp]) == pytest.approx(ratio)
    survivors = phonetic_filter([ErrorPair(ref, hyp)], PRONUNCIATIONS)
    assert bool(survivors) is kept


def test_filter_threshold_is_inclusive():
    pair = [ErrorPair("to", "do")]
    assert phonetic_filter(pair, PRONUNCIATIONS, max_ratio=0.5) == pair
    assert phonetic_filter(pair, PRONUNCIATIONS, max_ratio=0.49) == []


def test_error_pair_parsing():
    pairs = parse_error_pairs("cat\tbat\t3\n\ncat\tcap\t1\n")
    assert pairs == [ErrorPair("cat", "bat", 3), ErrorPair("cat", "cap", 1)]
    assert parse_error_pairs(format_error_pairs(pairs)) == pairs
    with pytest.raises(ParseError):
        parse_error_pairs("cat bat 3\n")
    with pytest.raises(ValidationError):
        parse_error_pairs("cat\tcat\t3\n")


def lexicon():
    pairs = [ErrorPair("cat", "bat", 3), ErrorPair("cat", "cap", 1), ErrorPair("boat", "coat", 2)]
    return build_confusion_lexicon(pairs, PRONUNCIATIONS)


def test_lexicon_ranks_by_relative_frequency():
    assert lexicon().entries["cat"] == [("bat", 0.75), ("cap", 0.25)]


def test_k_best_contract():
    lex = lexicon()
    assert [c.word for c in generate_alternates("cat", lex, k=1)] == ["bat"]
    assert [c.word for c in generate_alternates("cat", lex, k=3)] == ["bat", "cap"]


def test_matrix_rows_sum_to_one():
    lex = lexicon()
    assert lex.matrix
    for row in lex.matrix.values():
        assert sum(row.values()) == pytest.approx(1.0)


def test_unseen_word_alternates_come_from_phone_confusions():
    lex = ConfusionLexicon({}, {"K": {"K": 0.5, "G": 0.4, GAP: 0.1}})
    words = [c.word for c in generate_alternates("kit", lex)]
    assert words and "kit" not in words
    scores = [c.score for c in generate_alternates("kit", lex)]
    assert scores == sorted(scores, reverse=True)


def test_lexicon_round_trip(tmp_path):
    lex = lexicon()
    lex.save(tmp_path / "lex.txt")
    assert ConfusionLexicon.load(tmp_path / "lex.txt") == lex


def test_lexicon_load_rejects_garbage(tmp_path):
    (tmp_path / "bad.txt").write_text("nothing here\n")
    with pytest.raises(ParseError):
        ConfusionLexicon.load(tmp_path / "bad.txt")


def test_generators_are_deterministic():
    gen = LexiconGenerator(lexicon())
    assert gen("cat") == gen("cat")
    assert gen.top1("cat") == "bat"
    assert IdentityGenerator().top1("cat") == "cat"


def test_empty_test_set_undefined():
    with pytest.raises(UndefinedMetricError):
        evaluate_generator(IdentityGenerator(), [])


def test_trained_lexicon_beats_identity():
    words = "alpha bravo charlie delta echo foxtrot river mountain station window table".split()
    profiles = confusion_profiles(words, substream(0, "profiles"))
    train = phonetic_filter(sample_error_pairs(profiles, substream(0, "train")))
    test = sample_error_pairs(profiles, substream(0, "test"), p_noise=0.0)
    report = evaluate_generator(LexiconGenerator(build_confusion_lexicon(train)), test)
    assert report.bleu > report.identity_bleu
