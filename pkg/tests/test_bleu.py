import math

import pytest
from hypothesis import given, strategies as st

from sectag.bleu import bleu, corpus_stats
from sectag.errors import UndefinedMetricError


def test_identity_scores_one():
    refs = [list("hello"), list("ab"), list("x")]
    assert bleu(refs, refs) == 1.0


def test_four_token_example_by_hand():
    # clipped precisions 3/4, 2/3, 1/2 and 0/1; the 4-gram order exists but has no match
    matches, totals, _, _ = corpus_stats([list("abcd")], [list("abce")])
    assert (matches, totals) == ([3, 2, 1, 0], [4, 3, 2, 1])
    assert bleu([list("abcd")], [list("abce")]) == 0.0


def test_short_hypothesis_drops_missing_orders():
    # 3-token hypothesis has no 4-grams: mean over orders 1-3, all precisions 1
    expected = math.exp(1 - 4 / 3)
    assert bleu([list("abcd")], [list("abc")]) == pytest.approx(expected, abs=1e-12)


def test_disjoint_tokens_score_zero():
    assert bleu([list("abc")], [list("xyz")]) == 0.0


def test_empty_corpus_undefined():
    with pytest.raises(UndefinedMetricError):
        bleu([], [])


def test_no_brevity_penalty_for_longer_hypothesis():
    # precisions 4/5, 3/4, 2/3, 1/2 and no penalty since the hypothesis is longer
    assert bleu([list("abcd")], [list("abcdx")]) == pytest.approx((4 / 5 * 3 / 4 * 2 / 3 * 1 / 2) ** 0.25, abs=1e-12)


@given(st.lists(st.sampled_from("abcd"), min_size=1, max_size=8), st.data())
def test_corrupting_a_token_never_raises_score(tokens, data):
    i = data.draw(st.integers(0, len(tokens) - 1))
    corrupted = list(tokens)
    corrupted[i] = "#"
    assert bleu([tokens], [corrupted]) <= bleu([tokens], [tokens])
