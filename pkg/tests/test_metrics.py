import math

import pytest
from hypothesis import given, strategies as st

from sectag.errors import UndefinedMetricError
from sectag.metrics import (
    MetricRecord,
    _padded_costs,
    corpus_cpwer,
    corpus_wder,
    cpwer,
    format_rate,
    record_table,
    solve_assignment,
    solve_exhaustive,
    wder,
)
from sectag.session import TaggedTranscript


def T(words, tags, sid=""):
    return TaggedTranscript.from_pairs(zip(words.split(), tags), sid)


def test_rate_formatting_from_reported_counts():
    assert format_rate(7673, 274398) == "2.80 (7673/274398)"
    assert format_rate(6653, 274398) == "2.42 (6653/274398)"
    assert str(MetricRecord("wder", 6653, 274398, "SEC")) == "SEC 2.42 (6653/274398)"


def test_cpwer_rates_from_reported_counts():
    assert abs(100 * 5998 / 24335 - 24.64) <= 0.02
    assert abs(100 * 5834 / 24335 - 23.97) <= 0.02


def test_record_line():
    assert MetricRecord("wder", 1, 4).as_record() == "wder\t0.250000\t1\t4"


def test_record_table_aligns_labels():
    rows = [MetricRecord("wder", 7673, 274398, "No Correction"), MetricRecord("wder", 6653, 274398, "SEC")]
    assert record_table(rows) == "No Correction  2.80 (7673/274398)\nSEC            2.42 (6653/274398)\n"


def test_wder_identity_is_zero():
    ref = T("a b c d", "AABB")
    assert wder(ref, ref)[0] == 0.0


def test_wder_one_boundary_word_of_six():
    ref = T("so how are you doing fine", "AAAABB")
    hyp = T("so how are you doing fine", "AAABBB")
    rate, counts = wder(ref, hyp)
    assert rate == pytest.approx(1 / 6)
    assert (counts.C, counts.C_IS, counts.S, counts.S_IS) == (6, 1, 0, 0)


def test_wder_ignores_insertions_and_deletions():
    ref = T("a b c d", "AABB")
    hyp = T("a x b c", "AABB")
    _, counts = wder(ref, hyp)
    assert counts.I == 1 and counts.D == 1
    assert counts.denominator == 3


def test_wder_counts_substituted_words():
    ref = T("a b c d", "AABB")
    hyp = T("a b z d", "AAAB")
    _, counts = wder(ref, hyp)
    assert (counts.S, counts.S_IS, counts.C, counts.C_IS) == (1, 1, 3, 0)


def test_wder_undefined_without_paired_words():
    with pytest.raises(UndefinedMetricError):
        wder(T("a", "A"), T("", ""))


def test_corpus_wder_pools_counts():
    a = (T("a b", "AB", "1"), T("a b", "AA", "1"))
    b = (T("c d e", "AAB", "2"), T("c d e", "AAB", "2"))
    rate, counts = corpus_wder([a, b])
    assert (counts.numerator, counts.denominator) == (1, 5)


def test_corpus_scope_mapping_shares_labels():
    # per session, the swapped session maps perfectly; one corpus-wide mapping cannot
    a = (T("a b c", "AAB"), T("a b c", "AAB"))
    b = (T("d e f", "AAB"), T("d e f", "BBA"))
    assert corpus_wder([a, b], "session")[0] == 0.0
    assert corpus_wder([a, b], "corpus")[0] == pytest.approx(3 / 6)


tags = st.sampled_from(["A", "B", "C"])


@given(st.lists(st.tuples(st.sampled_from("xyz"), tags, tags), min_size=1, max_size=15), st.permutations(["p", "q", "r"]))
def test_wder_and_cpwer_invariant_to_hyp_renaming(rows, names):
    words = " ".join(w for w, _, _ in rows)
    ref = T(words, [r for _, r, _ in rows])
    hyp = T(words, [h for _, _, h in rows])
    rename = dict(zip("ABC", names))
    renamed = hyp.with_tags([rename[t] for t in hyp.tags])
    assert wder(ref, hyp)[0] == wder(ref, renamed)[0]
    assert cpwer(ref, hyp)[0] == cpwer(ref, renamed)[0]


def test_cpwer_renamed_speakers_is_zero():
    ref = T("a b c d", "AABB")
    hyp = T("a b c d", "yyxx")
    assert cpwer(ref, hyp)[0] == 0.0


def test_cpwer_one_substitution():
    ref = T("a b c d e f", "AAABBB")
    hyp = T("a b c d x f", "1112 22".replace(" ", ""))
    # both bijections enumerated by hand: identity costs 1, swap costs 6
    rate, counts = cpwer(ref, hyp)
    assert counts.errors == 1
    assert rate == pytest.approx(1 / 6)


def test_cpwer_unmatched_stream_costs_full_length():
    ref = T("a b c", "AAB")
    hyp = T("a b c", "xxx")
    assert cpwer(ref, hyp)[1].errors == 2


def test_cpwer_can_exceed_one():
    ref = T("a", "A")
    hyp = T("b c d", "xyz")
    assert cpwer(ref, hyp)[0] > 1.0


def test_cpwer_empty_ref_undefined():
    with pytest.raises(UndefinedMetricError):
        cpwer(T("", ""), T("a", "A"))


def test_corpus_cpwer_pools():
    pairs = [(T("a b", "AB"), T("a c", "AB")), (T("d e f", "AAB"), T("d e f", "AAB"))]
    rate, counts = corpus_cpwer(pairs)
    assert (counts.errors, counts.ref_words) == (1, 5)


@given(st.integers(1, 5), st.data())
def test_assignment_matches_exhaustive(n, data):
    costs = data.draw(st.lists(st.lists(st.integers(0, 9), min_size=n, max_size=n), min_size=n, max_size=n))
    import numpy as np

    costs = np.array(costs)
    assert solve_exhaustive(costs)[0] == solve_assignment(costs)[0]


def test_padded_costs_shape():
    costs = _padded_costs([["a", "b"]], [["a"], ["c", "d", "e"]])
    assert costs.tolist() == [[1, 3], [1, 3]]


def test_cpwer_solvers_agree_on_many_speakers():
    words = " ".join(f"w{i}" for i in range(20))
    ref = T(words, "ABCDEFGHIJ" * 2)
    hyp = T(words, "ABCDEFGHJI" * 2)
    assert cpwer(ref, hyp, "assignment")[1].errors == cpwer(ref, hyp, "exhaustive")[1].errors == 0
    assert math.isclose(cpwer(ref, hyp)[0], 0.0)
