import numpy as np
import pytest

from sectag.corpus import SyntheticDialogSpec, generate_corpus, generate_session, split_corpus
from sectag.errors import ConfigurationError
from sectag.rng import substream
from sectag.session import turns_of


def test_substreams_are_reproducible_and_distinct():
    a = substream(1, "x", 2).random(4)
    assert np.array_equal(a, substream(1, "x", 2).random(4))
    assert not np.array_equal(a, substream(1, "x", 3).random(4))
    assert not np.array_equal(a, substream(2, "x", 2).random(4))


def test_negative_stream_key_rejected():
    with pytest.raises(ValueError):
        substream(0, -1)


def test_session_depends_only_on_seed_and_index():
    spec = SyntheticDialogSpec(num_sessions=5, seed=4)
    assert generate_corpus(spec)[3] == generate_session(SyntheticDialogSpec(num_sessions=50, seed=4), 3)


def test_sessions_alternate_two_speakers():
    for s in generate_corpus(SyntheticDialogSpec(num_sessions=20)):
        turns = turns_of(s)
        assert set(s.tags) == {"spk1", "spk2"}
        assert all(a.speaker != b.speaker for a, b in zip(turns, turns[1:]))


def test_mean_turn_length():
    sessions = generate_corpus(SyntheticDialogSpec(num_sessions=100, seed=2))
    assert abs(np.mean([len(t) for s in sessions for t in turns_of(s)]) - 12) <= 1


def test_split_is_a_partition():
    sessions = generate_corpus(SyntheticDialogSpec(num_sessions=40))
    parts = split_corpus(sessions, [0.5, 0.25, 0.25], seed=1)
    assert [len(p) for p in parts] == [20, 10, 10]
    ids = [s.session_id for p in parts for s in p]
    assert sorted(ids) == sorted(s.session_id for s in sessions)
    with pytest.raises(ConfigurationError):
        split_corpus(sessions, [0.5, 0.6])


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        SyntheticDialogSpec(min_turns=1)
