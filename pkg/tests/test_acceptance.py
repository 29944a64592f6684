"""Acceptance criteria, one test each, printing a PASS/FAIL line per criterion.

Criterion 8 runs the full desk-scale experiment twice (about 20 minutes on
one CPU core); everything else finishes in well under a minute.
"""

import math
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from sectag.align import align, alignment_cost
from sectag.asp.lexicon import ErrorPair, LexiconGenerator, build_confusion_lexicon, evaluate_generator, phonetic_filter
from sectag.asp.synth import confusion_profiles, sample_error_pairs
from sectag.bleu import bleu
from sectag.corpus import SyntheticDialogSpec, corpus_words, generate_corpus
from sectag.corrector import find_change_points
from sectag.errorsim import SimConfig, TrainingExample, simulate_speaker_errors, simulate_word_errors
from sectag.experiment import Experiment, run_experiment
from sectag.metrics import MetricRecord, _padded_costs, cpwer, solve_assignment, solve_exhaustive
from sectag.neural import EncoderConfig, SecModel, Tensor, cross_entropy, perm_invariant_ce
from sectag.neural.gradcheck import GROUPS, gradcheck
from sectag.neural.train import batch_loss, collate
from sectag.neural.vocab import Vocabulary
from sectag.rng import substream
from sectag.session import TaggedTranscript, read_corpus
from sectag.taxonomy import classify_errors

from fixtures import FILTER_CASES, PRONUNCIATIONS, TAXONOMY_CASES


@pytest.fixture
def verdict(capsys):
    def report(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return report


def test_criterion_01_metric_arithmetic(verdict):
    w1, w2 = MetricRecord("wder", 7673, 274398), MetricRecord("wder", 6653, 274398)
    c1, c2 = MetricRecord("cpwer", 5998, 24335), MetricRecord("cpwer", 5834, 24335)
    ok = (
        str(w1) == "2.80 (7673/274398)"
        and str(w2) == "2.42 (6653/274398)"
        and abs(100 * w1.rate - 2.80) <= 0.01
        and abs(100 * w2.rate - 2.42) <= 0.01
        and abs(100 * c1.rate - 24.64) <= 0.02
        and abs(100 * c2.rate - 23.97) <= 0.02
    )
    verdict(1, ok, f"WDER {w1}, {w2}; cpWER {c1}, {c2}")


@lru_cache(maxsize=None)
def _exhaustive_cost(ref: tuple, hyp: tuple) -> int:
    # every alignment either pairs, deletes or inserts the first symbol
    if not ref or not hyp:
        return len(ref) + len(hyp)
    return min(
        _exhaustive_cost(ref[1:], hyp[1:]) + (ref[0] != hyp[0]),
        _exhaustive_cost(ref[1:], hyp) + 1,
        _exhaustive_cost(ref, hyp[1:]) + 1,
    )


def test_criterion_02_alignment_oracle(verdict):
    rng = substream(0, "acceptance", "align")
    start = time.perf_counter()
    mismatches = 0
    for _ in range(500):
        ref = tuple(rng.choice(list("abcd"), size=int(rng.integers(0, 9))))
        hyp = tuple(rng.choice(list("abcd"), size=int(rng.integers(0, 9))))
        ops = align(list(ref), list(hyp))
        consumed = [op.ref_index for op in ops if op.ref_index is not None] == list(range(len(ref)))
        consumed &= [op.hyp_index for op in ops if op.hyp_index is not None] == list(range(len(hyp)))
        mismatches += alignment_cost(ops) != _exhaustive_cost(ref, hyp) or not consumed
    seconds = time.perf_counter() - start
    verdict(2, mismatches == 0 and seconds < 10, f"{mismatches} mismatches in 500 pairs, {seconds:.2f}s")


def test_criterion_03_cpwer_assignment(verdict):
    rng = substream(0, "acceptance", "cpwer")
    start = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        n = int(rng.integers(1, 40))
        words = [f"w{int(k)}" for k in rng.integers(0, 12, size=n)]
        ref_tags = [f"r{int(k)}" for k in rng.integers(0, int(rng.integers(1, 6)), size=n)]
        hyp_words = [w if rng.random() > 0.2 else "x" for w in words]
        hyp_tags = [f"h{int(k)}" for k in rng.integers(0, int(rng.integers(1, 6)), size=n)]
        ref = TaggedTranscript.from_pairs(zip(words, ref_tags))
        hyp = TaggedTranscript.from_pairs(zip(hyp_words, hyp_tags))
        exhaustive = cpwer(ref, hyp, "exhaustive")[1].errors
        assignment = cpwer(ref, hyp, "assignment")[1].errors
        streams = lambda t: [[w.text for w in t.words if w.speaker == s] for s in dict.fromkeys(t.tags)]
        costs = _padded_costs(streams(ref), streams(hyp))
        mismatches += exhaustive != assignment or solve_exhaustive(costs)[0] != solve_assignment(costs)[0]
    seconds = time.perf_counter() - start
    verdict(3, mismatches == 0 and seconds < 30, f"{mismatches} mismatches in 200 sessions, {seconds:.2f}s")


def test_criterion_04_permutation_invariant_loss(verdict):
    rng = substream(0, "acceptance", "pit")
    worst_invariance, bound_violations = 0.0, 0
    for _ in range(1000):
        k = int(rng.integers(2, 5))
        t = int(rng.integers(1, 20))
        logits = rng.normal(size=(t, k)) * 2
        targets = rng.integers(k, size=t)
        perm = rng.permutation(k)
        a = perm_invariant_ce(Tensor(logits), targets).item()
        b = perm_invariant_ce(Tensor(logits), perm[targets]).item()
        worst_invariance = max(worst_invariance, abs(a - b))
        bound_violations += a > cross_entropy(Tensor(logits), targets).item()
    uniform = perm_invariant_ce(Tensor(np.zeros((9, 2))), [0, 1, 1, 0, 1, 0, 0, 0, 1]).item()
    ok = worst_invariance <= 1e-12 and bound_violations == 0 and abs(uniform - math.log(2)) <= 1e-9
    verdict(4, ok, f"max relabel gap {worst_invariance:.1e}, {bound_violations} bound violations, uniform loss {uniform:.12f}")


def test_criterion_05_gradient_check(verdict):
    words = "a b c d e f".split()
    vocab = Vocabulary(words, 8)
    config = EncoderConfig(len(vocab), d_model=16, heads=2, backbone_layers=1, head_layers=1, ff_dim=32, max_len=32)
    model = SecModel(config, vocab)
    rng = substream(0, "acceptance", "gradcheck")
    examples = []
    for _ in range(3):
        n = int(rng.integers(5, 10))
        b = int(rng.integers(1, n))
        toks = tuple(words[int(i)] for i in rng.integers(len(words), size=n)) + ("unseen",)
        target = (0,) * b + (1,) * (n + 1 - b)
        examples.append(TrainingExample(toks, tuple(rng.integers(2, size=n + 1)), target))
    batch = collate(model, examples)
    start = time.perf_counter()
    results = gradcheck(model, lambda: batch_loss(model, batch), only_rows={"token_embedding": np.unique(batch.tokens)}, rng=rng)
    seconds = time.perf_counter() - start
    worst = max(r.max_rel_error for r in results.values())
    ok = set(results) == set(GROUPS) and worst < 1e-4 and seconds < 60
    detail = ", ".join(f"{g} {results[g].max_rel_error:.1e}" for g in GROUPS if g in results)
    verdict(5, ok, f"{detail}; {seconds:.1f}s")


def test_criterion_06_simulation_statistics(verdict):
    counts = np.zeros(3)
    for i in range(20000):
        log = []
        simulate_speaker_errors([0] * 6 + [1] * 6, substream(0, "acceptance", "draws", i), SimConfig(), log)
        counts[log[0].drawn] += 1
    freqs = counts / 20000
    subs = []
    simulate_word_errors(["w"] * 20000, lambda w: ["v"], substream(0, "acceptance", "subs"), SimConfig(), subs)
    rate = len(subs) / 20000
    ok = np.all(np.abs(freqs - [0.40, 0.48, 0.12]) <= 0.015) and abs(rate - 0.10) <= 0.005
    verdict(6, ok, f"error counts {np.round(freqs, 4).tolist()}, substitution rate {rate:.4f}")


def test_criterion_07_phonetic_filter(verdict):
    pairs = [ErrorPair(r, h) for r, h, _, _ in FILTER_CASES]
    kept = {(p.ref_word, p.hyp_word) for p in phonetic_filter(pairs, PRONUNCIATIONS)}
    wrong = [(r, h) for r, h, _, keep in FILTER_CASES if ((r, h) in kept) != keep]
    boundary = sum(1 for _, _, ratio, _ in FILTER_CASES if ratio == 0.5)
    verdict(7, not wrong and len(FILTER_CASES) == 20, f"{len(wrong)} misfiled of 20 pairs ({boundary} at ratio exactly 0.5)")


@pytest.fixture(scope="module")
def acceptance_runs(tmp_path_factory):
    runs = []
    for k in range(2):
        out = tmp_path_factory.mktemp(f"run{k}")
        start = time.perf_counter()
        result = run_experiment(Experiment.from_sections({}, seed=0), out)
        runs.append((result, out, time.perf_counter() - start))
    return runs


def _files(out: Path) -> dict[str, bytes]:
    return {str(p.relative_to(out)): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()}


def test_criterion_08_end_to_end_correction(verdict, acceptance_runs):
    (result, out_a, total), (_, out_b, _) = acceptance_runs
    r = result.report
    train_seconds = result.seconds["train"]
    files_a, files_b = _files(out_a), _files(out_b)
    identical = files_a == files_b
    ok = (
        train_seconds <= 900
        and r.wder_after.rate <= 0.8 * r.wder_before.rate
        and r.cpwer_after.rate <= r.cpwer_before.rate
        and identical
    )
    verdict(
        8,
        ok,
        f"WDER {r.wder_before} -> {r.wder_after} ({100 * result.relative_reduction:.1f}% reduction); "
        f"cpWER {r.cpwer_before} -> {r.cpwer_after}; training {train_seconds:.0f}s (run {total:.0f}s); "
        f"second run {'identical' if identical else 'DIFFERENT'} across {len(files_a)} files",
    )


def test_criterion_09_corrector_safety(verdict, acceptance_runs):
    result, out, _ = acceptance_runs[0]
    hyps = {s.session_id: s for s in read_corpus(out / "test_hyp")}
    text_changes = outside = bad_windows = windows = 0
    touched: dict[str, set] = {}
    for c in result.report.changes:
        if c.skipped:
            continue
        windows += 1
        w = c.window
        touched.setdefault(c.session_id, set()).update(range(w.start, w.stop))
        if not (1 <= w.left_size <= 18 and 1 <= w.right_size <= 18) or len(find_change_points(list(c.old_tags))) != 1:
            bad_windows += 1
    for fixed in result.report.corrected:
        hyp = hyps[fixed.session_id]
        text_changes += fixed.texts != hyp.texts
        inside = touched.get(fixed.session_id, set())
        outside += sum(1 for i, (a, b) in enumerate(zip(hyp.tags, fixed.tags)) if a != b and i not in inside)
    ok = text_changes == 0 and outside == 0 and bad_windows == 0
    verdict(9, ok, f"{windows} windows: {text_changes} text changes, {outside} tag changes outside windows, {bad_windows} malformed windows")


def test_criterion_10_taxonomy(verdict):
    mismatches = sum([e.kind for e in classify_errors(ref, hyp)] != labels for ref, hyp, labels in TAXONOMY_CASES)
    total = sum(len(labels) for _, _, labels in TAXONOMY_CASES)
    verdict(10, mismatches == 0 and len(TAXONOMY_CASES) == 10, f"{mismatches} mismatching sessions of 10 ({total} labelled errors)")


def test_criterion_11_bleu(verdict):
    refs = [list(w) for w in ("speaker", "tag", "correction", "a")]
    identity = bleu(refs, refs)
    # clipped precisions 3/4, 2/3, 1/2, 0/1: the 4-gram order is present and unmatched
    four = bleu([list("abcd")], [list("abce")])
    # 3-token hypothesis: orders 1-3 all match, the 4-gram order is absent and dropped
    three = bleu([list("abcd")], [list("abc")])
    sessions = generate_corpus(SyntheticDialogSpec(num_sessions=200))
    profiles = confusion_profiles(corpus_words(sessions), substream(0, "acceptance", "profiles"))
    train = phonetic_filter(sample_error_pairs(profiles, substream(0, "acceptance", "train-pairs")))
    test = sample_error_pairs(profiles, substream(0, "acceptance", "test-pairs"), p_noise=0.0)
    report = evaluate_generator(LexiconGenerator(build_confusion_lexicon(train)), test)
    ok = (
        identity == 1.0
        and abs(four - 0.0) <= 1e-9
        and abs(three - math.exp(1 - 4 / 3)) <= 1e-9
        and report.bleu > report.identity_bleu
    )
    verdict(11, ok, f"identity {identity}, 4-token {four}, 3-token {three:.12f}, lexicon {report.bleu:.4f} vs identity {report.identity_bleu:.4f}")
