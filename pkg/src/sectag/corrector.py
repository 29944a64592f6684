"""Windowed speaker-error correction at speaker change points.

Each change point of the input gets a window of at most ``context_limit``
words per side, cut short at the neighbouring change points, so a window
always holds exactly two speaker runs. The window is relabelled 0 (left
speaker) / 1 (right speaker), re-tagged by a predictor and written back.
Windows are processed left to right over the partially corrected tags.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import ConfigurationError, InputError, TrainingDataError, ValidationError
from .errorsim import (
    AlternateFn,
    SimConfig,
    TrainingExample,
    _run_left,
    _run_right,
    corrupt_session,
    simulate_speaker_errors,
    simulate_word_errors,
    speaker_indices,
)
from .metrics import MetricRecord, corpus_cpwer, corpus_wder
from .neural.model import EncoderConfig, SecModel
from .neural.optim import Adam
from .neural.train import train_step
from .neural.vocab import Vocabulary
from .rng import substream
from .session import TaggedTranscript, turns_of
from .taxonomy import classify_errors, count_kinds


@dataclass(frozen=True)
class Window:
    start: int
    stop: int
    boundary: int
    left_speaker: str
    right_speaker: str

    @property
    def left_size(self) -> int:
        return self.boundary - self.start

    @property
    def right_size(self) -> int:
        return self.stop - self.boundary


@dataclass(frozen=True)
class CorrectionConfig:
    context_limit: int = 18
    min_side_words: int = 1
    decode: str = "monotone"
    stage1_steps: int = 300
    stage2_steps: int = 1700
    batch_size: int = 32
    eval_every: int = 200
    lr: float = 1e-3
    p_single: float = 0.15
    mean_window_length: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.context_limit < 1:
            raise ConfigurationError("context_limit must be at least 1")
        if self.min_side_words < 1 or self.min_side_words > self.context_limit:
            raise ConfigurationError("min_side_words must lie in [1, context_limit]")
        if min(self.stage1_steps, self.stage2_steps) < 0 or self.batch_size < 1 or self.eval_every < 1:
            raise ConfigurationError("training steps, batch size and eval interval must be positive")
        if self.decode not in ("monotone", "argmax"):
            raise ConfigurationError(f"decode must be 'monotone' or 'argmax', not {self.decode!r}")
        if not 0.0 <= self.p_single <= 1.0:
            raise ConfigurationError("p_single must be a probability")


def find_change_points(tags: Union[TaggedTranscript, Sequence[str]]) -> list[int]:
    """Indices ``i`` with ``tags[i-1] != tags[i]``, ascending."""
    if isinstance(tags, TaggedTranscript):
        tags = tags.tags
    return [i for i in range(1, len(tags)) if tags[i] != tags[i - 1]]


def extract_window(tags: Sequence[str], boundary: int, context_limit: int = 18) -> Window:
    if not 1 <= boundary < len(tags) or tags[boundary - 1] == tags[boundary]:
        raise ValidationError(f"{boundary} is not a change point")
    tags = list(tags)
    left = min(context_limit, _run_left(tags, boundary))
    right = min(context_limit, _run_right(tags, boundary))
    return Window(boundary - left, boundary + right, boundary, tags[boundary - 1], tags[boundary])


@dataclass(frozen=True)
class WindowChange:
    """One processed (or skipped) change point of a correction pass."""

    session_id: str
    boundary: int
    window: Optional[Window]
    old_tags: tuple[str, ...] = ()
    new_tags: tuple[str, ...] = ()

    @property
    def skipped(self) -> bool:
        return self.window is None

    @property
    def changed(self) -> bool:
        return self.old_tags != self.new_tags

    def as_record(self) -> str:
        return f"{self.session_id}\t{self.boundary}\t{','.join(self.old_tags)}\t{','.join(self.new_tags)}"


# (window words, window tags as 0/1, window) -> predicted 0/1 tags
Predictor = Callable[[Sequence[str], Sequence[int], Window], Sequence[int]]


def monotone_decode(logp: np.ndarray, tags: Sequence[int]) -> list[int]:
    """Best single-split labelling ``[c]*j + [1-c]*(n-j)`` under log-probabilities.

    Scores every split point ``j`` (0 and n merge the window into one
    speaker) for both class orders; ties go to the split nearest the input
    boundary, then to the smaller ``j``.
    """
    n = len(tags)
    boundary = next((i for i in range(1, n) if tags[i] != tags[i - 1]), n)
    best = None
    for c in (0, 1):
        head = np.concatenate([[0.0], np.cumsum(logp[:, c])])
        tail = np.concatenate([np.cumsum(logp[::-1, 1 - c])[::-1], [0.0]])
        for j in range(n + 1):
            key = (-(head[j] + tail[j]), abs(j - boundary), j, c)
            if best is None or key < best:
                best = key
    _, _, j, c = best
    return [c] * j + [1 - c] * (n - j)


class ModelPredictor:
    """Wraps a ``SecModel``; ``decode`` is ``"monotone"`` or ``"argmax"``."""

    def __init__(self, model: SecModel, decode: str = "monotone"):
        if decode not in ("monotone", "argmax"):
            raise ConfigurationError(f"unknown decode {decode!r}")
        self.model = model
        self.decode = decode

    def __call__(self, words, tags, window):
        if self.decode == "argmax":
            return self.model.predict(words, tags)
        logits = self.model.forward(self.model.vocab.encode(words), tags).data
        logp = logits - logits.max(axis=1, keepdims=True)
        logp -= np.log(np.exp(logp).sum(axis=1, keepdims=True))
        return monotone_decode(logp, tags)


def identity_predictor(words, tags, window):
    return list(tags)


class OraclePredictor:
    """Reads the reference tags; used to check the correction plumbing."""

    def __init__(self, reference: TaggedTranscript):
        self.reference = reference

    def __call__(self, words, tags, window):
        ref = self.reference.tags[window.start : window.stop]
        out = []
        for r, t in zip(ref, tags):
            out.append(0 if r == window.left_speaker else 1 if r == window.right_speaker else t)
        return out


def orient(pred: Sequence[int], tags: Sequence[int]) -> list[int]:
    """Swap the two output classes if that agrees with more input tags.

    The model is trained with a permutation-invariant loss, so its class
    indices carry no fixed meaning; ties keep the prediction as is.
    """
    pred = [int(k) for k in pred]
    same = sum(p == t for p, t in zip(pred, tags))
    if len(pred) - same > same:
        return [1 - p for p in pred]
    return pred


def _as_predictor(model, decode: str = "monotone") -> Predictor:
    return ModelPredictor(model, decode) if isinstance(model, SecModel) else model


def correct(
    transcript: TaggedTranscript,
    model: Union[SecModel, Predictor],
    config: CorrectionConfig = CorrectionConfig(),
    expect_vocab: Optional[str] = None,
) -> tuple[TaggedTranscript, list[WindowChange]]:
    """Re-tag the words around every change point of ``transcript``.

    ``expect_vocab`` is a vocabulary digest; a model built over a different
    vocabulary is rejected.
    """
    if expect_vocab is not None and isinstance(model, SecModel) and model.vocab.digest() != expect_vocab:
        raise ConfigurationError("model vocabulary does not match the expected vocabulary")
    predictor = _as_predictor(model, config.decode)
    words = transcript.texts
    tags = transcript.tags
    log: list[WindowChange] = []
    for b in find_change_points(tags):
        if tags[b - 1] == tags[b]:
            log.append(WindowChange(transcript.session_id, b, None))
            continue
        w = extract_window(tags, b, config.context_limit)
        if min(w.left_size, w.right_size) < config.min_side_words:
            log.append(WindowChange(transcript.session_id, b, None))
            continue
        old = tags[w.start : w.stop]
        local = [0 if t == w.left_speaker else 1 for t in old]
        pred = list(predictor(words[w.start : w.stop], local, w))
        if len(pred) != len(local) or any(k not in (0, 1) for k in pred):
            raise ValidationError(f"predictor returned {pred!r} for a {len(local)}-word window")
        new = [w.left_speaker if k == 0 else w.right_speaker for k in orient(pred, local)]
        tags[w.start : w.stop] = new
        log.append(WindowChange(transcript.session_id, b, w, tuple(old), tuple(new)))
    return transcript.with_tags(tags), log


# ---------------------------------------------------------------- training


def _junctions(sessions: Sequence[TaggedTranscript]) -> list[tuple[int, int]]:
    return [(k, t.start) for k, s in enumerate(sessions) for t in turns_of(s)[1:]]


def sample_junction_example(
    session: TaggedTranscript,
    boundary: int,
    sim: SimConfig,
    alternates: Optional[AlternateFn],
    rng: np.random.Generator,
    context_limit: int = 18,
) -> TrainingExample:
    """A training window cut the same way ``correct`` cuts windows.

    The neighbourhood of a reference junction is corrupted junction by
    junction, and the window around the hypothesised change point nearest
    the junction becomes the input; the reference tags are the target.
    """
    reach = 2 * context_limit + sim.max_shift
    lo, hi = max(0, boundary - reach), min(len(session), boundary + reach)
    ref = TaggedTranscript(session.words[lo:hi], session.session_id)
    hyp, _ = corrupt_session(ref, sim, alternates, rng)
    points = find_change_points(hyp.tags)
    b = min(points, key=lambda p: (abs(p - (boundary - lo)), p))
    w = extract_window(hyp.tags, b, context_limit)
    local = [0 if t == w.left_speaker else 1 for t in hyp.tags[w.start : w.stop]]
    target = speaker_indices(ref.tags[w.start : w.stop])
    return TrainingExample(tuple(hyp.texts[w.start : w.stop]), tuple(local), tuple(target))


def sample_single_example(
    session: TaggedTranscript,
    turn_start: int,
    turn_stop: int,
    sim: SimConfig,
    alternates: Optional[AlternateFn],
    rng: np.random.Generator,
    context_limit: int = 18,
) -> TrainingExample:
    """A one-speaker span with spurious speaker changes split off its edges."""
    length = min(turn_stop - turn_start, 2 * context_limit)
    start = int(rng.integers(turn_start, turn_stop - length + 1))
    texts = session.texts[start : start + length]
    target = [0] * length
    tags = simulate_speaker_errors(target, rng, sim)
    if alternates is not None and sim.p_word_sub > 0:
        texts = simulate_word_errors(texts, alternates, rng, sim)
    points = find_change_points([str(t) for t in tags])
    lo, hi = 0, length
    if points:
        b = points[int(rng.integers(len(points)))]
        w = extract_window([str(t) for t in tags], b, context_limit)
        lo, hi = w.start, w.stop
    local = speaker_indices(tags[lo:hi])
    return TrainingExample(tuple(texts[lo:hi]), tuple(local), tuple(target[lo:hi]))


@dataclass
class ExampleSampler:
    """Draws training examples from reference sessions with simulated errors."""

    sessions: Sequence[TaggedTranscript]
    sim: SimConfig
    alternates: Optional[AlternateFn]
    config: CorrectionConfig
    junctions: list = field(init=False)
    long_turns: list = field(init=False)

    def __post_init__(self):
        self.junctions = _junctions(self.sessions)
        if not self.junctions:
            raise TrainingDataError("training corpus has no speaker junctions")
        min_len = max(4, self.config.mean_window_length // 2)
        self.long_turns = [
            (k, t.start, t.stop) for k, s in enumerate(self.sessions) for t in turns_of(s) if len(t) >= min_len
        ]

    def sample(self, rng: np.random.Generator) -> TrainingExample:
        limit = self.config.context_limit
        if self.long_turns and rng.random() < self.config.p_single:
            k, start, stop = self.long_turns[int(rng.integers(len(self.long_turns)))]
            return sample_single_example(self.sessions[k], start, stop, self.sim, self.alternates, rng, limit)
        k, b = self.junctions[int(rng.integers(len(self.junctions)))]
        return sample_junction_example(self.sessions[k], b, self.sim, self.alternates, rng, limit)

    def batch(self, step: int, size: int) -> list[TrainingExample]:
        rng = substream(self.config.seed, "train", step)
        return [self.sample(rng) for _ in range(size)]


@dataclass(frozen=True)
class HistoryEntry:
    stage: int
    step: int
    loss: float
    val_wder: float


@dataclass
class TrainingResult:
    model: SecModel
    history: list[HistoryEntry]
    best_step: int
    best_wder: float
    baseline_wder: float
    seconds: float


def validation_wder(model, pairs: Sequence[tuple[TaggedTranscript, TaggedTranscript]], config: CorrectionConfig) -> float:
    corrected = [(ref, correct(hyp, model, config)[0]) for ref, hyp in pairs]
    return corpus_wder(corrected)[0]


def build_vocabulary(sessions: Sequence[TaggedTranscript], buckets: int = 2**15) -> Vocabulary:
    return Vocabulary.build((w for s in sessions for w in s.texts), buckets=buckets)


def train_sec(
    sessions: Sequence[TaggedTranscript],
    validation: Sequence[tuple[TaggedTranscript, TaggedTranscript]],
    sim: SimConfig = SimConfig(),
    config: CorrectionConfig = CorrectionConfig(),
    alternates: Optional[AlternateFn] = None,
    model: Optional[SecModel] = None,
    encoder: Optional[dict] = None,
    progress: Optional[Callable[[HistoryEntry], None]] = None,
) -> TrainingResult:
    """Two-stage training: backbone frozen first, then everything.

    Validation WDER is measured every ``eval_every`` steps and at the end
    of each stage; the returned model carries the best-scoring weights
    (the untrained model counts as a candidate at step 0).
    """
    if not sessions:
        raise TrainingDataError("empty training corpus")
    sampler = ExampleSampler(sessions, sim, alternates, config)
    if model is None:
        vocab = build_vocabulary(sessions)
        model = SecModel(EncoderConfig(vocab_size=len(vocab), seed=config.seed, **(encoder or {})), vocab)
    started = time.perf_counter()
    optimizer = Adam(model.parameters(), lr=config.lr)

    baseline = corpus_wder(validation)[0] if validation else float("nan")
    best_wder = validation_wder(model, validation, config) if validation else float("inf")
    best_state, best_step = model.state(), 0
    history: list[HistoryEntry] = []
    step = 0
    for stage, steps in ((1, config.stage1_steps), (2, config.stage2_steps)):
        losses: list[float] = []
        for i in range(steps):
            step += 1
            losses.append(train_step(model, sampler.batch(step, config.batch_size), optimizer, stage == 1))
            if (i + 1) % config.eval_every and i + 1 != steps:
                continue
            val = validation_wder(model, validation, config) if validation else float("nan")
            entry = HistoryEntry(stage, step, float(np.mean(losses)), val)
            history.append(entry)
            losses = []
            if progress:
                progress(entry)
            if val < best_wder:
                best_wder, best_state, best_step = val, model.state(), step
    model.load_state(best_state)
    return TrainingResult(model, history, best_step, best_wder, baseline, time.perf_counter() - started)


# ---------------------------------------------------------------- evaluation


@dataclass
class CorrectionReport:
    wder_before: MetricRecord
    wder_after: MetricRecord
    cpwer_before: MetricRecord
    cpwer_after: MetricRecord
    kinds_before: dict[str, int]
    kinds_after: dict[str, int]
    changes: list[WindowChange]
    corrected: list[TaggedTranscript]

    @property
    def regressed(self) -> bool:
        return self.wder_after.rate > self.wder_before.rate or self.cpwer_after.rate > self.cpwer_before.rate

    def rows(self) -> list[MetricRecord]:
        return [self.wder_before, self.wder_after, self.cpwer_before, self.cpwer_after]

    def warnings(self) -> list[str]:
        out = []
        if self.wder_after.rate > self.wder_before.rate:
            out.append(f"regression: WDER rose from {self.wder_before.percent} to {self.wder_after.percent}")
        if self.cpwer_after.rate > self.cpwer_before.rate:
            out.append(f"regression: cpWER rose from {self.cpwer_before.percent} to {self.cpwer_after.percent}")
        return out


def pair_sessions(
    refs: Sequence[TaggedTranscript], hyps: Sequence[TaggedTranscript]
) -> list[tuple[TaggedTranscript, TaggedTranscript]]:
    by_id = {h.session_id: h for h in hyps}
    ref_ids = [r.session_id for r in refs]
    if len(by_id) != len(hyps) or len(set(ref_ids)) != len(ref_ids):
        raise InputError("duplicate session ids")
    missing = sorted(set(ref_ids) ^ set(by_id))
    if missing:
        raise InputError(f"unpaired sessions: {', '.join(missing[:5])}")
    return [(r, by_id[r.session_id]) for r in refs]


def evaluate_correction(
    refs: Sequence[TaggedTranscript],
    hyps: Sequence[TaggedTranscript],
    model: Union[SecModel, Predictor],
    config: CorrectionConfig = CorrectionConfig(),
) -> CorrectionReport:
    pairs = pair_sessions(refs, hyps)
    changes: list[WindowChange] = []
    corrected = []
    for _, hyp in pairs:
        out, log = correct(hyp, model, config)
        corrected.append(out)
        changes.extend(log)
    after = [(ref, out) for (ref, _), out in zip(pairs, corrected)]
    kinds_before = {"a": 0, "b": 0, "c": 0}
    kinds_after = {"a": 0, "b": 0, "c": 0}
    for (ref, hyp), out in zip(pairs, corrected):
        for kind, n in count_kinds(classify_errors(ref, hyp)).items():
            kinds_before[kind] += n
        for kind, n in count_kinds(classify_errors(ref, out)).items():
            kinds_after[kind] += n

    def records(metric, fn, label_pairs):
        rows = []
        for label, ps in label_pairs:
            _, counts = fn(ps)
            num, den = (counts.numerator, counts.denominator) if metric == "wder" else (counts.errors, counts.ref_words)
            rows.append(MetricRecord(metric, num, den, label))
        return rows

    wb, wa = records("wder", corpus_wder, [("No Correction", pairs), ("SEC", after)])
    cb, ca = records("cpwer", corpus_cpwer, [("No Correction", pairs), ("SEC", after)])
    return CorrectionReport(wb, wa, cb, ca, kinds_before, kinds_after, changes, corrected)
