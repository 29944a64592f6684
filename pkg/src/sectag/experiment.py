"""End-to-end desk-scale experiment.

generate corpus -> split -> synthetic ASR error pairs -> phonetic filter ->
confusion lexicon -> corrupt held-out sessions -> train corrector ->
correct -> score before/after.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Optional

from .asp.lexicon import LexiconGenerator, build_confusion_lexicon, evaluate_generator, phonetic_filter
from .asp.synth import confusion_profiles, sample_error_pairs
from .config import build, dataclass_values, format_config
from .corpus import SyntheticDialogSpec, corpus_words, generate_corpus, split_corpus
from .corrector import (
    CorrectionConfig,
    CorrectionReport,
    TrainingResult,
    evaluate_correction,
    identity_predictor,
    train_sec,
)
from .errors import ConfigurationError
from .errorsim import SimConfig, corrupt_session
from .metrics import record_table
from .neural.checkpoint import save_checkpoint
from .rng import substream
from .session import write_corpus


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    train_fraction: float = 0.8
    val_fraction: float = 0.05
    model: str = "train"  # or "identity"

    def __post_init__(self):
        if self.model not in ("train", "identity"):
            raise ConfigurationError(f"model must be 'train' or 'identity', not {self.model!r}")
        if self.train_fraction <= 0 or self.val_fraction < 0 or self.train_fraction + self.val_fraction >= 1:
            raise ConfigurationError("train and validation fractions must leave a test split")


@dataclass(frozen=True)
class EncoderSettings:
    d_model: int = 128
    heads: int = 4
    backbone_layers: int = 2
    head_layers: int = 2
    ff_dim: int = 256
    max_len: int = 64


@dataclass(frozen=True)
class Experiment:
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    corpus: SyntheticDialogSpec = field(default_factory=SyntheticDialogSpec)
    simulation: SimConfig = field(default_factory=SimConfig)
    training: CorrectionConfig = field(default_factory=CorrectionConfig)
    encoder: EncoderSettings = field(default_factory=EncoderSettings)

    @classmethod
    def from_sections(cls, sections: Mapping[str, Mapping[str, str]], seed: Optional[int] = None) -> "Experiment":
        known = {"experiment", "corpus", "simulation", "training", "encoder"}
        unknown = sorted(set(sections) - known)
        if unknown:
            raise ConfigurationError(f"unknown config sections: {', '.join(unknown)}")
        exp = build(ExperimentConfig, sections.get("experiment", {}))
        if seed is not None:
            exp = replace(exp, seed=seed)
        return cls(
            exp,
            build(SyntheticDialogSpec, sections.get("corpus", {}), seed=exp.seed),
            build(SimConfig, sections.get("simulation", {}), seed=exp.seed),
            build(CorrectionConfig, sections.get("training", {}), seed=exp.seed),
            build(EncoderSettings, sections.get("encoder", {})),
        )

    def sections(self) -> dict[str, dict]:
        return {name: dataclass_values(getattr(self, name)) for name in ("experiment", "corpus", "simulation", "training", "encoder")}

    def manifest(self) -> str:
        return format_config(self.sections())


@dataclass
class ExperimentResult:
    report: CorrectionReport
    training: Optional[TrainingResult]
    asp_bleu: float
    asp_identity_bleu: float
    seconds: dict[str, float]

    @property
    def relative_reduction(self) -> float:
        before, after = self.report.wder_before.rate, self.report.wder_after.rate
        return (before - after) / before if before else 0.0

    def table(self) -> str:
        r = self.report
        lines = ["WDER", record_table([r.wder_before, r.wder_after]), "cpWER", record_table([r.cpwer_before, r.cpwer_after])]
        lines.append("error types (a/b/c)")
        lines.append(f"No Correction  {r.kinds_before['a']}/{r.kinds_before['b']}/{r.kinds_before['c']}")
        lines.append(f"SEC            {r.kinds_after['a']}/{r.kinds_after['b']}/{r.kinds_after['c']}")
        lines.append(f"relative WDER reduction {100 * self.relative_reduction:.2f}%")
        lines.append(f"alternate spelling BLEU {self.asp_bleu:.4f} (identity {self.asp_identity_bleu:.4f})")
        lines += r.warnings()
        return "\n".join(lines) + "\n"

    def records(self) -> str:
        return "".join(row.as_record() + f"\t{row.label}\n" for row in self.report.rows())


def run_experiment(
    exp: Experiment,
    out: Optional[Path] = None,
    progress: Optional[Callable[[str], None]] = None,
) -> ExperimentResult:
    say = progress or (lambda msg: None)
    seed = exp.experiment.seed
    clock: dict[str, float] = {}
    t = time.perf_counter()

    sessions = generate_corpus(exp.corpus)
    ef = exp.experiment
    train, val, test = split_corpus(sessions, [ef.train_fraction, ef.val_fraction, 1 - ef.train_fraction - ef.val_fraction], seed)
    say(f"corpus: {len(train)} train / {len(val)} validation / {len(test)} test sessions")

    profiles = confusion_profiles(corpus_words(train), substream(seed, "asp", "profiles"))
    train_pairs = phonetic_filter(sample_error_pairs(profiles, substream(seed, "asp", "train-pairs")))
    test_pairs = sample_error_pairs(profiles, substream(seed, "asp", "test-pairs"), p_noise=0.0)
    lexicon = build_confusion_lexicon(train_pairs)
    generator = LexiconGenerator(lexicon)
    asp = evaluate_generator(generator, test_pairs)
    say(f"alternate spelling BLEU {asp.bleu:.4f} vs identity {asp.identity_bleu:.4f}")

    sim = exp.simulation
    val_pairs = [(s, corrupt_session(s, sim, generator, substream(seed, "corrupt-val", i))[0]) for i, s in enumerate(val)]
    test_hyps = [corrupt_session(s, sim, generator, substream(seed, "corrupt-test", i))[0] for i, s in enumerate(test)]
    clock["prepare"] = time.perf_counter() - t

    training = None
    model = identity_predictor
    if ef.model == "train":
        t = time.perf_counter()
        training = train_sec(
            train, val_pairs, sim, exp.training, generator,
            encoder=dataclass_values(exp.encoder),
            progress=lambda e: say(f"stage {e.stage} step {e.step}: loss {e.loss:.4f}, validation WDER {100 * e.val_wder:.2f}"),
        )
        model = training.model
        clock["train"] = time.perf_counter() - t
        say(f"best validation WDER {100 * training.best_wder:.2f} at step {training.best_step}")

    t = time.perf_counter()
    report = evaluate_correction(test, test_hyps, model, exp.training)
    clock["correct"] = time.perf_counter() - t
    result = ExperimentResult(report, training, asp.bleu, asp.identity_bleu, clock)
    if out is not None:
        _write_outputs(Path(out), exp, result, test, test_hyps, lexicon)
    return result


def _write_outputs(out: Path, exp, result: ExperimentResult, refs, hyps, lexicon) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.ini").write_text(exp.manifest(), encoding="utf-8")
    (out / "report.txt").write_text(result.table(), encoding="utf-8")
    (out / "records.tsv").write_text(result.records(), encoding="utf-8")
    (out / "changes.tsv").write_text("".join(c.as_record() + "\n" for c in result.report.changes if not c.skipped), encoding="utf-8")
    lexicon.save(out / "lexicon.txt")
    write_corpus(refs, out / "test_ref")
    write_corpus(hyps, out / "test_hyp")
    write_corpus(result.report.corrected, out / "test_corrected")
    if result.training is not None:
        save_checkpoint(out / "model.ckpt", result.training.model, result.training.best_step)
        history = "".join(f"{h.stage}\t{h.step}\t{h.loss:.6f}\t{h.val_wder:.6f}\n" for h in result.training.history)
        (out / "history.tsv").write_text("stage\tstep\tloss\tval_wder\n" + history, encoding="utf-8")
