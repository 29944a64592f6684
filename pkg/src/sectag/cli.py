"""Command-line interface: ``sectag <command> ...``.

Exit codes: 0 success, 2 input or parse error, 3 validation or
configuration error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .asp.lexicon import (
    ConfusionLexicon,
    LexiconGenerator,
    build_confusion_lexicon,
    evaluate_generator,
    parse_error_pairs,
    phonetic_filter,
)
from .config import format_config, read_config
from .corrector import correct, evaluate_correction, pair_sessions, train_sec
from .corpus import generate_corpus
from .errors import InputError, SectagError
from .errorsim import corrupt_session
from .experiment import Experiment, run_experiment
from .metrics import MetricRecord, corpus_cpwer, corpus_wder, record_table
from .neural.checkpoint import load_checkpoint, save_checkpoint
from .reconcile import format_trace, reconcile
from .rng import substream
from .session import format_session, parse_segments, parse_words, read_corpus, read_session, write_corpus
from .taxonomy import classify_errors, count_kinds


def _read_text(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _sessions(path: str):
    p = Path(path)
    if p.is_dir():
        sessions = read_corpus(p)
        if not sessions:
            raise InputError(f"no *.tsv sessions in {path}")
        return sessions
    if p.is_file():
        return [read_session(p)]
    raise InputError(f"no such file or directory: {path}")


def _experiment(args) -> Experiment:
    sections = read_config(args.config) if args.config else {}
    return Experiment.from_sections(sections, seed=args.seed)


def _emit(args, text: str, name: Optional[str] = None) -> None:
    """Write ``text`` to stdout, or under ``--out`` when one is given."""
    if args.out and name:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _metric_rows(rows: Sequence[MetricRecord], fmt: str) -> str:
    if fmt == "records":
        return "".join(f"{r.as_record()}\t{r.label}\n" for r in rows)
    return record_table(rows)


def _write_manifest(args, exp: Experiment, command: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        text = f"# sectag {command}\n" + exp.manifest()
        (out / "manifest.ini").write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- commands


def cmd_reconcile(args) -> int:
    words = parse_words(_read_text(args.words), args.words_format)
    segments = parse_segments(_read_text(args.rttm))
    transcript, trace = reconcile(words, segments, Path(args.words).stem)
    if args.out:
        Path(args.out).write_text(format_session(transcript), encoding="utf-8")
    else:
        sys.stdout.write(format_session(transcript))
    if args.trace:
        Path(args.trace).write_text(format_trace(trace, words), encoding="utf-8")
    return 0


def cmd_score(args) -> int:
    pairs = pair_sessions(_sessions(args.ref), _sessions(args.hyp))
    rows = []
    for metric in args.metrics.split(","):
        if metric == "wder":
            _, c = corpus_wder(pairs, args.scope)
            rows.append(MetricRecord("wder", c.numerator, c.denominator, "WDER"))
        elif metric == "cpwer":
            _, c = corpus_cpwer(pairs)
            rows.append(MetricRecord("cpwer", c.errors, c.ref_words, "cpWER"))
        else:
            raise InputError(f"unknown metric {metric!r}; choose from wder, cpwer")
    _emit(args, _metric_rows(rows, args.format), "scores.txt")
    return 0


def cmd_classify(args) -> int:
    pairs = pair_sessions(_sessions(args.ref), _sessions(args.hyp))
    lines, totals = [], {"a": 0, "b": 0, "c": 0}
    for ref, hyp in pairs:
        errors = classify_errors(ref, hyp)
        for kind, n in count_kinds(errors).items():
            totals[kind] += n
        if args.format == "records":
            lines += [
                f"{ref.session_id}\t{e.kind}\t{e.turn_range[0]}\t{e.turn_range[1]}\t{','.join(map(str, e.wrong_word_indices))}"
                for e in errors
            ]
    if args.format == "table":
        lines = [f"type {k}  {v}" for k, v in totals.items()]
    _emit(args, "".join(line + "\n" for line in lines), "errors.txt")
    return 0


def _alternates(path: Optional[str]):
    return LexiconGenerator(ConfusionLexicon.load(path)) if path else None


def cmd_simulate(args) -> int:
    exp = _experiment(args)
    sessions = _sessions(args.input)
    alternates = _alternates(args.lexicon)
    out, logs = [], []
    for i, s in enumerate(sessions):
        hyp, log = corrupt_session(s, exp.simulation, alternates, substream(exp.simulation.seed, "simulate", i))
        out.append(hyp)
        logs.append(f"{s.session_id}\t{sum(d.drawn for d in log.speaker_draws)}\t{len(log.word_substitutions)}")
    if args.out:
        write_corpus(out, args.out)
        _write_manifest(args, exp, "simulate")
        Path(args.out, "corruption.txt").write_text("session\tspeaker_errors\tword_substitutions\n" + "\n".join(logs) + "\n")
    else:
        for s in out:
            sys.stdout.write(format_session(s))
    return 0


def cmd_asp_build(args) -> int:
    pairs = parse_error_pairs(_read_text(args.pairs))
    kept = phonetic_filter(pairs) if not args.no_filter else pairs
    lexicon = build_confusion_lexicon(kept)
    target = Path(args.out or "lexicon.txt")
    lexicon.save(target)
    print(f"kept {len(kept)} of {len(pairs)} pairs; lexicon written to {target}")
    return 0


def cmd_asp_gen(args) -> int:
    gen = LexiconGenerator(ConfusionLexicon.load(args.lexicon), k=args.k)
    for word in args.words:
        alts = gen(word)
        if args.format == "records":
            sys.stdout.write("".join(f"{word}\t{a.word}\t{a.score:.6f}\n" for a in alts))
        else:
            print(f"{word}: " + ", ".join(f"{a.word} ({a.score:.3f})" for a in alts))
    return 0


def cmd_asp_eval(args) -> int:
    gen = LexiconGenerator(ConfusionLexicon.load(args.lexicon))
    report = evaluate_generator(gen, parse_error_pairs(_read_text(args.pairs)))
    print(f"BLEU {report.bleu:.4f}\tidentity {report.identity_bleu:.4f}\tpairs {report.pairs}")
    return 0


def cmd_sec_train(args) -> int:
    exp = _experiment(args)
    sessions = _sessions(args.corpus)
    validation = []
    if args.val_ref and args.val_hyp:
        validation = pair_sessions(_sessions(args.val_ref), _sessions(args.val_hyp))
    result = train_sec(
        sessions,
        validation,
        exp.simulation,
        exp.training,
        _alternates(args.lexicon),
        encoder=exp.sections()["encoder"],
        progress=lambda e: print(f"stage {e.stage} step {e.step} loss {e.loss:.4f} val_wder {e.val_wder:.4f}", file=sys.stderr),
    )
    target = Path(args.out or "model.ckpt")
    save_checkpoint(target, result.model, result.best_step, {"manifest": exp.sections()})
    print(f"best step {result.best_step}; checkpoint written to {target}")
    return 0


def cmd_sec_correct(args) -> int:
    exp = _experiment(args)
    model, _ = load_checkpoint(args.model)
    sessions = _sessions(args.input)
    changes, out = [], []
    for s in sessions:
        fixed, log = correct(s, model, exp.training)
        out.append(fixed)
        changes += [c.as_record() for c in log if not c.skipped]
    if args.out:
        write_corpus(out, args.out)
        Path(args.out, "changes.txt").write_text("".join(c + "\n" for c in changes), encoding="utf-8")
    else:
        for s in out:
            sys.stdout.write(format_session(s))
    if args.ref:
        report = evaluate_correction(_sessions(args.ref), sessions, model, exp.training)
        sys.stderr.write(_metric_rows(report.rows(), args.format))
        for w in report.warnings():
            print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_generate_corpus(args) -> int:
    exp = _experiment(args)
    spec = exp.corpus
    if args.sessions is not None:
        spec = replace(spec, num_sessions=args.sessions)
        exp = replace(exp, corpus=spec)
    if not args.out:
        raise InputError("generate-corpus needs --out DIR")
    write_corpus(generate_corpus(spec), args.out)
    _write_manifest(args, exp, "generate-corpus")
    print(f"wrote {spec.num_sessions} sessions to {args.out}")
    return 0


def cmd_experiment(args) -> int:
    exp = _experiment(args)
    result = run_experiment(exp, Path(args.out) if args.out else None, progress=lambda m: print(m, file=sys.stderr))
    if args.format == "records":
        sys.stdout.write(result.records())
    else:
        sys.stdout.write(result.table())
    return 0


def cmd_show_config(args) -> int:
    sys.stdout.write(format_config(_experiment(args).sections()))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="global random seed")
    common.add_argument("--config", default=argparse.SUPPRESS, help="key = value config file with sections")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file or directory")
    common.add_argument("--format", choices=("table", "records"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="sectag", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, parent=sub):
        p = parent.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(func=func)
        return p

    p = add("reconcile", cmd_reconcile, "assign diarization speakers to ASR words")
    p.add_argument("words", help="CTM file (or 4-column session file with --words-format session)")
    p.add_argument("rttm", help="RTTM speaker segments")
    p.add_argument("--words-format", choices=("ctm", "session"), default="ctm")
    p.add_argument("--trace", help="write the per-word assignment trace here")

    p = add("score", cmd_score, "WDER / cpWER of hypothesis sessions against references")
    p.add_argument("ref")
    p.add_argument("hyp")
    p.add_argument("--metrics", default="wder,cpwer")
    p.add_argument("--scope", choices=("session", "corpus"), default="session", help="speaker mapping scope for WDER")

    p = add("classify", cmd_classify, "count type a/b/c speaker errors")
    p.add_argument("ref")
    p.add_argument("hyp")

    p = add("simulate", cmd_simulate, "corrupt reference sessions with simulated errors")
    p.add_argument("input")
    p.add_argument("--lexicon", help="confusion lexicon for word substitutions")

    asp = add("asp", None, "alternate spelling prediction")
    asp_sub = asp.add_subparsers(dest="asp_command", required=True)
    p = add("build", cmd_asp_build, "build a confusion lexicon from ref/hyp/count pairs", asp_sub)
    p.add_argument("pairs")
    p.add_argument("--no-filter", action="store_true", help="skip the phonetic filter")
    p = add("gen", cmd_asp_gen, "k-best alternates for words", asp_sub)
    p.add_argument("--lexicon", required=True)
    p.add_argument("-k", type=int, default=3)
    p.add_argument("words", nargs="+")
    p = add("eval", cmd_asp_eval, "character BLEU of top-1 alternates", asp_sub)
    p.add_argument("--lexicon", required=True)
    p.add_argument("pairs")

    sec = add("sec", None, "speaker error corrector")
    sec_sub = sec.add_subparsers(dest="sec_command", required=True)
    p = add("train", cmd_sec_train, "train a corrector on reference sessions", sec_sub)
    p.add_argument("corpus")
    p.add_argument("--lexicon")
    p.add_argument("--val-ref")
    p.add_argument("--val-hyp")
    p = add("correct", cmd_sec_correct, "correct speaker tags with a trained model", sec_sub)
    p.add_argument("input")
    p.add_argument("--model", required=True)
    p.add_argument("--ref", help="reference sessions; prints before/after scores to stderr")

    p = add("generate-corpus", cmd_generate_corpus, "write a synthetic two-speaker corpus")
    p.add_argument("--sessions", type=int)

    add("experiment", cmd_experiment, "run the end-to-end experiment")
    add("show-config", cmd_show_config, "print the fully resolved configuration")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("seed", None), ("config", None), ("out", None), ("format", "table")):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except SectagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
